#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace resnls {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat key = value settings. Lines starting with '#' and blank lines are ignored; later keys override earlier ones.
class Config {
 public:
  static Config parse(const std::string& text, const std::string& origin = "<string>");
  static Config load(const std::string& path);

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::map<std::string, std::string>& values() const { return values_; }

  std::string get_string(const std::string& key, const std::string& def) const;
  double get_double(const std::string& key, double def) const;
  int get_int(const std::string& key, int def) const;

  // Keys outside `known`, in sorted order.
  std::vector<std::string> unknown_keys(const std::vector<std::string>& known) const;

 private:
  std::map<std::string, std::string> values_;
};

struct CsvTable {
  std::string name;                        // file stem
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  void add(const std::string& h, std::vector<double> col);
  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
};

// Shortest round-trip formatting so that repeated runs produce identical bytes.
std::string format_double(double v);
void write_csv(const std::string& path, const CsvTable& t);
void write_text(const std::string& path, const std::string& text);

std::string code_version();

}  // namespace resnls
