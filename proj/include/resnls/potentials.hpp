#pragma once

#include "resnls/grid.hpp"

#include <functional>
#include <optional>
#include <string>

namespace resnls {

enum class Parity { Even, Odd, None };
const char* to_string(Parity p);

struct Potential {
  XGrid grid;
  ArrayXd V;
  double gamma = 3.0;                      // decay exponent in <x>^gamma V in L^1
  std::string tag;                         // closed-form tag, empty when sampled only
  std::function<double(double)> closed;    // optional closed form V(x)
  bool even = false;                       // set only when the samples are symmetric
  std::optional<bool> discrete_spectrum;   // known a priori for built-in families
  std::optional<Parity> resonance_parity;  // parity of phi when built from a resonance

  // Closed form when available, otherwise 8-point Lagrange interpolation of the samples.
  double eval(double x) const;
  double l1() const { return V.abs().sum() * grid.dx; }
  // Same potential sampled on another grid (closed form or interpolation).
  Potential resampled(const XGrid& g) const;
};

struct DecayWeights {
  double s = 0;
  ArrayXd plus;   // W_+^s(x) = int_x^inf <y>^s |V|
  ArrayXd minus;  // W_-^s(x) = int_-inf^x <y>^s |V|
};

// Zero-energy profile phi with its second derivative; parity fixed by the caller.
struct ResonanceProfile {
  std::string name;
  std::function<double(double)> phi;
  std::function<double(double)> phi2;
  std::function<double(double)> ratio;  // optional closed form of phi''/phi, used at nodes
  Parity parity = Parity::None;
};

ResonanceProfile tanh_profile();
ResonanceProfile sech2_bump_profile(double c);  // 1 + c*sech^2, even, no nodes for c > -1
ResonanceProfile constant_profile();

Potential free_potential(const XGrid& g);
Potential poschl_teller(int n, const XGrid& g);
Potential sech2_potential(double c, const XGrid& g);  // V = c*sech^2(x)
Potential from_resonance(const ResonanceProfile& p, const XGrid& g);
Potential from_samples(const XGrid& g, const ArrayXd& V, double gamma);

// Builds a potential from a kind name: free, pt, sech2, resonance-tanh, resonance-bump.
Potential make_potential(const std::string& kind, double param, const XGrid& g);

DecayWeights decay_weights(const Potential& V, double s, double tail_tol = 1e-10);

bool symmetric_samples(const Potential& V, double tol);

}  // namespace resnls
