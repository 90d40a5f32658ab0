#include "resnls/numerics.hpp"

#include <unsupported/Eigen/FFT>

#include <atomic>
#include <cmath>
#include <random>
#include <thread>

namespace resnls {

std::vector<double> lagrange_weights(const std::vector<double>& nodes, double at, int deriv) {
  const int m = static_cast<int>(nodes.size());
  // Solve the transposed Vandermonde system in shifted monomials (x - at)^p.
  Eigen::MatrixXd A(m, m);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
  for (int p = 0; p < m; ++p)
    for (int j = 0; j < m; ++j) A(p, j) = std::pow(nodes[j] - at, p);
  if (deriv < m) {
    double f = 1.0;
    for (int q = 2; q <= deriv; ++q) f *= q;
    b(deriv) = f;
  }
  Eigen::VectorXd w = A.fullPivLu().solve(b);
  return std::vector<double>(w.data(), w.data() + m);
}

ArrayXd k_weights(const KGrid& kg) { return ArrayXd::Constant(kg.n, kg.dk); }

KGrid fft_kgrid(const XGrid& xg) {
  if (xg.n % 4) throw std::invalid_argument("fft_kgrid: n must be a multiple of 4");
  return KGrid{2.0 * kPi / (xg.n * xg.dx), xg.n};
}

cd limit_at_zero(const KGrid& kg, const ArrayXcd& g, int side, int npts) {
  std::vector<double> nodes(npts);
  for (int j = 0; j < npts; ++j) nodes[j] = j + 0.5;
  auto w = lagrange_weights(nodes, 0.0, 0);
  const int z = kg.first_positive();
  cd s = 0;
  for (int j = 0; j < npts; ++j) s += w[j] * (side > 0 ? g(z + j) : g(z - 1 - j));
  return s;
}

std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  if (n < 2) return {0.0, 0.0};
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = x[i];
    b(i) = y[i];
  }
  Eigen::Vector2d c = A.colPivHouseholderQr().solve(b);
  return {c(0), c(1)};
}

double loglog_slope(const std::vector<double>& t, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (size_t i = 0; i < t.size(); ++i)
    if (y[i] > 0 && t[i] > 0) {
      lx.push_back(std::log(t[i]));
      ly.push_back(std::log(y[i]));
    }
  return linear_fit(lx, ly).second;
}

ArrayXcd kderiv(const ArrayXcd& g, double dk) {
  const int n = static_cast<int>(g.size());
  ArrayXcd d(n);
  if (n < 5) throw std::invalid_argument("kderiv: need at least 5 points");
  for (int i = 2; i < n - 2; ++i)
    d(i) = (g(i - 2) - 8.0 * g(i - 1) + 8.0 * g(i + 1) - g(i + 2)) / (12.0 * dk);
  // Fourth-order one-sided stencils at the two ends.
  auto fwd = [&](int i, int s) {
    return double(s) * (-25.0 * g(i) + 48.0 * g(i + s) - 36.0 * g(i + 2 * s) + 16.0 * g(i + 3 * s) - 3.0 * g(i + 4 * s)) /
           (12.0 * dk);
  };
  auto mixed = [&](int i, int s) {
    return double(s) * (-3.0 * g(i - s) - 10.0 * g(i) + 18.0 * g(i + s) - 6.0 * g(i + 2 * s) + g(i + 3 * s)) / (12.0 * dk);
  };
  d(0) = fwd(0, 1);
  d(1) = mixed(1, 1);
  d(n - 1) = fwd(n - 1, -1);
  d(n - 2) = mixed(n - 2, -1);
  return d;
}

namespace {
ArrayXcd spectral_multiply(const ArrayXcd& f, double dx, int order) {
  const int n = static_cast<int>(f.size());
  Eigen::FFT<double> fft;
  std::vector<cd> in(f.data(), f.data() + n), out;
  fft.fwd(out, in);
  const double dk = 2.0 * kPi / (n * dx);
  for (int i = 0; i < n; ++i) {
    int m = i <= n / 2 ? i : i - n;
    if (order == 1 && 2 * i == n) m = 0;
    cd ik(0.0, m * dk);
    out[i] *= order == 1 ? ik : ik * ik;
  }
  std::vector<cd> back;
  fft.inv(back, out);
  return Eigen::Map<ArrayXcd>(back.data(), n);
}
}  // namespace

ArrayXcd spectral_dx(const ArrayXcd& f, double dx) { return spectral_multiply(f, dx, 1); }
ArrayXcd spectral_dxx(const ArrayXcd& f, double dx) { return spectral_multiply(f, dx, 2); }

double l2_norm_x(const ArrayXcd& f, double dx) { return std::sqrt(f.abs2().sum() * dx); }
double l2_norm_k(const ArrayXcd& g, const ArrayXd& w) { return std::sqrt((g.abs2() * w).sum()); }

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 1; j <= n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
  }
}

namespace {
double raw_bump(double x) { return std::abs(x) < 1.0 ? std::exp(-1.0 / (1.0 - x * x)) : 0.0; }

double raw_integral(double a, double b) {
  static std::vector<double> gx, gw;
  if (gx.empty()) gauss_legendre(64, gx, gw);
  double s = 0, h = 0.5 * (b - a), c = 0.5 * (b + a);
  for (size_t i = 0; i < gx.size(); ++i) s += gw[i] * raw_bump(c + h * gx[i]);
  return s * h;
}
}  // namespace

double bump_normalizer() {
  static const double c = [] {
    double s = 0;
    for (int p = 0; p < 8; ++p) s += raw_integral(-1.0 + p * 0.25, -1.0 + (p + 1) * 0.25);
    return 1.0 / s;
  }();
  return c;
}

double bump(double x) { return bump_normalizer() * raw_bump(x); }

double chi_plus(double x) {
  if (x <= -1.0) return 0.0;
  if (x >= 1.0) return 1.0;
  if (x > 0.0) return 1.0 - chi_plus(-x);
  double s = 0;
  const int pieces = 4;
  const double h = (x + 1.0) / pieces;
  for (int p = 0; p < pieces; ++p) s += raw_integral(-1.0 + p * h, -1.0 + (p + 1) * h);
  return bump_normalizer() * s;
}

std::vector<Packet> random_packets(unsigned seed, int count, double xmax, double kmax, double wmin, double wmax) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Packet> out;
  for (int i = 0; i < count; ++i) {
    Packet p;
    p.amp_re = 2.0 * u(rng) - 1.0;
    p.amp_im = 2.0 * u(rng) - 1.0;
    p.x0 = xmax * (2.0 * u(rng) - 1.0);
    p.k0 = kmax * (2.0 * u(rng) - 1.0);
    p.width = wmin + (wmax - wmin) * u(rng);
    out.push_back(p);
  }
  return out;
}

ArrayXcd eval_packets(const std::vector<Packet>& ps, const ArrayXd& x) {
  ArrayXcd f = ArrayXcd::Zero(x.size());
  for (const auto& p : ps)
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      double y = (x(j) - p.x0) / p.width;
      f(j) += cd(p.amp_re, p.amp_im) * std::exp(-0.5 * y * y) * std::polar(1.0, p.k0 * x(j));
    }
  return f;
}

void parallel_for(int n, const std::function<void(int)>& body) {
  int threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads <= 1 || n < 2) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  threads = std::min(threads, n);
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) body(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace resnls
