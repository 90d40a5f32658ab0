#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>

namespace resnls {

using cd = std::complex<double>;
using Eigen::ArrayXcd;
using Eigen::ArrayXd;
using Eigen::ArrayXXcd;
using Eigen::ArrayXXd;

inline constexpr double kPi = 3.14159265358979323846;
inline const double kSqrt2Pi = std::sqrt(2.0 * kPi);

// Uniform periodic-style grid x_j = x0 + j*dx, j = 0..n-1.
struct XGrid {
  double x0 = -40.0;
  double dx = 80.0 / 4096;
  int n = 4096;

  // x_j = -L + j*2L/n, the convention shared with the FFT path.
  static XGrid box(double L, int n) {
    if (n < 8 || L <= 0) throw std::invalid_argument("XGrid::box: need L > 0 and n >= 8");
    return XGrid{-L, 2.0 * L / n, n};
  }

  double x(int j) const { return x0 + j * dx; }
  double L() const { return -x0; }
  ArrayXd points() const { return ArrayXd::LinSpaced(n, x0, x0 + (n - 1) * dx); }

  // Index of -x_j, or -1 when the mirror point is off grid.
  int mirror(int j) const {
    double m = (-x(j) - x0) / dx;
    int i = static_cast<int>(std::lround(m));
    if (i < 0 || i >= n || std::abs(m - i) > 1e-9) return -1;
    return i;
  }

  int index_of(double x) const { return static_cast<int>(std::lround((x - x0) / dx)); }
};

// Zero-excluding symmetric grid k_i = (i - n/2 + 1/2) dk.
struct KGrid {
  double dk = 1.0 / 64;
  int n = 2048;

  static KGrid symmetric(double kmax, int n) {
    if (n < 12 || n % 2) throw std::invalid_argument("KGrid::symmetric: need even n >= 12");
    return KGrid{2.0 * kmax / n, n};
  }

  double k(int i) const { return (i - n / 2 + 0.5) * dk; }
  double kmax() const { return 0.5 * n * dk; }
  int mirror(int i) const { return n - 1 - i; }
  int first_positive() const { return n / 2; }
  ArrayXd points() const { return ArrayXd::LinSpaced(n, k(0), k(n - 1)); }
  double sgn(int i) const { return i >= n / 2 ? 1.0 : -1.0; }
};

// Midpoint weights on the half-offset grid.
ArrayXd k_weights(const KGrid& kg);

// Grids related by dk*dx = 2*pi/n, centred so that the FFT applies directly.
KGrid fft_kgrid(const XGrid& xg);

}  // namespace resnls
