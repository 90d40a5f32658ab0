#pragma once

#include "resnls/grid.hpp"

#include <functional>
#include <vector>

namespace resnls {

// Weights w_j with sum_j w_j f(nodes_j) = f^{(deriv)}(at) exact for polynomials of degree < nodes.size().
std::vector<double> lagrange_weights(const std::vector<double>& nodes, double at, int deriv = 0);

// One-sided limit at k = 0 from the points k = (j+1/2)dk (side=+1) or -(j+1/2)dk (side=-1).
cd limit_at_zero(const KGrid& kg, const ArrayXcd& g, int side, int npts = 8);

// Least-squares slope of log(y) against log(t); entries with y <= 0 are skipped.
double loglog_slope(const std::vector<double>& t, const std::vector<double>& y);

// Least-squares fit y = a + b*x, returns (a, b).
std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y);

// Centred derivative along k, fourth order inside, one-sided near the edges.
ArrayXcd kderiv(const ArrayXcd& g, double dk);

// Spectral derivative on a periodic grid.
ArrayXcd spectral_dx(const ArrayXcd& f, double dx);
ArrayXcd spectral_dxx(const ArrayXcd& f, double dx);

// Discrete L2 norms.
double l2_norm_x(const ArrayXcd& f, double dx);
double l2_norm_k(const ArrayXcd& g, const ArrayXd& w);

// Gauss-Legendre nodes/weights on [-1,1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

// Compactly supported bump c*exp(-1/(1-x^2)) with unit integral, and chi_+(x) = int_{-inf}^x bump.
double bump(double x);
double chi_plus(double x);
double bump_normalizer();

// Fixed-seed Gaussian wave packets used by property tests and estimate sweeps.
struct Packet {
  double amp_re, amp_im, x0, k0, width;
};
std::vector<Packet> random_packets(unsigned seed, int count, double xmax, double kmax, double wmin, double wmax);
ArrayXcd eval_packets(const std::vector<Packet>& p, const ArrayXd& x);

// Runs body(i) for i in [0,n) on the available hardware threads.
void parallel_for(int n, const std::function<void(int)>& body);
}  // namespace resnls
