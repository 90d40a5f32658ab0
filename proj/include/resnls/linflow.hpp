#pragma once

#include "resnls/fast_transform.hpp"

#include <functional>
#include <string>
#include <vector>

namespace resnls {

struct EstimateReport {
  std::string id;
  double constant = 0;          // sup over samples and times of LHS / RHS
  int samples = 0;
  std::vector<double> times;    // per-time maxima over samples
  std::vector<double> ratios;
  std::vector<double> lhs;      // per-time maxima of the left-hand side, for rate fits
  double fitted_rate = 0;       // log-log slope of lhs against t
  bool stable = false;          // set by mark_stability
  double variation = 0;         // |c - c_ref| / max(c, c_ref)
};

// Relative change against a reference run (refined grid or doubled horizon).
void mark_stability(EstimateReport& r, const EstimateReport& ref, double tol = 0.2);

// Radius containing all but `tail` of the mass of f, and the frequency bound of g in the same sense.
double mass_radius(const XGrid& xg, const ArrayXcd& f, double tail = 1e-6);
double effective_kmax(const KGrid& kg, const ArrayXd& wk, const ArrayXcd& g, double tail = 1e-6);

// Largest t with (0.9 L - mass_radius) >= 2 k_eff t.
double safe_time(const SpectralTransform& T, const ArrayXcd& f0, double tail = 1e-6);

// e^{itH} f0 on the continuous spectral subspace; throws beyond safe_time or on boundary mass above tol.
ArrayXcd propagate(const SpectralTransform& T, const ArrayXcd& f0, double t, double tol = 1e-6);
ArrayXcd propagate_spectral(const SpectralTransform& T, const ArrayXcd& g, double t);

// sup_t ||e^{itH} h||_inf / (t^{-1/2} ||h#||_inf + t^{-3/4} ||d_k h#||_2).
EstimateReport decay_constant(const SpectralTransform& T, const std::vector<ArrayXcd>& data,
                              const std::vector<double>& times);

// Same ratio with only the singular part int K#_S e^{ik^2 t} h dk on the left.
EstimateReport singular_decay_constant(const BasisSplit& s, const std::vector<ArrayXcd>& h,
                                       const std::vector<double>& times);

// <t> ||<x>^{-1} e^{itH} f||_inf / ||<x> f||_2 with the decay rate of the numerator fitted over the times.
EstimateReport improved_local_decay(const SpectralTransform& T, const std::vector<ArrayXcd>& data,
                                    const std::vector<double>& times);

using Kernel = std::function<cd(double x, double k)>;
using Symbol = std::function<cd(double k)>;

Kernel plane_wave();   // e^{ikx}
Kernel unit_kernel();  // 1

// F(s,y) = sum_j e^{i omega_j s} b_j(y) sampled on y.
struct TimeHarmonicField {
  ArrayXd y;
  double dy = 0;
  std::vector<double> omega;
  std::vector<ArrayXcd> profile;
};
std::vector<TimeHarmonicField> random_time_harmonic(unsigned seed, int count, int terms, double omega_min,
                                                    double omega_max, const ArrayXd& y);

// || int_0^t int e^{-ik^2 s} conj(phi(k) Q(y,k)) F(s,y) dy ds ||_{L^2_k} / || <y>^{-beta} F ||_{L^1_y L^2_s}.
// The s integral is exact for time-harmonic F.
EstimateReport smoothing_constant(const Kernel& Q, double beta, const Symbol& phi,
                                  const std::vector<TimeHarmonicField>& F, double t, const KGrid& kg);

// sup_t <t> sup_x <x>^beta |int 1_{side k >= 0} phi Q e^{ik^2 t} h dk| / ||h||_{H^1}.
EstimateReport local_decay_constant(const Kernel& Q, double beta, const Symbol& phi, int side, const KGrid& kg,
                                    const std::vector<ArrayXcd>& h, const std::vector<double>& times,
                                    const ArrayXd& x);

// sup_t <t>^{1/2} ||<x>^{beta-1} d_x int 1_{side k >= 0} e^{ikx} Q e^{ik^2 t} h dk||_{L^2} / ||h||_{H^1}.
EstimateReport local_derivative_constant(const Kernel& Q, double beta, int side, const KGrid& kg,
                                         const std::vector<ArrayXcd>& h, const std::vector<double>& times,
                                         const ArrayXd& x);

double h1_norm_k(const KGrid& kg, const ArrayXd& wk, const ArrayXcd& h);

}  // namespace resnls
