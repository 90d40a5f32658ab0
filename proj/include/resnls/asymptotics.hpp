#pragma once

#include "resnls/nlsolve.hpp"

#include <vector>

namespace resnls {

struct NormSeries {
  std::vector<double> t;
  std::vector<double> f_inf;      // ||f#(t)||_inf
  std::vector<double> dkf_l2;     // ||d_k f#(t)||_2
  std::vector<double> u_h1;       // ||u(t)||_{H^1}
  std::vector<double> sqrt_t_uinf;
  double alpha_hat = 0;           // log-log slope of ||d_k f#||_2 on [t_fit, T]
  double uinf_exponent = 0;       // log-log slope of ||u||_inf on [t_fit, T]
  double t_fit = 4;
};
NormSeries norms(const Trajectory& traj, double t_fit = 4.0);

// Coupling of the asymptotic ODE: i d_t f# = lambda/(2t) |f#|^2 f#, lambda = -sign.
inline double ode_coupling(int sign) { return -static_cast<double>(sign); }

struct OdeResidual {
  std::vector<double> t;
  std::vector<double> r;          // sup over kmin <= |k| <= kmax
  std::vector<double> r_inner;    // sup over 0 < |k| < kmin
  std::vector<double> rhs;        // sup of (1/2t)|f#|^3 on the main window
  std::vector<bool> inconclusive; // finite-difference error estimate above r
  double exponent = 0;            // log-log slope of r on [t_min, T]
  double t_min = 8;
};
// Central differences from the companion snapshots t +- h around each dyadic time.
OdeResidual ode_residual(const Trajectory& traj, double kmin = 0.1, double kmax = 2.0, double t_min = 8.0);

struct ScatteringAsymptote {
  std::vector<double> t;
  std::vector<ArrayXcd> w;        // f# exp(i lambda int_0^t |f#|^2 ds / (2(s+1)))
  ArrayXcd W;                     // w(T)
  std::vector<double> cauchy_t;   // dyadic t with 2t <= T
  std::vector<double> cauchy;     // ||w(t) - w(2t)||_inf
  double rho = 0;                 // minus the log-log slope of cauchy on [t_min, T/2]
  bool rho_lower_bound = false;   // differences not monotone: noise floor reached
  double modulus_residual = 0;    // max | |w| - |f#| |
  double gauge_residual = 0;      // lower limit t0 changes w only by a t-independent factor
  ArrayXd c_phase;                // fitted log-phase coefficient per k (0 outside the fit set)
  ArrayXd c_model;                // 1/2 |W|^2
  double c_mean = 0;              // |W|^2-weighted mean of c_phase on the window
  double c_model_mean = 0;
};
ScatteringAsymptote modified_profile(const Trajectory& traj, double t_min = 8.0, double kmin = 0.1,
                                     double kmax = 2.0, double gauge_t0 = 1.0);

struct AsymptoteErrors {
  std::vector<double> t;
  std::vector<double> e_log;      // sqrt(t) sup |u - formula with log phase|
  std::vector<double> e_plain;    // same without the log phase
  std::vector<double> e_log_all;  // including the region |x| < x_inner
  std::vector<double> e_plain_all;
  double delta_hat = 0;           // minus the log-log slope of e_log
  double x_inner = 0;
  bool window_shrunk = false;
};
// u(t,x) ~ e^{-ix^2/4t} (-2it)^{-1/2} exp(-i lambda/2 |W(k0)|^2 log t) W(k0), k0 = -x/2t, on
// x_inner <= |x| <= 0.8 * 2 k_W t, where k_W bounds the support of W.
AsymptoteErrors physical_asymptote_check(const Trajectory& traj, const ArrayXcd& W, double t_min = 16.0,
                                         double x_inner = 5.0, double support_tol = 1e-3);

}  // namespace resnls
