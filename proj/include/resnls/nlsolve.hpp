#pragma once

#include "resnls/fast_transform.hpp"

#include <string>
#include <utility>
#include <vector>

namespace resnls {

struct EvolveOptions {
  double tol_cons = 1e-6;        // relative mass and energy drift that aborts the run
  double coarse_dt = 1.0;        // uniform snapshot spacing
  int companion_steps = 5;       // extra snapshots at t +- companion_steps * dt around dyadic times t >= 1
  double dyadic_min = 0.25;      // smallest dyadic snapshot time 2^{j/4}
  double boundary_tol = 1e-4;    // boundary_mass above this aborts
  double subspace_tol = 1e-6;    // u0 must lie in the continuous spectral subspace to this relative accuracy
  bool cubic = true;             // false gives the linear flow
  double filter_start = 0.6;     // distorted scheme: cos^2 taper of the spectral field between these fractions of k_max
  double filter_end = 0.8;
  double edge_taper = 0.05;      // distorted scheme: cos^2 taper over this fraction of the box at each end
};

struct Trajectory {
  std::string scheme;            // "distorted" or "flat"
  int sign = -1;                 // i u_t - u_xx + V u + sign |u|^2 u = 0
  double dt = 0;
  int order = 2;
  BasisMode mode = BasisMode::Generic;
  XGrid xg;
  KGrid kg;
  ArrayXd wk;
  std::vector<double> t;
  std::vector<int> kind;         // 0 start, 1 dyadic, 2 coarse, 3 companion, 4 final
  std::vector<ArrayXcd> u;
  std::vector<ArrayXcd> fs;      // e^{-itk^2} F u(t); empty for the flat scheme
  std::vector<double> M, H;
  double mass_drift = 0, energy_drift = 0;
  bool aborted = false;
  std::string abort_reason;

  int size() const { return static_cast<int>(t.size()); }
  int nearest(double time) const;
};

// Mass int |u|^2 and energy 1/2 int |u_x|^2 + 1/2 int V |u|^2 + sign/4 int |u|^4 with a spectral derivative.
std::pair<double, double> conserved(const XGrid& xg, const ArrayXcd& u, const ArrayXd& V, int sign);

// Step indices of the snapshot schedule for [0, T] at step dt.
std::vector<std::pair<long, int>> snapshot_schedule(double T, double dt, const EvolveOptions& opt);

// Strang splitting: half nonlinear rotation, exact linear step e^{i dt k^2} in the spectral variable, half rotation.
Trajectory evolve(const SpectralTransform& tr, const ArrayXd& V, const ArrayXcd& u0, int sign, double T, double dt,
                  const EvolveOptions& opt = {});

// Flat FFT Strang splitting with V and the cubic term in the multiplicative substep.
Trajectory reference_flat_splitstep(const XGrid& xg, const ArrayXd& V, const ArrayXcd& u0, int sign, double T,
                                    double dt, const EvolveOptions& opt = {});

}  // namespace resnls
