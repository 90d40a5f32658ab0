#pragma once

#include "resnls/potentials.hpp"

#include <vector>

namespace resnls {

struct JostOptions {
  double h_max = 0.01;        // largest Magnus substep
  bool k_derivative = false;  // fill dk_mp / dk_mm after the solve
  bool x_derivative = false;  // keep d/dx m on the grid
};

struct JostField {
  XGrid xg;
  KGrid kg;
  ArrayXXcd mp, mm;          // m_+(x_j,k_i), m_-(x_j,k_i); rows x, columns k
  ArrayXXcd dk_mp, dk_mm;    // empty until jost_k_derivative
  ArrayXXcd dx_mp, dx_mm;    // empty unless requested
  ArrayXd m0p, m0m;          // k = 0 columns
  ArrayXd dx_m0p, dx_m0m;
  ArrayXcd end_m, end_dm;    // entries [0,nk): m_+, m_+' at x = -L; entries [nk,2nk): m_-, m_-' at x = +L
  double wronskian_residual = 0;  // max_k |W(psi_+(k), psi_+(-k)) + 2ik| / (2|k|)
  double h_used = 0;
  double dk_crosscheck = -1;      // relative mismatch of the re-solve check, -1 when not run
};

// Single column of m_+ (side=+1) or m_- (side=-1) with its x-derivative.
struct JostColumn {
  ArrayXcd m, dm;
  cd end_m, end_dm;  // value at the far end (x = -L for m_+, x = +L for m_-)
};
JostColumn jost_column(const Potential& V, double k, int side, double h_max = 0.01);

JostField solve_jost(const Potential& V, const KGrid& kg, const JostOptions& opt = {});

// Fourth-order centred differences along k, then one re-solve check at a mid-range k.
void jost_k_derivative(JostField& field, const Potential& V);

// Residual of m'' +- 2ik m' - V m by sixth-order differences for one column (relative to max|V m|).
double jost_ode_residual(const JostField& field, const Potential& V, int col, int side);

struct BoundReport {
  double c_m_minus_1 = 0;        // sup |m_+ - 1| <k> / W_+^1 over x >= -1 (and mirror for m_-)
  double c_m_growth = 0;         // sup |m_+ - 1| <k> / <x> over x <= 1
  double c_dk = 0;               // sup |dk m_+| |k| / W_+^1 over x >= -1
  double c_dx = 0;               // sup |dx m_+| / W_+^0 over x >= -1
  bool all_finite = true;
};
BoundReport check_jost_bounds(const JostField& field, const Potential& V);

}  // namespace resnls
