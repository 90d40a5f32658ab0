#pragma once

#include "resnls/fast_transform.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace resnls {

// e^{-itk^2} forward(u1 conj(u2) u3), u_j = inverse(e^{itk^2} g_j). Throws std::domain_error when the
// output reaches the edge of the k-grid above alias_tol relative to its maximum.
ArrayXcd apply_nsd(const SpectralTransform& tr, const ArrayXcd& g1, const ArrayXcd& g2, const ArrayXcd& g3, double t,
                   double alias_tol = 1e-4);

// Dense transform built straight from a split, so that the oracle and the decomposition share grids.
class SplitTransform : public SpectralTransform {
 public:
  explicit SplitTransform(const BasisSplit& s) : s_(s) {}
  const XGrid& xgrid() const override { return s_.xg; }
  const KGrid& kgrid() const override { return s_.kg; }
  const ArrayXd& kweights() const override { return s_.wk; }
  BasisMode mode() const override { return s_.mode; }
  ArrayXcd forward(const ArrayXcd& f) const override;
  ArrayXcd inverse(const ArrayXcd& g) const override;

 private:
  const BasisSplit& s_;
};

// K_S(x, k) and K_R(x, k) on the x-grid; k must be a node of the k-grid.
struct SplitColumn {
  ArrayXcd ks, kr;
};
SplitColumn split_column(const BasisSplit& s, double k);

// (2 pi)^2 mu#_{R,1}(k, l, m, n): all products conj(K_A1) K_A2 conj(K_A3) K_A4 with at least one K_R factor.
cd mu_regular_R1(const BasisSplit& s, const std::array<double, 4>& q);

// One term of mu#_L: conj(c1(k)) c2(l) conj(c3(m)) c4(n) [pi delta(Xi) + pv_sign * pv i zeta_r(Xi) / Xi] with
// Xi = -s1 k + s2 l - s3 m + s4 n, zeta_r the flat transform of the even part of -(d/dx) of the side cutoff
// to the power r. In the generic mode the coefficients need not vanish at 0.
struct MuLTerm {
  std::array<int, 4> iota{};    // 0, +1 or -1: which piece of K_S sits in each slot
  std::array<int, 4> sigma{};   // exponent signs of the plane waves
  int side = 1;                 // +1 for chi_+^r, -1 for chi_-^r
  int r = 0;                    // number of slots carrying the cutoff
  double weight = 1;            // constant limit of h0^{#0} on that side
  std::array<const ArrayXcd*, 4> coef{};
  double vanishing_at_zero = 0; // max over slots of the smallest one-sided limit at 0
};
std::vector<MuLTerm> mu_L_assemble(const BasisSplit& s, double drop_tol = 1e-12);

struct NsdCheckReport {
  double oracle_norm = 0;
  double delta = 0, L = 0, R1 = 0, R2 = 0;  // part norms relative to the oracle norm
  double residual = 0;                      // ||oracle - sum of parts|| / ||oracle||
  int l_terms = 0;
  double pv_center = 0;                     // largest central-cell correction relative to the oracle norm
  double r2_decay = 0;                      // sup <x>^{gamma-1} (|w| + |w'|) over the regular weights
  bool pass = false;
};
// Oracle by apply_nsd against delta (discrete convolution) + L (p.v. quadrature) + R1 + R2.
NsdCheckReport check_decomposition(const BasisSplit& s, const ArrayXcd& g1, const ArrayXcd& g2, const ArrayXcd& g3,
                                   double t, double gamma = 3.0, double tol = 1e-3);

// b(y) for the trilinear form: delta, pv zeta_hat(y) / (i y) with zeta the unit Gaussian of width `width`,
// or the regular Gaussian exp(-width^2 y^2 / 2).
struct TrilinearSpec {
  enum class Dist { Delta, PV, Regular };
  Dist b = Dist::Delta;
  std::array<int, 4> eps{1, -1, 1, -1};
  double t = 0;
  double width = 1.0;
  bool times_y = false;  // use y b(y) instead of b(y)

  cd b_at(double y) const;                  // regular values; the pv kernel without the p.v. prescription
  cd inverse_b(double x) const;             // flat inverse transform of b (times_y = false)
  double pv_limit() const;                  // zeta_hat(0) for the pv case, 0 otherwise
  bool singular() const { return !times_y && b != Dist::Regular; }
};
const char* to_string(TrilinearSpec::Dist d);

// T_b(f1,f2,f3)(k) = int e^{it(-k^2+l^2-m^2+n^2)} f1(l) conj(f2(m)) f3(n) b(e1 k + e2 l + e3 m + e4 n)
// by direct quadrature on the half-offset grid.
ArrayXcd trilinear(const TrilinearSpec& spec, const KGrid& kg, const ArrayXcd& f1, const ArrayXcd& f2,
                   const ArrayXcd& f3);

// Flat inverse transform of e^{itk^2} T_b against (2 pi)^{3/2} B(e1 x) u1(-e1 e2 x) conj(u2(e1 e3 x)) u3(-e1 e4 x),
// u_j = e^{-it d_xx} F^{-1} f_j, B = F^{-1} b. Relative sup residual over x.
double check_inverse_fd(const TrilinearSpec& spec, const KGrid& kg, const ArrayXcd& f1, const ArrayXcd& f2,
                        const ArrayXcd& f3, const ArrayXd& x);

// e1 d_k T_b against -e2 T_b(f1',f2,f3) + e3 T_b(f1,f2',f3) - e4 T_b(f1,f2,f3') - 2it T_{yb}, with d_k by
// second-order centred differences. Relative L2 residual on the interior of the grid.
double check_commutation(const TrilinearSpec& spec, const KGrid& kg, const ArrayXcd& f1, const ArrayXcd& f2,
                         const ArrayXcd& f3);

}  // namespace resnls
