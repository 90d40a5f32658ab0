#pragma once

#include "resnls/dft.hpp"

#include <array>

namespace resnls {

// sqrt(2 pi) K#(x,k) = K_S + K_R with
// K_S = h0(x) e^{ikx} + chi_+(x)[a_+^+ e^{ikx} + a_+^- e^{-ikx}] + chi_-(x)[a_-^+ e^{ikx} + a_-^- e^{-ikx}].
// In the even and generic modes K# stands for K.
struct BasisSplit {
  XGrid xg;
  KGrid kg;
  ArrayXd wk;
  BasisMode mode = BasisMode::Generic;
  double T0 = 0;                 // a in the non-generic modes, 0 otherwise
  ArrayXd h0;                    // T0 m_+(x,0)
  ArrayXd chip, chim;
  ArrayXcd app, apm, amp, amm;   // a_+^+, a_+^-, a_-^+, a_-^-
  ArrayXXcd KR;

  double reassembly_residual = 0;
  double coeff_at_zero = 0;      // max one-sided limit of |a| at 0
  double lipschitz = 0;          // max divided difference of the coefficients
  double kr_at_zero = 0;         // max_x |K_R(x,0+-)|
  double kr_weighted = 0;        // sup <x> |K_R|
  double kr_weighted_gamma = 0;  // sup <x>^{gamma-1} |K_R|

  // sigma(k) in the k < 0 formulas: -1 for the odd (sharp) mode, +1 otherwise.
  double sigma() const { return mode == BasisMode::Odd ? -1.0 : 1.0; }
  cd ks(int j, int i) const;     // K_S(x_j, k_i)
};

BasisSplit split(const Eigenbasis& b, const JostField& field, const ScatteringData& sd, double gamma = 3.0,
                 double tol = 1e-8);

enum class Part { Zero, Plus, Minus, S, R };
const char* to_string(Part p);

// (2 pi)^{-1/2} chi_*(x) int K#_*(x,k) g(k) dk; the parts sum to inverse(b, g).
ArrayXcd project(const BasisSplit& s, const ArrayXcd& g, Part part);

struct TailReport {
  // [r-1][alpha][side]: sup of <x>^{gamma-1} |d^alpha (m_+(x,0)^r - eps^r)| on the support of chi_eps,
  // side 0 is eps = +1, side 1 is eps = a.
  std::array<std::array<std::array<double, 2>, 2>, 4> sup{};
  double max() const;
};
TailReport resonance_tail_check(const JostField& field, double a, double gamma = 3.0);

}  // namespace resnls
