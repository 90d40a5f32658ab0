#pragma once

#include "resnls/jost.hpp"

namespace resnls {

enum class Genericity { Generic, NonGeneric, Indeterminate };
const char* to_string(Genericity g);

struct ScatteringData {
  KGrid kg;
  ArrayXcd T, Rp, Rm;        // on the zero-excluding grid
  ArrayXcd dT, dRp, dRm;     // centred differences along k
  cd T0p, T0m, Rp0p, Rp0m, Rm0p, Rm0m;  // one-sided limits k -> 0+ / 0-

  Genericity cls = Genericity::Indeterminate;
  double Ip = 0, Im = 0;     // int V m_+(.,0), int V m_-(.,0)
  double tol_gen = 0;
  ArrayXd phi;               // m_+(.,0) when non-generic
  double a = 0;              // phi(-L)
  double a_tail = 0;         // |phi'(-L)| * L, size of the neglected drift beyond -L
  Parity parity = Parity::None;
  int bound_states = 0;      // sign changes of m_+(.,0)

  // k = 0 values implied by the class: 2a/(1+a^2), (1-a^2)/(1+a^2), (a^2-1)/(1+a^2), or 0, -1, -1.
  double T0 = 0, Rp0 = 0, Rm0 = 0;

  double unitarity_residual = 0;  // max_k ||T|^2 + |R_+-|^2 - 1|
  double symmetry_residual = 0;   // max_k |T(-k) - conj T(k)|, |R(-k) - conj R(k)|
  double cross_residual = 0;      // max_k |T conj(R_-) + conj(T) R_+|
  double t_consistency = 0;       // max_k |1/T from m_+ - 1/T from m_-|
  double quadrature_residual = 0; // max over resolved k of |quadrature T, R - matched T, R|
  double derivative_bound = 0;    // max_k <k>(|dT| + |dR_+| + |dR_-|)
};

// T and R_+- from the far-end values of the Jost solutions (psi_+ at -L, psi_- at +L); the integral
// formulas 1/T = 1 - (2ik)^{-1} int V m_+ and R_+-/T = (2ik)^{-1} int e^{-+2ikx} V m_-+ are evaluated as a
// cross-check wherever the x-grid resolves e^{2ikx}.
ScatteringData coefficients(const JostField& field, const Potential& V, double tol_gen_rel = 1e-6);

// Genericity class and resonance record only; coefficients() calls this.
void classify(const JostField& field, const Potential& V, ScatteringData& sd, double tol_gen_rel = 1e-6);

struct LowEnergyResiduals {
  double T = 0, Rp = 0, Rm = 0;
  double max() const { return std::max(T, std::max(Rp, Rm)); }
};
// Measured one-sided limits at 0+ against the non-generic limit formulas.
LowEnergyResiduals low_energy_check(const ScatteringData& sd);

// Slope and intercept of T(k)/k on 0 < k < kfit; a nonzero limit marks T ~ alpha k.
cd generic_slope(const ScatteringData& sd, double kfit = 0.1);

}  // namespace resnls
