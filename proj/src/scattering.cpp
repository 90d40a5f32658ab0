#include "resnls/scattering.hpp"

#include "resnls/numerics.hpp"

#include <cmath>
#include <sstream>

namespace resnls {

const char* to_string(Genericity g) {
  switch (g) {
    case Genericity::Generic: return "generic";
    case Genericity::NonGeneric: return "non-generic";
    default: return "indeterminate";
  }
}

void classify(const JostField& field, const Potential& V, ScatteringData& sd, double tol_gen_rel) {
  const XGrid& g = field.xg;
  sd.Ip = (V.V * field.m0p).sum() * g.dx;
  sd.Im = (V.V * field.m0m).sum() * g.dx;
  sd.tol_gen = tol_gen_rel * V.l1();
  double I = std::max(std::abs(sd.Ip), std::abs(sd.Im));
  if (I <= sd.tol_gen)
    sd.cls = Genericity::NonGeneric;
  else if (I < 10.0 * sd.tol_gen)
    sd.cls = Genericity::Indeterminate;
  else
    sd.cls = Genericity::Generic;

  sd.bound_states = 0;
  for (int j = 1; j < g.n; ++j)
    if ((field.m0p(j) > 0) != (field.m0p(j - 1) > 0) && field.m0p(j) != 0.0) ++sd.bound_states;

  sd.phi.resize(0);
  sd.parity = Parity::None;
  sd.a = 0;
  if (sd.cls != Genericity::NonGeneric) {
    sd.T0 = 0;
    sd.Rp0 = sd.Rm0 = -1;
    return;
  }
  sd.phi = field.m0p;
  sd.a = field.m0p(0);
  sd.a_tail = std::abs(field.dx_m0p(0)) * g.L();
  double scale = sd.phi.abs().maxCoeff(), even = 0, odd = 0;
  bool paired = false;
  for (int j = 0; j < g.n; ++j) {
    int m = g.mirror(j);
    if (m < 0) continue;
    paired = true;
    even = std::max(even, std::abs(sd.phi(m) - sd.phi(j)));
    odd = std::max(odd, std::abs(sd.phi(m) + sd.phi(j)));
  }
  const double tol = 1e-6 * scale;
  if (paired && even < tol) sd.parity = Parity::Even;
  else if (paired && odd < tol) sd.parity = Parity::Odd;
  double a2 = sd.a * sd.a;
  sd.T0 = 2.0 * sd.a / (1.0 + a2);
  sd.Rp0 = (1.0 - a2) / (1.0 + a2);
  sd.Rm0 = (a2 - 1.0) / (1.0 + a2);
}

ScatteringData coefficients(const JostField& field, const Potential& V, double tol_gen_rel) {
  ScatteringData sd;
  const XGrid& g = field.xg;
  const KGrid& kg = field.kg;
  const int nk = kg.n;
  sd.kg = kg;
  sd.T.resize(nk);
  sd.Rp.resize(nk);
  sd.Rm.resize(nk);
  ArrayXd x = g.points();
  const double xl = g.x0, xr = g.x0 + g.n * g.dx;
  const double kres = kPi / (4.0 * g.dx);
  double worst_inv = 1e300;
  int worst_i = -1;
  for (int i = 0; i < nk; ++i) {
    const double k = kg.k(i);
    const cd c = 1.0 / cd(0, 2.0 * k);
    const cd mp = field.end_m(i), dmp = field.end_dm(i), mm = field.end_m(nk + i), dmm = field.end_dm(nk + i);
    const cd invT = mp + c * dmp;
    const cd invTm = mm - c * dmm;
    sd.t_consistency = std::max(sd.t_consistency, std::abs(invT - invTm));
    if (std::abs(invT) < worst_inv) {
      worst_inv = std::abs(invT);
      worst_i = i;
    }
    sd.T(i) = 1.0 / invT;
    sd.Rm(i) = -sd.T(i) * c * std::polar(1.0, 2.0 * k * xl) * dmp;
    sd.Rp(i) = sd.T(i) * c * std::polar(1.0, -2.0 * k * xr) * dmm;
    if (std::abs(k) > kres) continue;
    cd ip = 0, rp = 0, rm = 0;
    for (int j = 0; j < g.n; ++j) {
      const double v = V.V(j);
      if (v == 0.0) continue;
      const cd e = std::polar(1.0, 2.0 * k * x(j));
      ip += v * field.mp(j, i);
      rm += e * v * field.mp(j, i);
      rp += std::conj(e) * v * field.mm(j, i);
    }
    const cd Tq = 1.0 / (1.0 - c * ip * g.dx);
    sd.quadrature_residual = std::max({sd.quadrature_residual, std::abs(Tq - sd.T(i)),
                                       std::abs(Tq * c * rp * g.dx - sd.Rp(i)), std::abs(Tq * c * rm * g.dx - sd.Rm(i))});
  }
  if (worst_inv < 1e-8) {
    std::ostringstream os;
    os << "coefficients: |1/T| = " << worst_inv << " at k=" << kg.k(worst_i) << ", Jost data corrupted";
    throw std::runtime_error(os.str());
  }
  sd.dT = kderiv(sd.T, kg.dk);
  sd.dRp = kderiv(sd.Rp, kg.dk);
  sd.dRm = kderiv(sd.Rm, kg.dk);
  sd.T0p = limit_at_zero(kg, sd.T, 1);
  sd.T0m = limit_at_zero(kg, sd.T, -1);
  sd.Rp0p = limit_at_zero(kg, sd.Rp, 1);
  sd.Rp0m = limit_at_zero(kg, sd.Rp, -1);
  sd.Rm0p = limit_at_zero(kg, sd.Rm, 1);
  sd.Rm0m = limit_at_zero(kg, sd.Rm, -1);

  for (int i = 0; i < nk; ++i) {
    const int r = kg.mirror(i);
    double t2 = std::norm(sd.T(i));
    sd.unitarity_residual = std::max(
        sd.unitarity_residual, std::max(std::abs(t2 + std::norm(sd.Rp(i)) - 1.0), std::abs(t2 + std::norm(sd.Rm(i)) - 1.0)));
    sd.symmetry_residual = std::max({sd.symmetry_residual, std::abs(sd.T(r) - std::conj(sd.T(i))),
                                     std::abs(sd.Rp(r) - std::conj(sd.Rp(i))), std::abs(sd.Rm(r) - std::conj(sd.Rm(i)))});
    sd.cross_residual =
        std::max(sd.cross_residual, std::abs(sd.T(i) * std::conj(sd.Rm(i)) + std::conj(sd.T(i)) * sd.Rp(i)));
    double kb = std::sqrt(1.0 + kg.k(i) * kg.k(i));
    sd.derivative_bound =
        std::max(sd.derivative_bound, kb * (std::abs(sd.dT(i)) + std::abs(sd.dRp(i)) + std::abs(sd.dRm(i))));
  }
  classify(field, V, sd, tol_gen_rel);
  return sd;
}

LowEnergyResiduals low_energy_check(const ScatteringData& sd) {
  LowEnergyResiduals r;
  r.T = std::abs(sd.T0p - sd.T0);
  r.Rp = std::abs(sd.Rp0p - sd.Rp0);
  r.Rm = std::abs(sd.Rm0p - sd.Rm0);
  return r;
}

cd generic_slope(const ScatteringData& sd, double kfit) {
  const KGrid& kg = sd.kg;
  ArrayXcd q(kg.n);
  for (int i = 0; i < kg.n; ++i) q(i) = sd.T(i) / kg.k(i);
  int used = 0;
  for (int i = kg.first_positive(); i < kg.n && kg.k(i) < kfit; ++i) ++used;
  return limit_at_zero(kg, q, 1, std::max(2, std::min(5, used)));
}

}  // namespace resnls
