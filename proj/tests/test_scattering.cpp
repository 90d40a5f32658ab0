#include <catch_amalgamated.hpp>

#include "resnls/scattering.hpp"

#include <cmath>

using namespace resnls;

namespace {
struct Case {
  JostField f;
  ScatteringData sd;
};
Case solve(const Potential& V, const KGrid& kg) {
  Case c{solve_jost(V, kg), {}};
  c.sd = coefficients(c.f, V);
  return c;
}
}  // namespace

TEST_CASE("free potential: T = 1, R = 0") {
  const XGrid xg = XGrid::box(20, 512);
  const Case c = solve(free_potential(xg), KGrid::symmetric(8, 128));
  CHECK((c.sd.T - cd(1, 0)).abs().maxCoeff() < 1e-12);
  CHECK(c.sd.Rp.abs().maxCoeff() < 1e-12);
  CHECK(c.sd.unitarity_residual < 1e-10);
  CHECK(c.sd.cls == Genericity::NonGeneric);
  CHECK(c.sd.parity == Parity::Even);
  CHECK(std::abs(c.sd.a - 1.0) < 1e-12);
}

TEST_CASE("Poschl-Teller: reflectionless with T = (k+i)/(k-i), odd resonance") {
  const XGrid xg = XGrid::box(20, 2048);
  const KGrid kg = KGrid::symmetric(4, 512);
  const Case c = solve(poschl_teller(1, xg), kg);
  double err = 0;
  for (int i = 0; i < kg.n; ++i) err = std::max(err, std::abs(c.sd.T(i) - cd(kg.k(i), 1) / cd(kg.k(i), -1)));
  CHECK(err < 1e-9);
  CHECK(c.sd.Rp.abs().maxCoeff() < 1e-9);
  CHECK(c.sd.Rm.abs().maxCoeff() < 1e-9);
  CHECK(c.sd.cls == Genericity::NonGeneric);
  CHECK(c.sd.parity == Parity::Odd);
  CHECK(std::abs(c.sd.a + 1.0) < 1e-8);
  CHECK(c.sd.bound_states == 1);
  CHECK(std::abs(c.sd.T0p + 1.0) < 1e-6);
  CHECK(low_energy_check(c.sd).max() < 1e-6);
}

TEST_CASE("even resonance from a positive profile") {
  const XGrid xg = XGrid::box(30, 2048);
  const Case c = solve(from_resonance(sech2_bump_profile(0.5), xg), KGrid::symmetric(4, 512));
  CHECK(c.sd.cls == Genericity::NonGeneric);
  CHECK(c.sd.parity == Parity::Even);
  CHECK(std::abs(c.sd.a - 1.0) < 1e-8);
  CHECK(std::abs(c.sd.T0p - 1.0) < 1e-6);
  CHECK(c.sd.unitarity_residual < 1e-8);
  CHECK(c.sd.cross_residual < 1e-8);
  CHECK(c.sd.bound_states == 0);
}

TEST_CASE("repulsive barrier is generic with T vanishing linearly") {
  const XGrid xg = XGrid::box(20, 2048);
  const Case c = solve(sech2_potential(1.0, xg), KGrid::symmetric(8, 512));
  CHECK(c.sd.cls == Genericity::Generic);
  CHECK(std::abs(c.sd.T0p) < 1e-6);
  CHECK(std::abs(generic_slope(c.sd).real()) + std::abs(generic_slope(c.sd).imag()) > 0.1);
  CHECK(c.sd.unitarity_residual < 1e-8);
  CHECK(c.sd.symmetry_residual < 1e-8);
}

TEST_CASE("unitarity and cross identities on a non-symmetric potential") {
  const XGrid xg = XGrid::box(20, 2048);
  ArrayXd V(xg.n);
  for (int j = 0; j < xg.n; ++j) {
    const double x = xg.x(j);
    V(j) = std::exp(-(x - 1) * (x - 1)) - 0.7 * std::exp(-2 * (x + 1.5) * (x + 1.5));
  }
  const Case c = solve(from_samples(xg, V, 3.0), KGrid::symmetric(8, 256));
  CHECK(c.sd.unitarity_residual < 1e-8);
  CHECK(c.sd.cross_residual < 1e-8);
  CHECK(c.sd.t_consistency < 1e-8);
  CHECK(c.sd.quadrature_residual < 1e-5);
}
