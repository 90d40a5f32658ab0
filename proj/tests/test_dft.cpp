#include <catch_amalgamated.hpp>

#include "resnls/dft.hpp"
#include "resnls/numerics.hpp"

#include <cmath>

using namespace resnls;

namespace {
Eigenbasis basis(const Potential& V, const KGrid& kg) {
  const JostField f = solve_jost(V, kg);
  return build_basis(f, coefficients(f, V));
}
}  // namespace

TEST_CASE("free transform of a Gaussian is a Gaussian") {
  const XGrid xg = XGrid::box(20, 1024);
  const KGrid kg = KGrid::symmetric(8, 256);
  const Eigenbasis b = basis(free_potential(xg), kg);
  const ArrayXd x = xg.points();
  const ArrayXcd g = forward(b, (-0.5 * x * x).exp().cast<cd>());
  const ArrayXd k = kg.points();
  CHECK((g - (-0.5 * k * k).exp().cast<cd>()).abs().maxCoeff() < 1e-10);
}

TEST_CASE("Poschl-Teller transform: Plancherel on the continuous subspace, inversion, intertwining") {
  const XGrid xg = XGrid::box(30, 1536);
  const KGrid kg = KGrid::symmetric(12, 768);
  const Potential V = poschl_teller(1, xg);
  const Eigenbasis b = basis(V, kg);
  REQUIRE(b.mode == BasisMode::Odd);
  const ArrayXd x = xg.points();
  const ArrayXcd psi0 = (1.0 / x.cosh() / std::sqrt(2.0)).cast<cd>();
  ArrayXcd u = eval_packets(random_packets(3, 3, 5, 2, 1, 2), x);
  u -= (psi0.conjugate() * u).sum() * xg.dx * psi0;
  const ArrayXcd G = forward(b, u);
  const double nu = l2_norm_x(u, xg.dx);
  CHECK(std::abs(l2_norm_k(G, b.wk) - nu) / nu < 1e-6);
  CHECK(l2_norm_x(inverse(b, G) - u, xg.dx) / nu < 1e-5);
  const ArrayXcd Hu = -spectral_dxx(u, xg.dx) + V.V.cast<cd>() * u;
  const ArrayXcd k2 = kg.points().square().cast<cd>();
  CHECK(l2_norm_k(forward(b, Hu) - k2 * G, b.wk) / l2_norm_k(k2 * G, b.wk) < 1e-4);
  // The bound state is invisible to the transform.
  CHECK(l2_norm_k(forward(b, psi0), b.wk) < 1e-6);
}

TEST_CASE("odd resonance: distorted transform flips sign across 0, sharp transform is continuous") {
  const XGrid xg = XGrid::box(30, 1536);
  const KGrid kg = KGrid::symmetric(12, 768);
  const Eigenbasis b = basis(poschl_teller(1, xg), kg);
  const ArrayXcd u = eval_packets(random_packets(7, 2, 3, 1, 1, 2), xg.points());
  const JumpReport jt = jump_at_zero(b, u, Transform::Tilde);
  REQUIRE(jt.defined);
  CHECK(std::abs(jt.ratio + 1.0) < 1e-3);
  const JumpReport js = jump_at_zero(b, u, Transform::Sharp);
  CHECK(std::abs(js.plus - js.minus) < 1e-5);
  CHECK(b.sharp_jump < 1e-8);
}

TEST_CASE("apply_symbol with a constant symbol is the continuous projection") {
  const XGrid xg = XGrid::box(30, 1024);
  const KGrid kg = KGrid::symmetric(10, 512);
  const Eigenbasis b = basis(from_resonance(sech2_bump_profile(0.5), xg), kg);
  REQUIRE(b.mode == BasisMode::Even);
  const ArrayXcd u = eval_packets(random_packets(11, 2, 4, 1, 1, 2), xg.points());
  CHECK(l2_norm_x(apply_symbol(b, [](double) { return cd(1, 0); }, u) - u, xg.dx) < 1e-5 * l2_norm_x(u, xg.dx));
  CHECK_THROWS(forward(b, ArrayXcd::Ones(xg.n)));
}
