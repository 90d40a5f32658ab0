#include <catch_amalgamated.hpp>

#include "resnls/eigensplit.hpp"
#include "resnls/numerics.hpp"

#include <cmath>

using namespace resnls;

namespace {
struct Built {
  JostField f;
  ScatteringData sd;
  Eigenbasis b;
  BasisSplit s;
};
Built build(const Potential& V, const KGrid& kg) {
  Built o{solve_jost(V, kg), {}, {}, {}};
  o.sd = coefficients(o.f, V);
  o.b = build_basis(o.f, o.sd);
  o.s = split(o.b, o.f, o.sd);
  return o;
}
}  // namespace

TEST_CASE("free split is a pure plane wave") {
  const XGrid xg = XGrid::box(20, 512);
  const Built o = build(free_potential(xg), KGrid::symmetric(6, 128));
  CHECK(o.s.mode == BasisMode::Even);
  CHECK((o.s.h0 - 1.0).abs().maxCoeff() < 1e-12);
  CHECK(o.s.KR.abs().maxCoeff() < 1e-12);
  CHECK(o.s.app.abs().maxCoeff() + o.s.amm.abs().maxCoeff() < 1e-12);
}

TEST_CASE("Poschl-Teller split reassembles and its coefficients vanish at 0") {
  const XGrid xg = XGrid::box(30, 1536);
  const KGrid kg = KGrid::symmetric(12, 768);
  const Built o = build(poschl_teller(1, xg), kg);
  CHECK(o.s.mode == BasisMode::Odd);
  CHECK(o.s.T0 == Catch::Approx(-1.0).margin(1e-8));
  CHECK(o.s.reassembly_residual < 1e-8);
  CHECK(o.s.coeff_at_zero < 1e-4);
  // h0 = T0 m_+(x,0) = -tanh(x).
  for (int j = 0; j < xg.n; j += 17) CHECK(std::abs(o.s.h0(j) + std::tanh(xg.x(j))) < 1e-8);
  // Direct reassembly at one entry against sqrt(2 pi) K#.
  const int i = kg.n / 2 + 5, j = xg.n / 2 + 40;
  const cd full = o.s.ks(j, i) + o.s.KR(j, i);
  CHECK(std::abs(full - kSqrt2Pi * o.b.K(j, i) * o.b.sign(i, Transform::Sharp)) < 1e-8);
}

TEST_CASE("parts of the inverse transform add up") {
  const XGrid xg = XGrid::box(30, 1024);
  const KGrid kg = KGrid::symmetric(10, 512);
  const Built o = build(from_resonance(sech2_bump_profile(0.5), xg), kg);
  const ArrayXcd u = eval_packets(random_packets(3, 3, 6, 2, 1, 2), xg.points());
  const ArrayXcd G = forward(o.b, u);
  const ArrayXcd inv = inverse(o.b, G);
  const ArrayXcd s = project(o.s, G, Part::S), r = project(o.s, G, Part::R);
  CHECK(l2_norm_x(s + r - inv, xg.dx) < 1e-10 * l2_norm_x(inv, xg.dx) + 1e-12);
  // Far to the right chi_- vanishes and h0 -> T0 = 1.
  const int j = xg.index_of(20.0);
  CHECK(std::abs(o.s.h0(j) - 1.0) < 1e-6);
  CHECK(std::abs(project(o.s, G, Part::Minus)(j)) < 1e-12);
}

TEST_CASE("weighted regular part is stable under refinement") {
  const auto kr = [](int nx, int nk) {
    const XGrid xg = XGrid::box(30, nx);
    return build(poschl_teller(1, xg), KGrid::symmetric(12, nk)).s.kr_weighted;
  };
  const double a = kr(768, 384), b = kr(1536, 768);
  CHECK(std::abs(a - b) / std::max(a, b) < 0.2);
}
