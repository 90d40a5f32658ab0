#include <catch_amalgamated.hpp>

#include "resnls/fast_transform.hpp"
#include "resnls/numerics.hpp"

#include <cmath>

using namespace resnls;

namespace {
DenseTransform dense(const Potential& V, const KGrid& kg) {
  const JostField f = solve_jost(V, kg);
  return DenseTransform(std::make_shared<Eigenbasis>(build_basis(f, coefficients(f, V))));
}
}  // namespace

TEST_CASE("fast transform agrees with the dense transform") {
  const XGrid g = XGrid::box(64, 512);
  const KGrid kg = fft_kgrid(g);
  const ArrayXd x = g.points();
  for (int which = 0; which < 3; ++which) {
    const Potential V = which == 0   ? poschl_teller(1, g)
                        : which == 1 ? from_resonance(sech2_bump_profile(0.5), g)
                                     : free_potential(g);
    const auto ft = build_fast_transform(V, g);
    const DenseTransform dt = dense(V, kg);
    REQUIRE(ft->mode() == dt.mode());
    ArrayXcd u = eval_packets(random_packets(5, 3, 8, 2, 1.5, 3), x);
    if (which == 0) {
      const ArrayXcd p0 = (1.0 / x.cosh() / std::sqrt(2.0)).cast<cd>();
      u -= (p0.conjugate() * u).sum() * g.dx * p0;
    }
    const ArrayXcd G1 = ft->forward(u), G2 = dt.forward(u);
    CHECK((G1 - G2).abs().maxCoeff() < 1e-10 * G2.abs().maxCoeff());
    CHECK((ft->inverse(G2) - dt.inverse(G2)).abs().maxCoeff() < 1e-10);
    CHECK(l2_norm_x(ft->inverse(G1) - u, g.dx) < 1e-8 * l2_norm_x(u, g.dx));
  }
}

TEST_CASE("free fast transform is the unitary flat transform") {
  const XGrid g = XGrid::box(40, 256);
  const auto ft = build_fast_transform(free_potential(g), g);
  const ArrayXd x = g.points();
  const ArrayXcd G = ft->forward((-0.5 * x * x).exp().cast<cd>());
  const ArrayXd k = ft->kgrid().points();
  CHECK((G - (-0.5 * k * k).exp().cast<cd>()).abs().maxCoeff() < 1e-12);
}

TEST_CASE("window covers the potential support") {
  const XGrid g = XGrid::box(128, 1024);
  const auto ft = build_fast_transform(poschl_teller(1, g), g);
  CHECK(ft->window() > 10);
  CHECK(ft->window() < 64);
  CHECK(ft->scattering().cls == Genericity::NonGeneric);
}
