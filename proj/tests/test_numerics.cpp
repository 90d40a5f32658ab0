#include <catch_amalgamated.hpp>

#include "resnls/numerics.hpp"

#include <cmath>

using namespace resnls;
using Catch::Approx;

TEST_CASE("lagrange weights reproduce polynomials and their derivatives") {
  const std::vector<double> nodes{-1.0, -0.3, 0.2, 0.9, 1.7};
  const auto p = [](double x) { return 2 - x + 3 * x * x - 0.5 * x * x * x + 0.25 * x * x * x * x; };
  const auto dp = [](double x) { return -1 + 6 * x - 1.5 * x * x + x * x * x; };
  const double at = 0.37;
  const auto w0 = lagrange_weights(nodes, at, 0);
  const auto w1 = lagrange_weights(nodes, at, 1);
  double v0 = 0, v1 = 0;
  for (size_t i = 0; i < nodes.size(); ++i) {
    v0 += w0[i] * p(nodes[i]);
    v1 += w1[i] * p(nodes[i]);
  }
  CHECK(v0 == Approx(p(at)).epsilon(1e-12));
  CHECK(v1 == Approx(dp(at)).epsilon(1e-11));
}

TEST_CASE("one-sided limits at zero see the jump of a step") {
  const KGrid kg = KGrid::symmetric(2.0, 400);
  ArrayXcd g(kg.n);
  for (int i = 0; i < kg.n; ++i) {
    const double k = kg.k(i);
    g(i) = k > 0 ? cd(1 + k + k * k, 0) : cd(-1 + 2 * k, 0.5);
  }
  CHECK(std::abs(limit_at_zero(kg, g, 1) - cd(1, 0)) < 1e-12);
  CHECK(std::abs(limit_at_zero(kg, g, -1) - cd(-1, 0.5)) < 1e-12);
}

TEST_CASE("log-log slope and linear fit recover exact power laws") {
  std::vector<double> t, y, x, z;
  for (int j = 0; j < 10; ++j) {
    t.push_back(std::pow(2.0, j));
    y.push_back(3.0 * std::pow(t.back(), -0.5));
    x.push_back(j);
    z.push_back(1.5 - 0.25 * j);
  }
  CHECK(loglog_slope(t, y) == Approx(-0.5).epsilon(1e-12));
  const auto [a, b] = linear_fit(x, z);
  CHECK(a == Approx(1.5).epsilon(1e-12));
  CHECK(b == Approx(-0.25).epsilon(1e-12));
}

TEST_CASE("derivatives in k and x") {
  const KGrid kg = KGrid::symmetric(4.0, 800);
  ArrayXcd g(kg.n), dg(kg.n);
  for (int i = 0; i < kg.n; ++i) {
    const double k = kg.k(i);
    g(i) = std::exp(-k * k) * std::polar(1.0, k);
    dg(i) = (cd(-2 * k, 1)) * g(i);
  }
  CHECK((kderiv(g, kg.dk) - dg).abs().maxCoeff() < 1e-6);

  const XGrid xg = XGrid::box(kPi, 64);
  const ArrayXd x = xg.points();
  const ArrayXcd f = (3.0 * x).sin().cast<cd>();
  CHECK((spectral_dx(f, xg.dx) - (3.0 * (3.0 * x).cos()).cast<cd>()).abs().maxCoeff() < 1e-10);
  CHECK((spectral_dxx(f, xg.dx) + 9.0 * f).abs().maxCoeff() < 1e-9);
}

TEST_CASE("quadrature, bump and cutoff") {
  std::vector<double> x, w;
  gauss_legendre(8, x, w);
  double s = 0;
  for (size_t i = 0; i < x.size(); ++i) s += w[i] * std::pow(x[i], 10);
  CHECK(s == Approx(2.0 / 11.0).epsilon(1e-13));
  CHECK(bump(1.0) == 0.0);
  CHECK(chi_plus(-1.0) == Approx(0.0).margin(1e-14));
  CHECK(chi_plus(1.0) == Approx(1.0).epsilon(1e-12));
  CHECK(chi_plus(0.0) == Approx(0.5).epsilon(1e-12));
}

TEST_CASE("grids and weights") {
  const KGrid kg = KGrid::symmetric(3.0, 60);
  CHECK(k_weights(kg).sum() == Approx(6.0).epsilon(1e-12));
  CHECK(kg.k(kg.mirror(7)) == Approx(-kg.k(7)).epsilon(1e-14));
  const XGrid xg = XGrid::box(10, 128);
  const KGrid fk = fft_kgrid(xg);
  CHECK(fk.dk * xg.dx * fk.n == Approx(2 * kPi).epsilon(1e-12));
  CHECK(xg.mirror(xg.index_of(2.5)) == xg.index_of(-2.5));
}

TEST_CASE("random packets are reproducible") {
  const auto a = random_packets(42, 5, 3, 1, 0.5, 2);
  const auto b = random_packets(42, 5, 3, 1, 0.5, 2);
  REQUIRE(a.size() == 5);
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].x0 == b[i].x0);
    CHECK(a[i].width >= 0.5);
    CHECK(a[i].width <= 2.0);
  }
}
