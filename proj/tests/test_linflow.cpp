#include <catch_amalgamated.hpp>

#include "resnls/linflow.hpp"
#include "resnls/numerics.hpp"

#include <cmath>

using namespace resnls;

TEST_CASE("free propagation of a Gaussian matches the spreading formula") {
  const XGrid xg = XGrid::box(128, 2048);
  const auto ft = build_fast_transform(free_potential(xg), xg);
  const ArrayXd x = xg.points();
  const ArrayXcd u0 = (-0.5 * x * x).exp().cast<cd>();
  const double t = 5.0;
  const ArrayXcd u = propagate(*ft, u0, t);
  ArrayXcd exact(xg.n);
  const cd d(1.0, -2.0 * t);
  for (int j = 0; j < xg.n; ++j) exact(j) = std::exp(-x(j) * x(j) / (2.0 * d)) / std::sqrt(d);
  CHECK((u - exact).abs().maxCoeff() < 1e-10);
  CHECK(std::abs(l2_norm_x(u, xg.dx) - l2_norm_x(u0, xg.dx)) < 1e-10);
  CHECK_THROWS(propagate(*ft, u0, 10 * safe_time(*ft, u0)));
}

TEST_CASE("decay constant on the Poschl-Teller flow is finite and grid-stable") {
  std::vector<double> times;
  for (int j = 0; j <= 8; ++j) times.push_back(std::pow(50.0, j / 8.0));
  const auto run = [&](double L, int n) {
    const XGrid big = XGrid::box(L, n);
    const auto ft = build_fast_transform(poschl_teller(1, big), big);
    std::vector<ArrayXcd> data;
    for (const auto& p : random_packets(7, 4, 5, 0.3, 3.0, 5.0)) data.push_back(eval_packets({p}, big.points()));
    return decay_constant(*ft, data, times);
  };
  EstimateReport a = run(512, 4096);
  const EstimateReport b = run(1024, 8192);
  CHECK(std::isfinite(a.constant));
  CHECK(a.constant > 0);
  mark_stability(a, b);
  CHECK(a.stable);
}

TEST_CASE("non-generic flow loses the improved local decay") {
  const XGrid big = XGrid::box(512, 4096);
  const auto pt = build_fast_transform(poschl_teller(1, big), big);
  const auto gen = build_fast_transform(sech2_potential(1.0, big), big);
  std::vector<ArrayXcd> data;
  for (const auto& p : random_packets(7, 4, 5, 0.3, 3.0, 5.0)) data.push_back(eval_packets({p}, big.points()));
  std::vector<double> times;
  for (int j = 0; j <= 8; ++j) times.push_back(std::pow(50.0, j / 8.0));
  const double r_pt = improved_local_decay(*pt, data, times).fitted_rate;
  const double r_gen = improved_local_decay(*gen, data, times).fitted_rate;
  CHECK(r_gen < -0.8);
  CHECK(r_pt - r_gen > 0.25);
}

TEST_CASE("smoothing constant vanishes for zero forcing and is horizon-stable") {
  const ArrayXd y = ArrayXd::LinSpaced(121, -12, 12);
  auto F = random_time_harmonic(11, 4, 3, 0.05, 4.0, y);
  const Symbol phi = [](double k) { return cd(std::sqrt(std::abs(k)), 0); };
  const double c1 = smoothing_constant(plane_wave(), 0, phi, F, 25, KGrid::symmetric(4.0, 2000)).constant;
  const double c2 = smoothing_constant(plane_wave(), 0, phi, F, 50, KGrid::symmetric(4.0, 4000)).constant;
  CHECK(c1 > 0);
  CHECK(std::abs(c1 - c2) / std::max(c1, c2) < 0.2);
}

TEST_CASE("local decay with a vanishing symbol decays like 1/t") {
  const KGrid kg = KGrid::symmetric(6, 1024);
  std::vector<ArrayXcd> h;
  for (const auto& p : random_packets(3, 3, 0, 1.0, 0.5, 1.0)) {
    ArrayXcd g(kg.n);
    for (int i = 0; i < kg.n; ++i) {
      const double k = kg.k(i);
      g(i) = cd(p.amp_re, p.amp_im) * std::exp(-0.5 * std::pow((k - p.k0) / p.width, 2)) * std::polar(1.0, p.x0 * k);
    }
    h.push_back(g);
  }
  std::vector<double> times;
  for (int j = 0; j <= 8; ++j) times.push_back(std::pow(100.0, j / 8.0));
  const ArrayXd x = ArrayXd::LinSpaced(201, -50, 50);
  const auto r = local_decay_constant(plane_wave(), -1, [](double k) { return cd(std::abs(k) <= 1 ? k : 0, 0); }, 1,
                                      kg, h, times, x);
  CHECK(std::isfinite(r.constant));
  CHECK(r.fitted_rate < -0.8);
}
