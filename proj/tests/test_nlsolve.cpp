#include <catch_amalgamated.hpp>

#include "resnls/nlsolve.hpp"
#include "resnls/nsd.hpp"
#include "resnls/numerics.hpp"

#include <cmath>

using namespace resnls;
using Catch::Approx;

TEST_CASE("mass and energy of a Gaussian") {
  const XGrid xg = XGrid::box(20, 1024);
  const ArrayXd x = xg.points();
  const ArrayXcd u = (-0.5 * x * x).exp().cast<cd>();
  const auto [M, H] = conserved(xg, u, ArrayXd::Zero(xg.n), -1);
  CHECK(M == Approx(std::sqrt(kPi)).epsilon(1e-12));
  CHECK(H == Approx(std::sqrt(kPi) / 4 - std::sqrt(kPi / 2) / 4).epsilon(1e-12));
}

TEST_CASE("snapshot schedule is ordered and ends at T") {
  EvolveOptions opt;
  const auto s = snapshot_schedule(8.0, 0.01, opt);
  REQUIRE(!s.empty());
  CHECK(s.front().first == 0);
  CHECK(s.back().first == 800);
  for (size_t i = 1; i < s.size(); ++i) CHECK(s[i].first > s[i - 1].first);
  bool companion = false;
  for (const auto& [step, kind] : s) companion = companion || kind == 3;
  CHECK(companion);
}

TEST_CASE("linear distorted flow with V = 0 is the free Schrodinger flow") {
  const XGrid xg = XGrid::box(128, 2048);
  const auto ft = build_fast_transform(free_potential(xg), xg);
  const ArrayXd x = xg.points();
  const ArrayXcd u0 = (-0.5 * x * x).exp().cast<cd>();
  EvolveOptions opt;
  opt.cubic = false;
  const double T = 2.0;
  const Trajectory tr = evolve(*ft, ArrayXd::Zero(xg.n), u0, -1, T, 0.01, opt);
  REQUIRE(!tr.aborted);
  const cd d(1.0, -2.0 * T);
  double err = 0;
  for (int j = 0; j < xg.n; ++j)
    err = std::max(err, std::abs(tr.u.back()(j) - std::exp(-x(j) * x(j) / (2.0 * d)) / std::sqrt(d)));
  CHECK(err < 1e-10);
}

TEST_CASE("profile obeys the Duhamel equation d_t f = i sign N(f, f, f)") {
  const XGrid xg = XGrid::box(256, 2048);
  const auto ft = build_fast_transform(from_resonance(sech2_bump_profile(0.5), xg), xg);
  const KGrid& kg = ft->kgrid();
  ArrayXcd g0(kg.n);
  for (int i = 0; i < kg.n; ++i) g0(i) = 0.8 * std::exp(-2.0 * kg.k(i) * kg.k(i));
  const ArrayXd V = from_resonance(sech2_bump_profile(0.5), xg).V;
  const int sign = -1;
  const Trajectory tr = evolve(*ft, V, ft->inverse(g0), sign, 2.0, 0.002);
  REQUIRE(!tr.aborted);
  const int i0 = tr.nearest(1.0);
  REQUIRE(tr.kind[i0] == 1);
  int lo = -1, hi = -1;
  for (int j = 0; j < tr.size(); ++j) {
    if (tr.kind[j] != 3 || std::abs(tr.t[j] - 1.0) > 0.05) continue;
    (tr.t[j] < 1.0 ? lo : hi) = j;
  }
  REQUIRE(lo >= 0);
  REQUIRE(hi >= 0);
  const ArrayXcd dtf = (tr.fs[hi] - tr.fs[lo]) / (tr.t[hi] - tr.t[lo]);
  const ArrayXcd rhs = cd(0, sign) * apply_nsd(*ft, tr.fs[i0], tr.fs[i0], tr.fs[i0], tr.t[i0]);
  CHECK(l2_norm_k(dtf - rhs, tr.wk) < 2e-3 * l2_norm_k(rhs, tr.wk));
}

TEST_CASE("distorted and flat schemes agree to second order in dt") {
  const XGrid xg = XGrid::box(256, 2048);
  const Potential V = from_resonance(sech2_bump_profile(0.5), xg);
  const auto ft = build_fast_transform(V, xg);
  const KGrid& kg = ft->kgrid();
  ArrayXcd g0(kg.n);
  for (int i = 0; i < kg.n; ++i) g0(i) = 0.8 * std::exp(-2.0 * kg.k(i) * kg.k(i));
  const ArrayXcd u0 = ft->inverse(g0);
  EvolveOptions o;
  o.coarse_dt = 0;
  o.dyadic_min = 1e9;
  o.tol_cons = 1;
  std::vector<double> diff;
  for (double h : {0.1, 0.05, 0.025}) {
    const Trajectory a = evolve(*ft, V.V, u0, -1, 2.0, h, o);
    const Trajectory b = reference_flat_splitstep(xg, V.V, u0, -1, 2.0, h, o);
    diff.push_back(l2_norm_x(a.u.back() - b.u.back(), xg.dx));
  }
  CHECK(std::log2(diff[1] / diff[2]) > 1.8);
  CHECK(std::log2(diff[0] / diff[1]) > 1.8);
}

TEST_CASE("data outside the continuous subspace is refused") {
  const XGrid xg = XGrid::box(32, 512);
  const auto ft = build_fast_transform(poschl_teller(1, xg), xg);
  const ArrayXd x = xg.points();
  const ArrayXcd bound = (1.0 / x.cosh()).cast<cd>();
  CHECK_THROWS_AS(evolve(*ft, poschl_teller(1, xg).V, bound, -1, 1.0, 0.01), std::domain_error);
}
