#include <catch_amalgamated.hpp>

#include "resnls/asymptotics.hpp"
#include "resnls/numerics.hpp"

#include <cmath>

using namespace resnls;

namespace {

// Profiles f(t, k) = A(k) exp(-i lambda/2 |A|^2 log(t + 1)), with u built from the dispersive formula at
// dyadic and final times (zero elsewhere).
Trajectory synthetic(double T, double dt) {
  Trajectory tr;
  tr.scheme = "distorted";
  tr.sign = -1;
  tr.dt = dt;
  tr.mode = BasisMode::Even;
  tr.xg = XGrid::box(400, 4096);
  tr.kg = KGrid::symmetric(4.0, 512);
  tr.wk = ArrayXd::Constant(tr.kg.n, tr.kg.dk);
  const double lambda = ode_coupling(tr.sign);
  const ArrayXd k = tr.kg.points();
  const ArrayXd A = 0.5 * (-k * k).exp();
  for (const auto& [step, kind] : snapshot_schedule(T, dt, EvolveOptions{})) {
    const double t = step * dt;
    ArrayXcd f(tr.kg.n);
    for (int q = 0; q < tr.kg.n; ++q) f(q) = A(q) * std::polar(1.0, -0.5 * lambda * A(q) * A(q) * std::log(t + 1));
    ArrayXcd u = ArrayXcd::Zero(tr.xg.n);
    if ((kind == 1 || kind == 4) && t > 1) {
      for (int j = 0; j < tr.xg.n; ++j) {
        const double x = tr.xg.x(j), k0 = -x / (2 * t);
        const double a = 0.5 * std::exp(-k0 * k0);
        u(j) = std::polar(1.0, -x * x / (4 * t) - 0.5 * lambda * a * a * std::log(t)) * a / std::sqrt(cd(0, -2 * t));
      }
    }
    tr.t.push_back(t);
    tr.kind.push_back(kind);
    tr.fs.push_back(f);
    tr.u.push_back(u);
    tr.M.push_back(0);
    tr.H.push_back(0);
  }
  return tr;
}

}  // namespace

TEST_CASE("coupling of the asymptotic ODE") {
  CHECK(ode_coupling(-1) == 1.0);
  CHECK(ode_coupling(1) == -1.0);
}

TEST_CASE("exact log-phase profiles have a decaying ODE residual") {
  const Trajectory tr = synthetic(128, 0.01);
  const OdeResidual r = ode_residual(tr);
  REQUIRE(r.t.size() >= 4);
  CHECK(r.exponent < -1.8);
  CHECK(r.r.back() < 1e-4);
}

TEST_CASE("modified profile recovers the amplitude and the phase coefficient") {
  const Trajectory tr = synthetic(128, 0.01);
  const ScatteringAsymptote a = modified_profile(tr, 32.0);
  const ArrayXd k = tr.kg.points();
  const ArrayXcd A = (0.5 * (-k * k).exp()).cast<cd>();
  CHECK(a.modulus_residual < 1e-12);
  CHECK((a.W - A).abs().maxCoeff() < 1e-3);
  REQUIRE(!a.cauchy.empty());
  CHECK(*std::max_element(a.cauchy.begin(), a.cauchy.end()) < 1e-3);
  CHECK(a.gauge_residual < 1e-10);
  CHECK(std::abs(a.c_mean / a.c_model_mean - 1) < 0.05);
}

TEST_CASE("dispersive formula with the log phase fits, without it does not") {
  const Trajectory tr = synthetic(128, 0.01);
  const ArrayXd k = tr.kg.points();
  const ArrayXcd W = (0.5 * (-k * k).exp()).cast<cd>();
  const AsymptoteErrors e = physical_asymptote_check(tr, W);
  REQUIRE(!e.t.empty());
  CHECK(*std::max_element(e.e_log.begin(), e.e_log.end()) < 1e-4);
  CHECK(e.e_plain.back() > 0.05);
}

TEST_CASE("norm series of the synthetic profiles") {
  const Trajectory tr = synthetic(128, 0.01);
  const NormSeries s = norms(tr);
  CHECK(std::abs(s.f_inf.back() - 0.5) < 1e-3);
  CHECK(s.alpha_hat > 0);
  CHECK(s.alpha_hat < 0.5);
}

TEST_CASE("trajectories without profiles are rejected") {
  Trajectory tr = synthetic(4, 0.01);
  tr.fs.clear();
  CHECK_THROWS_AS(ode_residual(tr), std::invalid_argument);
  CHECK_THROWS_AS(modified_profile(tr), std::invalid_argument);
}
