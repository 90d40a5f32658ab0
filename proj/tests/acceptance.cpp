// One PASS/FAIL line per acceptance criterion; nonzero exit when any criterion fails.

#include "pipeline.hpp"

#include "resnls/eigensplit.hpp"
#include "resnls/linflow.hpp"
#include "resnls/numerics.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

using namespace resnls;
using namespace resnls::pipeline;

namespace {

struct Line {
  bool pass = true;
  std::ostringstream detail;

  void note(const std::string& what, double v) { detail << ' ' << what << '=' << v; }
  void need(const std::string& what, bool ok, double v) {
    note(what, v);
    if (!ok) {
      pass = false;
      detail << "(!)";
    }
  }
};

const Check* find(const StageResult& s, const std::string& name) {
  for (const Check& c : s.checks)
    if (c.name == name) return &c;
  return nullptr;
}

// Copies a stage check into the line; a missing or skipped check fails the criterion.
void take(Line& l, const StageResult& s, const std::string& name, const std::string& label = "") {
  const Check* c = find(s, name);
  const std::string tag = label.empty() ? name : label;
  if (!c || !c->evaluated) {
    l.pass = false;
    l.detail << ' ' << tag << "=missing(!)";
    return;
  }
  l.need(tag, c->pass, c->value);
}

void stage_error(Line& l, const StageResult& s) {
  if (!s.error.empty()) {
    l.pass = false;
    l.detail << " error[" << s.stage << "]: " << s.error;
  }
}

int failures = 0;

void report(int n, const std::function<void(Line&)>& body) {
  Line l;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(l);
  } catch (const std::exception& e) {
    l.pass = false;
    l.detail << " exception: " << e.what();
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!l.pass) ++failures;
  std::printf("AC%d %s%s (%.1f s)\n", n, l.pass ? "PASS" : "FAIL", l.detail.str().c_str(), s);
  std::fflush(stdout);
}

RunConfig base() {
  RunConfig c;
  c.out = "";
  return c;
}

RunConfig with_potential(const std::string& p, double param) {
  RunConfig c = base();
  c.potential = p;
  c.param = param;
  return c;
}

}  // namespace

int main() {
  StageResult sc_pt, sc_res;

  report(1, [&](Line& l) {
    const std::pair<const char*, double> pots[3] = {{"free", 0}, {"pt", 1}, {"resonance-bump", 0.5}};
    for (const auto& [p, q] : pots) {
      const StageResult s = run_scatter(with_potential(p, q));
      stage_error(l, s);
      take(l, s, "unitarity", std::string(p) + ".unitarity");
      take(l, s, "symmetry", std::string(p) + ".symmetry");
      l.need(std::string(p) + ".seconds", s.seconds < 30, s.seconds);
      if (std::string(p) == "pt") sc_pt = s;
      if (std::string(p) == "resonance-bump") sc_res = s;
    }
  });

  report(2, [&](Line& l) {
    const json& a = sc_pt.summary;
    const json& b = sc_res.summary;
    if (a.empty() || b.empty()) throw std::runtime_error("scatter summaries unavailable");
    l.need("pt.class_nongeneric", a["class"] == "non-generic", a["class"] == "non-generic");
    l.need("pt.parity_odd", a["parity"] == "odd", a["parity"] == "odd");
    l.need("pt.a+1", std::abs(a["a"].get<double>() + 1) < 1e-6, std::abs(a["a"].get<double>() + 1));
    const double t0 = std::hypot(a["T0_plus"][0].get<double>() + 1, a["T0_plus"][1].get<double>());
    l.need("pt.|T(0)+1|", t0 < 1e-6, t0);
    const double r0 = std::max(a["R_plus0"].get<double>(), a["R_minus0"].get<double>());
    l.need("pt.|R(0)|", r0 < 1e-6, r0);
    take(l, sc_pt, "low_energy_limits", "pt.one_sided_limits");
    l.need("res.class_nongeneric", b["class"] == "non-generic", b["class"] == "non-generic");
    l.need("res.parity_even", b["parity"] == "even", b["parity"] == "even");
    l.need("res.a-1", std::abs(b["a"].get<double>() - 1) < 1e-6, std::abs(b["a"].get<double>() - 1));
    const double t1 = std::hypot(b["T0_plus"][0].get<double>() - 1, b["T0_plus"][1].get<double>());
    l.need("res.|T(0)-1|", t1 < 1e-6, t1);
  });

  report(3, [&](Line& l) {
    for (const auto& [p, q] : {std::pair<const char*, double>{"pt", 1}, {"resonance-bump", 0.5}}) {
      const StageResult s = run_dft_check(with_potential(p, q));
      stage_error(l, s);
      const std::string t = std::string(p) + ".";
      take(l, s, "plancherel", t + "plancherel");
      take(l, s, "intertwining", t + "intertwining");
      take(l, s, "round_trip", t + "round_trip");
      take(l, s, "tilde_jump_ratio", t + "tilde_jump_ratio");
      if (std::string(p) == "pt") take(l, s, "sharp_jump", t + "sharp_jump");
    }
  });

  report(4, [&](Line& l) {
    const auto build = [](const std::string& p, double q, double L, int nx, double kmax, int nk) {
      const XGrid xg = XGrid::box(L, nx);
      const Potential V = make_potential(p, q, xg);
      const JostField f = solve_jost(V, KGrid::symmetric(kmax, nk));
      const ScatteringData sd = coefficients(f, V);
      return split(build_basis(f, sd), f, sd);
    };
    for (const auto& [p, q] : {std::pair<const char*, double>{"pt", 1}, {"resonance-bump", 0.5}}) {
      const std::string t = std::string(p) + ".";
      const BasisSplit a = build(p, q, 30, 1536, 12, 768);
      const BasisSplit b = build(p, q, 30, 3072, 12, 1536);
      l.need(t + "reassembly", a.reassembly_residual < 1e-8, a.reassembly_residual);
      l.need(t + "coeff_at_zero", b.coeff_at_zero < 1e-6, b.coeff_at_zero);
      const double var = std::abs(a.kr_weighted - b.kr_weighted) / std::max(a.kr_weighted, b.kr_weighted);
      l.need(t + "kr_weighted", std::isfinite(b.kr_weighted), b.kr_weighted);
      l.need(t + "kr_refinement_variation", var < 0.2, var);
    }
  });

  StageResult nsd;
  report(5, [&](Line& l) {
    nsd = run_nsd_check(with_potential("pt", 1));
    stage_error(l, nsd);
    take(l, nsd, "decomposition_residual", "pt.residual");
    take(l, nsd, "refinement_improves", "pt.refined_over_base");
    RunConfig f = with_potential("free", 0);
    f.nsd_L = 32;
    const StageResult s = run_nsd_check(f);
    stage_error(l, s);
    take(l, s, "decomposition_residual", "free.residual");
  });

  report(6, [&](Line& l) {
    stage_error(l, nsd);
    take(l, nsd, "inverse_fd");
    take(l, nsd, "commutation_order");
  });

  report(7, [&](Line& l) {
    const StageResult s = run_linear(with_potential("pt", 1));
    stage_error(l, s);
    take(l, s, "decay_constant_positive", "decay_constant");
    take(l, s, "decay_refinement_variation");
    take(l, s, "negative_control_gap");
    l.note("rate_nongeneric", s.summary.value("local_decay_rate", 0.0));
    l.note("rate_generic", s.summary.value("local_decay_rate_generic", 0.0));
  });

  report(8, [&](Line& l) {
    const ArrayXd y = ArrayXd::LinSpaced(241, -12, 12);
    const auto F = random_time_harmonic(base().seed + 4, 10, 3, 0.05, 4.0, y);
    const Symbol phis[3] = {[](double k) { return cd(std::sqrt(std::abs(k)), 0); },
                            [](double k) { return cd(std::abs(k) <= 1 ? k : 0, 0); },
                            [](double k) { return cd(std::abs(k) >= 1 ? 1 : 0, 0); }};
    const char* names[3] = {"sqrt", "low", "high"};
    for (int p = 0; p < 3; ++p) {
      double prev = 0, worst = 0;
      for (double t : {50.0, 100.0, 200.0, 400.0}) {
        const int nk = 2 * static_cast<int>(std::lround(4.0 * t / 0.05 / 2));
        const double c = smoothing_constant(plane_wave(), 0, phis[p], F, t, KGrid::symmetric(4.0, nk)).constant;
        if (!std::isfinite(c) || c <= 0) worst = 1e300;
        if (prev > 0) worst = std::max(worst, std::abs(c - prev) / std::max(c, prev));
        prev = c;
      }
      l.need(std::string(names[p]) + ".max_doubling_variation", worst < 0.2, worst);
    }
  });

  StageResult ev_res, ev_free, as_res, as_free;
  report(9, [&](Line& l) {
    for (int which = 0; which < 2; ++which) {
      RunConfig c = base();
      c.cross_eps = which == 0;
      if (which == 1) c.nl_potential = "free";
      Trajectory tr;
      StageResult e = run_evolve(c, &tr);
      StageResult a = run_asymptotics(c, &tr);
      const std::string t = which == 0 ? "res." : "free.";
      stage_error(l, e);
      stage_error(l, a);
      take(l, e, "completed", t + "completed");
      take(l, e, "mass_drift", t + "mass_drift");
      take(l, e, "energy_drift", t + "energy_drift");
      take(l, a, "sqrt_t_uinf_variation", t + "sqrt_t_uinf_variation");
      take(l, a, "profile_sup_deviation", t + "profile_sup_deviation");
      take(l, a, "alpha_hat", t + "alpha_hat");
      (which == 0 ? ev_res : ev_free) = std::move(e);
      (which == 0 ? as_res : as_free) = std::move(a);
    }
  });

  report(10, [&](Line& l) {
    for (const auto* a : {&as_res, &as_free}) {
      const std::string t = a == &as_res ? "res." : "free.";
      stage_error(l, *a);
      take(l, *a, "ode_exponent", t + "ode_exponent");
      take(l, *a, "rho", t + "rho");
      take(l, *a, "log_phase_gain", t + "log_phase_gain");
      take(l, *a, "log_phase_gain_growth", t + "log_phase_gain_growth");
    }
    take(l, as_res, "phase_eps_squared_scaling", "res.|c_ratio/4-1|");
    l.note("res.c_ratio", as_res.summary.value("c_ratio", 0.0));
  });

  report(11, [&](Line& l) {
    take(l, ev_res, "crossval_order", "res.crossval_order");
    // With V = 0 both schemes reduce to the same flat step; the difference sits at round-off.
    l.note("free.crossval_order(info)", ev_free.summary.value("crossval_order", 0.0));
  });

  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
