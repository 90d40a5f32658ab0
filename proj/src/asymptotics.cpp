#include "resnls/asymptotics.hpp"

#include "resnls/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace resnls {

namespace {

void require_profiles(const Trajectory& traj, const char* who) {
  if (traj.fs.size() != traj.t.size() || traj.t.empty())
    throw std::invalid_argument(std::string(who) + ": trajectory carries no spectral profiles");
}

bool in_window(double k, double kmin, double kmax) { return std::abs(k) >= kmin && std::abs(k) <= kmax; }

// Four-point Lagrange interpolation of g on the half-offset grid; zero outside.
cd interpolate(const KGrid& kg, const ArrayXcd& g, double k) {
  const double s = k / kg.dk + kg.n / 2 - 0.5;
  const int i0 = static_cast<int>(std::floor(s)) - 1;
  if (i0 < 0 || i0 + 3 >= kg.n) return 0.0;
  const double u = s - i0;
  cd out = 0;
  for (int a = 0; a < 4; ++a) {
    double w = 1;
    for (int b = 0; b < 4; ++b)
      if (b != a) w *= (u - b) / static_cast<double>(a - b);
    out += w * g(i0 + a);
  }
  return out;
}

std::vector<double> fit_subset(const std::vector<double>& t, const std::vector<double>& y, double lo, double hi,
                               std::vector<double>& ty) {
  std::vector<double> ys;
  ty.clear();
  for (size_t i = 0; i < t.size(); ++i)
    if (t[i] >= lo && t[i] <= hi) {
      ty.push_back(t[i]);
      ys.push_back(y[i]);
    }
  return ys;
}

double slope_on(const std::vector<double>& t, const std::vector<double>& y, double lo, double hi) {
  std::vector<double> tt;
  std::vector<double> yy = fit_subset(t, y, lo, hi, tt);
  return tt.size() >= 2 ? loglog_slope(tt, yy) : 0.0;
}

}  // namespace

NormSeries norms(const Trajectory& traj, double t_fit) {
  require_profiles(traj, "norms");
  NormSeries s;
  s.t_fit = t_fit;
  std::vector<double> uinf;
  for (int i = 0; i < traj.size(); ++i) {
    const ArrayXcd& f = traj.fs[i];
    const ArrayXcd& u = traj.u[i];
    const double t = traj.t[i];
    s.t.push_back(t);
    s.f_inf.push_back(f.abs().maxCoeff());
    s.dkf_l2.push_back(l2_norm_k(kderiv(f, traj.kg.dk), traj.wk));
    const double a = l2_norm_x(u, traj.xg.dx), b = l2_norm_x(spectral_dx(u, traj.xg.dx), traj.xg.dx);
    s.u_h1.push_back(std::sqrt(a * a + b * b));
    uinf.push_back(u.abs().maxCoeff());
    s.sqrt_t_uinf.push_back(std::sqrt(t) * uinf.back());
  }
  const double T = s.t.back();
  s.alpha_hat = slope_on(s.t, s.dkf_l2, t_fit, T);
  s.uinf_exponent = slope_on(s.t, uinf, t_fit, T);
  return s;
}

OdeResidual ode_residual(const Trajectory& traj, double kmin, double kmax, double t_min) {
  require_profiles(traj, "ode_residual");
  OdeResidual out;
  out.t_min = t_min;
  const double lambda = ode_coupling(traj.sign);
  const KGrid& kg = traj.kg;
  const double reach = 50.0 * traj.dt;
  for (int i = 0; i < traj.size(); ++i) {
    if (traj.kind[i] != 1 || traj.t[i] < 1.0) continue;
    const double t = traj.t[i];
    int lo = -1, hi = -1;
    for (int j = 0; j < traj.size(); ++j) {
      if (traj.kind[j] != 3 || std::abs(traj.t[j] - t) > reach) continue;
      if (traj.t[j] < t && (lo < 0 || traj.t[j] > traj.t[lo])) lo = j;
      if (traj.t[j] > t && (hi < 0 || traj.t[j] < traj.t[hi])) hi = j;
    }
    if (lo < 0 || hi < 0) continue;
    const double h = traj.t[hi] - t;
    if (std::abs((t - traj.t[lo]) - h) > 1e-9 * std::max(1.0, t)) continue;
    const ArrayXcd& f0 = traj.fs[i];
    const ArrayXcd& fp = traj.fs[hi];
    const ArrayXcd& fm = traj.fs[lo];
    double r = 0, ri = 0, rhs = 0, err = 0;
    for (int q = 0; q < kg.n; ++q) {
      const double k = kg.k(q);
      if (std::abs(k) > kmax) continue;
      const cd dtf = (fp(q) - fm(q)) / (2.0 * h);
      const cd cubic = lambda / (2.0 * t) * std::norm(f0(q)) * f0(q);
      const double res = std::abs(cd(0, 1) * dtf - cubic);
      if (in_window(k, kmin, kmax)) {
        r = std::max(r, res);
        rhs = std::max(rhs, std::abs(cubic));
        err = std::max(err, std::abs(fp(q) - 2.0 * f0(q) + fm(q)) / (6.0 * h));
      } else {
        ri = std::max(ri, res);
      }
    }
    out.t.push_back(t);
    out.r.push_back(r);
    out.r_inner.push_back(ri);
    out.rhs.push_back(rhs);
    out.inconclusive.push_back(err > r);
  }
  if (!out.t.empty()) out.exponent = slope_on(out.t, out.r, t_min, out.t.back());
  return out;
}

ScatteringAsymptote modified_profile(const Trajectory& traj, double t_min, double kmin, double kmax,
                                     double gauge_t0) {
  require_profiles(traj, "modified_profile");
  ScatteringAsymptote a;
  const int n = traj.size();
  const KGrid& kg = traj.kg;
  const double lambda = ode_coupling(traj.sign);
  ArrayXd phase = ArrayXd::Zero(kg.n), phase0 = ArrayXd::Zero(kg.n);
  ArrayXd prev = traj.fs[0].abs2() / 2.0;
  const int i0 = traj.nearest(gauge_t0);
  std::vector<ArrayXcd> w2(n);
  for (int i = 0; i < n; ++i) {
    if (i > 0) {
      const ArrayXd cur = traj.fs[i].abs2() / (2.0 * (traj.t[i] + 1.0));
      const ArrayXd inc = 0.5 * (prev + cur) * (traj.t[i] - traj.t[i - 1]);
      phase += inc;
      if (i > i0) phase0 += inc;
      prev = cur;
    }
    ArrayXcd w(kg.n);
    for (int q = 0; q < kg.n; ++q) {
      w(q) = traj.fs[i](q) * std::polar(1.0, lambda * phase(q));
      a.modulus_residual = std::max(a.modulus_residual, std::abs(std::abs(w(q)) - std::abs(traj.fs[i](q))));
    }
    a.t.push_back(traj.t[i]);
    a.w.push_back(w);
    if (i >= i0) {
      w2[i].resize(kg.n);
      for (int q = 0; q < kg.n; ++q) w2[i](q) = traj.fs[i](q) * std::polar(1.0, lambda * phase0(q));
    }
  }
  a.W = a.w.back();
  for (int i = i0; i < n; ++i)
    for (int q = 0; q < kg.n; ++q) {
      if (std::abs(w2[n - 1](q)) < 1e-300) continue;
      const cd c = a.W(q) / w2[n - 1](q);
      a.gauge_residual = std::max(a.gauge_residual, std::abs(a.w[i](q) - c * w2[i](q)));
    }

  const double T = traj.t.back();
  auto sup_diff = [&](int i, int j) { return (a.w[i] - a.w[j]).abs().maxCoeff(); };
  for (int i = 0; i < n; ++i) {
    if (traj.kind[i] != 1 || traj.t[i] < 1.0 || 2.0 * traj.t[i] > T + 0.5 * traj.dt) continue;
    const int j = traj.nearest(2.0 * traj.t[i]);
    if (std::abs(traj.t[j] - 2.0 * traj.t[i]) > traj.dt) continue;
    a.cauchy_t.push_back(traj.t[i]);
    a.cauchy.push_back(sup_diff(i, j));
  }
  std::vector<double> ct;
  std::vector<double> cy = fit_subset(a.cauchy_t, a.cauchy, t_min, T / 2.0, ct);
  if (ct.size() >= 2) {
    a.rho = -loglog_slope(ct, cy);
    for (size_t m = 1; m < cy.size(); ++m)
      if (cy[m] > cy[m - 1]) a.rho_lower_bound = true;
  }

  a.c_phase = ArrayXd::Zero(kg.n);
  a.c_model = 0.5 * a.W.abs2();
  const double wmax = a.W.abs().maxCoeff();
  std::vector<int> fit_idx;
  for (int i = 0; i < n; ++i)
    if (traj.kind[i] == 1 && traj.t[i] >= t_min) fit_idx.push_back(i);
  if (fit_idx.size() >= 2) {
    double num = 0, den = 0, num_m = 0;
    for (int q = 0; q < kg.n; ++q) {
      if (!in_window(kg.k(q), kmin, kmax) || std::abs(a.W(q)) < 0.1 * wmax) continue;
      std::vector<double> lt, ph;
      double last = 0;
      for (int i : fit_idx) {
        double p = std::arg(traj.fs[i](q));
        if (!ph.empty()) p = last + std::remainder(p - last, 2.0 * kPi);
        last = p;
        lt.push_back(std::log(traj.t[i]));
        ph.push_back(p);
      }
      const double slope = linear_fit(lt, ph).second;
      a.c_phase(q) = -slope / lambda;
      const double wt = std::norm(a.W(q));
      num += a.c_phase(q) * wt;
      num_m += a.c_model(q) * wt;
      den += wt;
    }
    if (den > 0) {
      a.c_mean = num / den;
      a.c_model_mean = num_m / den;
    }
  }
  return a;
}

AsymptoteErrors physical_asymptote_check(const Trajectory& traj, const ArrayXcd& W, double t_min, double x_inner,
                                         double support_tol) {
  AsymptoteErrors e;
  e.x_inner = x_inner;
  const KGrid& kg = traj.kg;
  const XGrid& xg = traj.xg;
  const double lambda = ode_coupling(traj.sign);
  const double wmax = W.size() ? W.abs().maxCoeff() : 0.0;
  double kw = 0;
  for (int q = 0; q < kg.n; ++q)
    if (std::abs(W(q)) >= support_tol * wmax) kw = std::max(kw, std::abs(kg.k(q)));
  for (int i = 0; i < traj.size(); ++i) {
    if ((traj.kind[i] != 1 && traj.kind[i] != 4) || traj.t[i] < t_min) continue;
    const double t = traj.t[i];
    double xmax = 0.8 * 2.0 * kw * t;
    if (xmax > 0.9 * xg.L()) {
      xmax = 0.9 * xg.L();
      e.window_shrunk = true;
    }
    const cd pref = 1.0 / std::sqrt(cd(0, -2.0 * t));
    double el = 0, ep = 0, ela = 0, epa = 0;
    for (int j = 0; j < xg.n; ++j) {
      const double x = xg.x(j);
      if (std::abs(x) > xmax) continue;
      const double k0 = -x / (2.0 * t);
      cd Wk = interpolate(kg, W, k0);
      if (traj.mode == BasisMode::Odd && k0 < 0) Wk = -Wk;
      const cd plain = pref * std::polar(1.0, -x * x / (4.0 * t)) * Wk;
      const cd withlog = plain * std::polar(1.0, -0.5 * lambda * std::norm(Wk) * std::log(t));
      const double dl = std::abs(traj.u[i](j) - withlog), dp = std::abs(traj.u[i](j) - plain);
      ela = std::max(ela, dl);
      epa = std::max(epa, dp);
      if (std::abs(x) >= x_inner) {
        el = std::max(el, dl);
        ep = std::max(ep, dp);
      }
    }
    const double s = std::sqrt(t);
    e.t.push_back(t);
    e.e_log.push_back(s * el);
    e.e_plain.push_back(s * ep);
    e.e_log_all.push_back(s * ela);
    e.e_plain_all.push_back(s * epa);
  }
  if (e.t.size() >= 2) e.delta_hat = -loglog_slope(e.t, e.e_log);
  return e;
}

}  // namespace resnls
