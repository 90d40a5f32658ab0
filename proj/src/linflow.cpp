#include "resnls/linflow.hpp"

#include "resnls/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <random>
#include <sstream>

namespace resnls {

namespace {

double jbracket(double x) { return std::sqrt(1.0 + x * x); }

double sup_abs(const ArrayXcd& f) { return f.size() ? f.abs().maxCoeff() : 0.0; }

void finish(EstimateReport& r, const std::vector<double>& times, const std::vector<double>& ratio,
            const std::vector<double>& lhs) {
  r.times = times;
  r.ratios = ratio;
  r.lhs = lhs;
  r.constant = ratio.empty() ? 0.0 : *std::max_element(ratio.begin(), ratio.end());
  if (times.size() >= 2) r.fitted_rate = loglog_slope(times, lhs);
}

}  // namespace

void mark_stability(EstimateReport& r, const EstimateReport& ref, double tol) {
  const double m = std::max(r.constant, ref.constant);
  r.variation = m > 0 ? std::abs(r.constant - ref.constant) / m : 0.0;
  r.stable = std::isfinite(r.constant) && std::isfinite(ref.constant) && r.variation < tol;
}

double mass_radius(const XGrid& xg, const ArrayXcd& f, double tail) {
  const double total = f.abs2().sum();
  if (total == 0) return 0;
  double outside = 0;
  // Shrink a symmetric window from the edges while the excluded mass stays below tail.
  int lo = 0, hi = xg.n - 1;
  while (lo < hi) {
    if (outside + std::norm(f(lo)) + std::norm(f(hi)) > tail * total) break;
    outside += std::norm(f(lo)) + std::norm(f(hi));
    ++lo;
    --hi;
  }
  return std::max(std::abs(xg.x(lo)), std::abs(xg.x(hi)));
}

double effective_kmax(const KGrid& kg, const ArrayXd& wk, const ArrayXcd& g, double tail) {
  const double total = (g.abs2() * wk).sum();
  if (total == 0) return 0;
  double outside = 0;
  int lo = 0, hi = kg.n - 1;
  while (lo < hi) {
    double add = std::norm(g(lo)) * wk(lo) + std::norm(g(hi)) * wk(hi);
    if (outside + add > tail * total) break;
    outside += add;
    ++lo;
    --hi;
  }
  return std::max(std::abs(kg.k(lo)), std::abs(kg.k(hi)));
}

double safe_time(const SpectralTransform& T, const ArrayXcd& f0, double tail) {
  const XGrid& xg = T.xgrid();
  ArrayXcd g = T.forward(f0);
  const double keff = std::max(effective_kmax(T.kgrid(), T.kweights(), g, tail), 1e-12);
  const double room = 0.9 * xg.L() - mass_radius(xg, f0, tail);
  return room > 0 ? room / (2.0 * keff) : 0.0;
}

ArrayXcd propagate_spectral(const SpectralTransform& T, const ArrayXcd& g, double t) {
  const KGrid& kg = T.kgrid();
  ArrayXcd h(kg.n);
  for (int i = 0; i < kg.n; ++i) {
    const double k = kg.k(i);
    h(i) = g(i) * std::polar(1.0, k * k * t);
  }
  return T.inverse(h);
}

ArrayXcd propagate(const SpectralTransform& T, const ArrayXcd& f0, double t, double tol) {
  const double ts = safe_time(T, f0);
  if (t > ts) {
    std::ostringstream os;
    os << "propagate: t=" << t << " exceeds the safe time " << ts << " for this box; enlarge L";
    throw std::runtime_error(os.str());
  }
  ArrayXcd u = propagate_spectral(T, T.forward(f0), t);
  const double bm = boundary_mass(T.xgrid(), u);
  if (bm > tol) {
    std::ostringstream os;
    os << "propagate: boundary mass " << bm << " at t=" << t << "; max safe t is " << ts;
    throw std::runtime_error(os.str());
  }
  return u;
}

EstimateReport decay_constant(const SpectralTransform& T, const std::vector<ArrayXcd>& data,
                              const std::vector<double>& times) {
  EstimateReport r;
  r.id = "pointwise-decay";
  r.samples = static_cast<int>(data.size());
  const KGrid& kg = T.kgrid();
  const ArrayXd& wk = T.kweights();
  std::vector<double> ratio(times.size(), 0.0), lhs(times.size(), 0.0);
  std::mutex mu;
  std::string err;
  parallel_for(static_cast<int>(data.size()), [&](int d) {
    const double tmax = *std::max_element(times.begin(), times.end());
    const double ts = safe_time(T, data[d]);
    if (tmax > ts) {
      std::lock_guard<std::mutex> lk(mu);
      std::ostringstream os;
      os << "decay_constant: sample " << d << " leaves the box after t=" << ts;
      err = os.str();
      return;
    }
    ArrayXcd h = T.forward(data[d]);
    const double hinf = sup_abs(h);
    const double dh = l2_norm_k(kderiv(h, kg.dk), wk);
    for (size_t it = 0; it < times.size(); ++it) {
      const double t = times[it];
      const double l = sup_abs(propagate_spectral(T, h, t));
      const double rhs = hinf / std::sqrt(t) + dh / std::pow(t, 0.75);
      std::lock_guard<std::mutex> lk(mu);
      ratio[it] = std::max(ratio[it], l / rhs);
      lhs[it] = std::max(lhs[it], l);
    }
  });
  if (!err.empty()) throw std::runtime_error(err);
  finish(r, times, ratio, lhs);
  return r;
}

EstimateReport singular_decay_constant(const BasisSplit& s, const std::vector<ArrayXcd>& h,
                                       const std::vector<double>& times) {
  EstimateReport r;
  r.id = "singular-decay";
  r.samples = static_cast<int>(h.size());
  std::vector<double> ratio(times.size(), 0.0), lhs(times.size(), 0.0);
  for (const ArrayXcd& g : h) {
    const double hinf = sup_abs(g);
    const double dh = l2_norm_k(kderiv(g, s.kg.dk), s.wk);
    for (size_t it = 0; it < times.size(); ++it) {
      const double t = times[it];
      ArrayXcd e(s.kg.n);
      for (int i = 0; i < s.kg.n; ++i) e(i) = g(i) * std::polar(1.0, s.kg.k(i) * s.kg.k(i) * t);
      const double l = sup_abs(project(s, e, Part::S));
      ratio[it] = std::max(ratio[it], l / (hinf / std::sqrt(t) + dh / std::pow(t, 0.75)));
      lhs[it] = std::max(lhs[it], l);
    }
  }
  finish(r, times, ratio, lhs);
  return r;
}

EstimateReport improved_local_decay(const SpectralTransform& T, const std::vector<ArrayXcd>& data,
                                    const std::vector<double>& times) {
  EstimateReport r;
  r.id = "improved-local-decay";
  r.samples = static_cast<int>(data.size());
  const XGrid& xg = T.xgrid();
  ArrayXd wx(xg.n);
  for (int j = 0; j < xg.n; ++j) wx(j) = 1.0 / jbracket(xg.x(j));
  std::vector<double> ratio(times.size(), 0.0), lhs(times.size(), 0.0);
  std::mutex mu;
  parallel_for(static_cast<int>(data.size()), [&](int d) {
    const ArrayXcd& f = data[d];
    ArrayXcd h = T.forward(f);
    const double rhs = l2_norm_x(f / wx.cast<cd>(), xg.dx);
    for (size_t it = 0; it < times.size(); ++it) {
      const double t = times[it];
      const double l = (propagate_spectral(T, h, t).abs() * wx).maxCoeff();
      std::lock_guard<std::mutex> lk(mu);
      ratio[it] = std::max(ratio[it], jbracket(t) * l / rhs);
      lhs[it] = std::max(lhs[it], l / rhs);
    }
  });
  finish(r, times, ratio, lhs);
  return r;
}

Kernel plane_wave() {
  return [](double x, double k) { return std::polar(1.0, k * x); };
}

Kernel unit_kernel() {
  return [](double, double) { return cd(1.0, 0.0); };
}

std::vector<TimeHarmonicField> random_time_harmonic(unsigned seed, int count, int terms, double omega_min,
                                                    double omega_max, const ArrayXd& y) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uom(omega_min, omega_max), uc(-3.0, 3.0), uw(0.5, 2.0), ua(-1.0, 1.0);
  std::vector<TimeHarmonicField> out(count);
  const double dy = y.size() > 1 ? y(1) - y(0) : 1.0;
  for (auto& F : out) {
    F.y = y;
    F.dy = dy;
    for (int j = 0; j < terms; ++j) {
      F.omega.push_back(uom(rng));
      const double c = uc(rng), w = uw(rng);
      const cd amp(ua(rng), ua(rng));
      ArrayXcd b(y.size());
      for (int i = 0; i < y.size(); ++i) b(i) = amp * std::exp(-0.5 * std::pow((y(i) - c) / w, 2));
      F.profile.push_back(b);
    }
  }
  return out;
}

namespace {

// int_0^t e^{i d s} ds
cd harmonic_integral(double d, double t) {
  if (std::abs(d * t) < 1e-6) return cd(t, 0.5 * d * t * t);
  return (std::polar(1.0, d * t) - 1.0) / cd(0, d);
}

}  // namespace

EstimateReport smoothing_constant(const Kernel& Q, double beta, const Symbol& phi,
                                  const std::vector<TimeHarmonicField>& F, double t, const KGrid& kg) {
  EstimateReport r;
  r.id = "smoothing";
  r.samples = static_cast<int>(F.size());
  if (F.empty()) return r;
  const ArrayXd wk = k_weights(kg);
  const int nF = static_cast<int>(F.size());
  std::vector<double> lhs2(nF, 0.0);
  std::mutex mu;
  const ArrayXd& y = F[0].y;
  const int ny = static_cast<int>(y.size());
  parallel_for(kg.n, [&](int i) {
    const double k = kg.k(i);
    const cd p = std::conj(phi(k));
    if (p == cd(0)) return;
    ArrayXcd q(ny);
    for (int j = 0; j < ny; ++j) q(j) = std::conj(Q(y(j), k));
    std::vector<double> local(nF);
    for (int f = 0; f < nF; ++f) {
      cd L = 0;
      for (size_t m = 0; m < F[f].omega.size(); ++m) {
        const cd B = (q * F[f].profile[m]).sum() * F[f].dy;
        L += harmonic_integral(F[f].omega[m] - k * k, t) * B;
      }
      local[f] = std::norm(p * L) * wk(i);
    }
    std::lock_guard<std::mutex> lk(mu);
    for (int f = 0; f < nF; ++f) lhs2[f] += local[f];
  });
  double best = 0, best_lhs = 0;
  for (int f = 0; f < nF; ++f) {
    const auto& Ff = F[f];
    const int J = static_cast<int>(Ff.omega.size());
    double rhs = 0;
    for (int j = 0; j < ny; ++j) {
      cd s2 = 0;
      for (int a = 0; a < J; ++a)
        for (int b = 0; b < J; ++b)
          s2 += Ff.profile[a](j) * std::conj(Ff.profile[b](j)) * harmonic_integral(Ff.omega[a] - Ff.omega[b], t);
      rhs += std::pow(jbracket(y(j)), -beta) * std::sqrt(std::max(0.0, s2.real())) * Ff.dy;
    }
    const double l = std::sqrt(lhs2[f]);
    if (rhs > 0 && l / rhs > best) {
      best = l / rhs;
      best_lhs = l;
    }
  }
  finish(r, {t}, {best}, {best_lhs});
  return r;
}

double h1_norm_k(const KGrid& kg, const ArrayXd& wk, const ArrayXcd& h) {
  const double a = l2_norm_k(h, wk), b = l2_norm_k(kderiv(h, kg.dk), wk);
  return std::sqrt(a * a + b * b);
}

namespace {

// v(x_j, t) = sum over the chosen half-line of w_i sym_i Q(x_j,k_i) e^{ik_i^2 t} h_i.
ArrayXcd half_line_integral(const ArrayXXcd& Qm, const ArrayXcd& coef, const KGrid& kg, double t, int side) {
  ArrayXcd e = ArrayXcd::Zero(kg.n);
  for (int i = 0; i < kg.n; ++i)
    if (side * kg.k(i) > 0) e(i) = coef(i) * std::polar(1.0, kg.k(i) * kg.k(i) * t);
  return (Qm.matrix() * e.matrix()).array();
}

}  // namespace

EstimateReport local_decay_constant(const Kernel& Q, double beta, const Symbol& phi, int side, const KGrid& kg,
                                    const std::vector<ArrayXcd>& h, const std::vector<double>& times,
                                    const ArrayXd& x) {
  EstimateReport r;
  r.id = "local-decay";
  r.samples = static_cast<int>(h.size());
  const ArrayXd wk = k_weights(kg);
  const int nx = static_cast<int>(x.size());
  ArrayXXcd Qm(nx, kg.n);
  ArrayXd wx(nx);
  for (int j = 0; j < nx; ++j) {
    wx(j) = std::pow(jbracket(x(j)), beta);
    for (int i = 0; i < kg.n; ++i) Qm(j, i) = Q(x(j), kg.k(i));
  }
  std::vector<double> ratio(times.size(), 0.0), lhs(times.size(), 0.0);
  for (const ArrayXcd& g : h) {
    const double n1 = h1_norm_k(kg, wk, g);
    if (n1 == 0) continue;
    ArrayXcd coef(kg.n);
    for (int i = 0; i < kg.n; ++i) coef(i) = wk(i) * phi(kg.k(i)) * g(i);
    for (size_t it = 0; it < times.size(); ++it) {
      const double l = (half_line_integral(Qm, coef, kg, times[it], side).abs() * wx).maxCoeff() / n1;
      ratio[it] = std::max(ratio[it], jbracket(times[it]) * l);
      lhs[it] = std::max(lhs[it], l);
    }
  }
  finish(r, times, ratio, lhs);
  return r;
}

EstimateReport local_derivative_constant(const Kernel& Q, double beta, int side, const KGrid& kg,
                                         const std::vector<ArrayXcd>& h, const std::vector<double>& times,
                                         const ArrayXd& x) {
  EstimateReport r;
  r.id = "local-derivative";
  r.samples = static_cast<int>(h.size());
  const ArrayXd wk = k_weights(kg);
  const int nx = static_cast<int>(x.size());
  if (nx < 5) throw std::invalid_argument("local_derivative_constant: need at least 5 x points");
  const double dx = x(1) - x(0);
  ArrayXXcd Qm(nx, kg.n);
  ArrayXd wx(nx);
  for (int j = 0; j < nx; ++j) {
    wx(j) = std::pow(jbracket(x(j)), beta - 1.0);
    for (int i = 0; i < kg.n; ++i) Qm(j, i) = std::polar(1.0, kg.k(i) * x(j)) * Q(x(j), kg.k(i));
  }
  std::vector<double> ratio(times.size(), 0.0), lhs(times.size(), 0.0);
  for (const ArrayXcd& g : h) {
    const double n1 = h1_norm_k(kg, wk, g);
    if (n1 == 0) continue;
    ArrayXcd coef = wk.cast<cd>() * g;
    for (size_t it = 0; it < times.size(); ++it) {
      ArrayXcd v = half_line_integral(Qm, coef, kg, times[it], side);
      double s = 0;
      for (int j = 2; j < nx - 2; ++j) {
        const cd d = (-v(j + 2) + 8.0 * v(j + 1) - 8.0 * v(j - 1) + v(j - 2)) / (12.0 * dx);
        s += std::norm(wx(j) * d) * dx;
      }
      const double l = std::sqrt(s) / n1;
      ratio[it] = std::max(ratio[it], std::sqrt(jbracket(times[it])) * l);
      lhs[it] = std::max(lhs[it], l);
    }
  }
  finish(r, times, ratio, lhs);
  return r;
}

}  // namespace resnls
