#include "resnls/nlsolve.hpp"

#include "resnls/numerics.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

namespace resnls {

int Trajectory::nearest(double time) const {
  int best = -1;
  double d = 1e300;
  for (int i = 0; i < size(); ++i)
    if (std::abs(t[i] - time) < d) {
      d = std::abs(t[i] - time);
      best = i;
    }
  return best;
}

std::pair<double, double> conserved(const XGrid& xg, const ArrayXcd& u, const ArrayXd& V, int sign) {
  const double M = u.abs2().sum() * xg.dx;
  if (M == 0) return {0.0, 0.0};
  ArrayXcd ux = spectral_dx(u, xg.dx);
  const ArrayXd a2 = u.abs2();
  const double H = (0.5 * ux.abs2().sum() + 0.5 * (V * a2).sum() + 0.25 * sign * a2.square().sum()) * xg.dx;
  return {M, H};
}

std::vector<std::pair<long, int>> snapshot_schedule(double T, double dt, const EvolveOptions& opt) {
  if (dt <= 0 || T < 0) throw std::invalid_argument("snapshot_schedule: need dt > 0 and T >= 0");
  const long nsteps = std::lround(T / dt);
  std::map<long, int> s;
  auto add = [&](long step, int kind) {
    if (step < 0 || step > nsteps) return;
    auto it = s.find(step);
    if (it == s.end() || kind < it->second) s[step] = kind;
  };
  for (int j = static_cast<int>(std::floor(4.0 * std::log2(opt.dyadic_min))); ; ++j) {
    const double t = std::pow(2.0, j / 4.0);
    if (t > T + 0.5 * dt) break;
    if (t < opt.dyadic_min) continue;
    const long step = std::lround(t / dt);
    add(step, 1);
    if (t >= 1.0)
      for (int c : {-opt.companion_steps, opt.companion_steps}) add(step + c, 3);
  }
  if (opt.coarse_dt > 0)
    for (double t = opt.coarse_dt; t <= T + 0.5 * dt; t += opt.coarse_dt) add(std::lround(t / dt), 2);
  add(0, 0);
  if (!s.count(nsteps)) s[nsteps] = 4;
  return {s.begin(), s.end()};
}

namespace {

// 1 below a, 0 above b, cos^2 in between.
double cos2_taper(double s, double a, double b) {
  if (s <= a) return 1.0;
  if (s >= b) return 0.0;
  const double c = std::cos(0.5 * kPi * (s - a) / (b - a));
  return c * c;
}

// Shared Strang driver. `linear` applies the exact or split linear step of length dt; `potential` is
// added to the cubic phase in the multiplicative substep (zero for the distorted scheme).
Trajectory run(Trajectory traj, const XGrid& xg, const ArrayXd& V, const ArrayXd& potential, const ArrayXcd& u0,
               int sign, double T, double dt, const EvolveOptions& opt,
               const std::function<void(ArrayXcd&)>& linear, const std::function<ArrayXcd(const ArrayXcd&, double)>& profile) {
  traj.sign = sign;
  traj.dt = dt;
  traj.xg = xg;
  const auto sched = snapshot_schedule(T, dt, opt);
  const double c = opt.cubic ? static_cast<double>(sign) : 0.0;
  auto rotate = [&](ArrayXcd& u, double h) {
    for (int j = 0; j < u.size(); ++j) u(j) *= std::polar(1.0, h * (potential(j) + c * std::norm(u(j))));
  };
  const int esign = opt.cubic ? sign : 0;
  ArrayXcd u = u0;
  auto record = [&](long step, int kind) -> bool {
    const double t = step * dt;
    auto [M, H] = conserved(xg, u, V, esign);
    if (!traj.M.empty()) {
      const double dm = std::abs(M - traj.M[0]) / std::max(traj.M[0], 1e-300);
      const double dh = std::abs(H - traj.H[0]) / std::max(std::abs(traj.H[0]), 1e-300);
      if (!std::isfinite(M) || !std::isfinite(H) || dm > opt.tol_cons || dh > opt.tol_cons) {
        std::ostringstream os;
        os << "conservation drift at t=" << t << ": mass " << dm << ", energy " << dh << " (tol " << opt.tol_cons << ")";
        traj.aborted = true;
        traj.abort_reason = os.str();
        return false;
      }
      traj.mass_drift = std::max(traj.mass_drift, dm);
      traj.energy_drift = std::max(traj.energy_drift, dh);
    }
    const double bm = boundary_mass(xg, u);
    if (bm > opt.boundary_tol) {
      std::ostringstream os;
      os << "boundary mass " << bm << " at t=" << t << " exceeds " << opt.boundary_tol << "; enlarge L";
      traj.aborted = true;
      traj.abort_reason = os.str();
      return false;
    }
    traj.t.push_back(t);
    traj.kind.push_back(kind);
    traj.u.push_back(u);
    if (profile) traj.fs.push_back(profile(u, t));
    traj.M.push_back(M);
    traj.H.push_back(H);
    return true;
  };
  long step = 0;
  for (const auto& [target, kind] : sched) {
    for (; step < target; ++step) {
      rotate(u, 0.5 * dt);
      linear(u);
      rotate(u, 0.5 * dt);
    }
    if (!record(step, kind)) break;
  }
  return traj;
}

}  // namespace

Trajectory evolve(const SpectralTransform& tr, const ArrayXd& V, const ArrayXcd& u0, int sign, double T, double dt,
                  const EvolveOptions& opt) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("evolve: sign must be +1 or -1");
  const XGrid& xg = tr.xgrid();
  if (u0.size() != xg.n || V.size() != xg.n) throw std::invalid_argument("evolve: u0 and V must live on the transform grid");
  const ArrayXcd back = tr.inverse(tr.forward(u0));
  const double n0 = l2_norm_x(u0, xg.dx);
  const double miss = n0 > 0 ? l2_norm_x(back - u0, xg.dx) / n0 : 0.0;
  if (miss > opt.subspace_tol) {
    std::ostringstream os;
    os << "evolve: initial data leaves the continuous spectral subspace (relative defect " << miss
       << "); the potential has bound states or the grid is too coarse";
    throw std::domain_error(os.str());
  }
  const KGrid& kg = tr.kgrid();
  ArrayXcd step_phase(kg.n);
  for (int i = 0; i < kg.n; ++i) {
    const double a = std::abs(kg.k(i)) / kg.kmax();
    step_phase(i) = std::polar(cos2_taper(a, opt.filter_start, opt.filter_end), kg.k(i) * kg.k(i) * dt);
  }
  ArrayXcd mask(xg.n);
  for (int j = 0; j < xg.n; ++j)
    mask(j) = cos2_taper(std::abs(xg.x(j)) / xg.L(), 1.0 - opt.edge_taper, 1.0 + 1e-12);
  Trajectory traj;
  traj.scheme = "distorted";
  traj.mode = tr.mode();
  traj.kg = kg;
  traj.wk = tr.kweights();
  auto linear = [&](ArrayXcd& u) { u = mask * tr.inverse(tr.forward(u) * step_phase); };
  auto profile = [&](const ArrayXcd& u, double t) {
    ArrayXcd g = tr.forward(u);
    for (int i = 0; i < kg.n; ++i) g(i) *= std::polar(1.0, -kg.k(i) * kg.k(i) * t);
    return g;
  };
  return run(std::move(traj), xg, V, ArrayXd::Zero(xg.n), u0, sign, T, dt, opt, linear, profile);
}

Trajectory reference_flat_splitstep(const XGrid& xg, const ArrayXd& V, const ArrayXcd& u0, int sign, double T,
                                    double dt, const EvolveOptions& opt) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("reference_flat_splitstep: sign must be +1 or -1");
  if (u0.size() != xg.n || V.size() != xg.n) throw std::invalid_argument("reference_flat_splitstep: size mismatch");
  const int n = xg.n;
  std::vector<cd> phase(n);
  for (int m = 0; m < n; ++m) {
    const int mm = m <= n / 2 ? m : m - n;
    const double xi = 2.0 * kPi * mm / (n * xg.dx);
    phase[m] = std::polar(1.0, xi * xi * dt);
  }
  Eigen::FFT<double> fft;
  std::vector<cd> a(n), b;
  auto linear = [&](ArrayXcd& u) {
    for (int j = 0; j < n; ++j) a[j] = u(j);
    fft.fwd(b, a);
    for (int m = 0; m < n; ++m) b[m] *= phase[m];
    fft.inv(a, b);
    for (int j = 0; j < n; ++j) u(j) = a[j];
  };
  Trajectory traj;
  traj.scheme = "flat";
  return run(std::move(traj), xg, V, V, u0, sign, T, dt, opt, linear, nullptr);
}

}  // namespace resnls
