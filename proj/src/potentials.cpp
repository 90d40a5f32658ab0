#include "resnls/potentials.hpp"

#include <cmath>
#include <sstream>

namespace resnls {

const char* to_string(Parity p) {
  switch (p) {
    case Parity::Even: return "even";
    case Parity::Odd: return "odd";
    default: return "none";
  }
}

namespace {
double sech2(double x) {
  double c = std::cosh(x);
  return 1.0 / (c * c);
}
}  // namespace

double Potential::eval(double x) const {
  if (closed) return closed(x);
  const int m = 8;
  double t = (x - grid.x0) / grid.dx;
  int j0 = static_cast<int>(std::floor(t)) - m / 2 + 1;
  j0 = std::max(0, std::min(grid.n - m, j0));
  double s = 0;
  for (int a = 0; a < m; ++a) {
    double l = 1.0;
    for (int b = 0; b < m; ++b)
      if (b != a) l *= (t - (j0 + b)) / static_cast<double>(a - b);
    s += l * V(j0 + a);
  }
  return s;
}

Potential Potential::resampled(const XGrid& g) const {
  Potential out = *this;
  out.grid = g;
  out.V.resize(g.n);
  for (int j = 0; j < g.n; ++j) {
    double x = g.x(j);
    out.V(j) = (x < grid.x0 || x > grid.x(grid.n - 1)) && !closed ? 0.0 : eval(x);
  }
  return out;
}

ResonanceProfile tanh_profile() {
  ResonanceProfile p;
  p.name = "tanh";
  p.phi = [](double x) { return std::tanh(x); };
  p.phi2 = [](double x) { return -2.0 * sech2(x) * std::tanh(x); };
  p.ratio = [](double x) { return -2.0 * sech2(x); };
  p.parity = Parity::Odd;
  return p;
}

ResonanceProfile sech2_bump_profile(double c) {
  ResonanceProfile p;
  std::ostringstream os;
  os << "1+" << c << "sech2";
  p.name = os.str();
  p.phi = [c](double x) { return 1.0 + c * sech2(x); };
  p.phi2 = [c](double x) {
    double s = sech2(x);
    return c * (4.0 * s - 6.0 * s * s);
  };
  p.ratio = [c](double x) {
    double s = sech2(x);
    return c * (4.0 * s - 6.0 * s * s) / (1.0 + c * s);
  };
  p.parity = Parity::Even;
  return p;
}

ResonanceProfile constant_profile() {
  ResonanceProfile p;
  p.name = "one";
  p.phi = [](double) { return 1.0; };
  p.phi2 = [](double) { return 0.0; };
  p.ratio = [](double) { return 0.0; };
  p.parity = Parity::Even;
  return p;
}

Potential from_samples(const XGrid& g, const ArrayXd& V, double gamma) {
  if (V.size() != g.n) throw std::invalid_argument("from_samples: size mismatch");
  if (!V.allFinite()) throw std::invalid_argument("from_samples: non-finite samples");
  Potential p;
  p.grid = g;
  p.V = V;
  p.gamma = gamma;
  p.even = symmetric_samples(p, 1e-12 * std::max(1.0, V.abs().maxCoeff()));
  return p;
}

Potential free_potential(const XGrid& g) {
  Potential p = from_samples(g, ArrayXd::Zero(g.n), 3.0);
  p.tag = "free";
  p.closed = [](double) { return 0.0; };
  p.discrete_spectrum = false;
  p.resonance_parity = Parity::Even;
  return p;
}

Potential sech2_potential(double c, const XGrid& g) {
  ArrayXd V(g.n);
  for (int j = 0; j < g.n; ++j) V(j) = c * sech2(g.x(j));
  Potential p = from_samples(g, V, 3.0);
  std::ostringstream os;
  os << "sech2(" << c << ")";
  p.tag = os.str();
  p.closed = [c](double x) { return c * sech2(x); };
  p.discrete_spectrum = c < 0;
  return p;
}

Potential poschl_teller(int n, const XGrid& g) {
  if (n < 1) throw std::invalid_argument("poschl_teller: n must be >= 1");
  Potential p = sech2_potential(-static_cast<double>(n) * (n + 1), g);
  p.tag = "pt(" + std::to_string(n) + ")";
  p.discrete_spectrum = true;
  p.resonance_parity = n % 2 ? Parity::Odd : Parity::Even;
  return p;
}

Potential from_resonance(const ResonanceProfile& prof, const XGrid& g) {
  if (!prof.phi || !prof.phi2) throw std::invalid_argument("from_resonance: phi and phi'' required");
  ArrayXd V(g.n);
  int sign_changes = 0;
  double prev = prof.phi(g.x(0));
  for (int j = 0; j < g.n; ++j) {
    double x = g.x(j), ph = prof.phi(x);
    if (j > 0 && ((ph > 0) != (prev > 0)) && ph != 0.0) ++sign_changes;
    if (ph != 0.0) prev = ph;
    if (std::abs(ph) < 1e-8) {
      if (!prof.ratio) throw std::domain_error("from_resonance: phi vanishes at x=" + std::to_string(x) +
                                               " and no closed-form limit of phi''/phi was supplied");
      V(j) = prof.ratio(x);
    } else {
      V(j) = prof.ratio ? prof.ratio(x) : prof.phi2(x) / ph;
    }
  }
  if (prof.parity == Parity::Even && sign_changes > 0)
    throw std::domain_error("from_resonance: even-type phi must not vanish on the grid");
  if (prof.parity == Parity::Odd && sign_changes != 1)
    throw std::domain_error("from_resonance: odd-type phi must vanish only at the origin");
  Potential p = from_samples(g, V, 3.0);
  p.tag = "resonance(" + prof.name + ")";
  if (prof.ratio) {
    p.closed = prof.ratio;
  } else {
    auto phi = prof.phi, phi2 = prof.phi2;
    p.closed = [phi, phi2](double x) { return phi2(x) / phi(x); };
  }
  p.resonance_parity = prof.parity;
  // Sturm: the number of nodes of the zero-energy solution counts the negative eigenvalues.
  p.discrete_spectrum = sign_changes > 0;
  return p;
}

Potential make_potential(const std::string& kind, double param, const XGrid& g) {
  if (kind == "free") return free_potential(g);
  if (kind == "pt") return poschl_teller(static_cast<int>(std::lround(param)), g);
  if (kind == "sech2") return sech2_potential(param, g);
  if (kind == "resonance-tanh") return from_resonance(tanh_profile(), g);
  if (kind == "resonance-bump") return from_resonance(sech2_bump_profile(param), g);
  throw std::invalid_argument("unknown potential kind '" + kind + "'");
}

bool symmetric_samples(const Potential& V, double tol) {
  double worst = 0;
  for (int j = 0; j < V.grid.n; ++j) {
    int m = V.grid.mirror(j);
    if (m >= 0) worst = std::max(worst, std::abs(V.V(j) - V.V(m)));
  }
  return worst < tol;
}

DecayWeights decay_weights(const Potential& V, double s, double tail_tol) {
  if (s < 0) throw std::invalid_argument("decay_weights: s must be >= 0");
  if (s > V.gamma - 1.0) throw std::invalid_argument("decay_weights: need s <= gamma - 1");
  const XGrid& g = V.grid;
  const int n = g.n;
  ArrayXd f(n);
  for (int j = 0; j < n; ++j) f(j) = std::pow(1.0 + g.x(j) * g.x(j), 0.5 * s) * std::abs(V.V(j));
  double total = f.sum() * g.dx;
  // Exponential tail estimate from the outermost unit interval.
  int span = std::max(1, static_cast<int>(std::lround(1.0 / g.dx)));
  auto tail = [&](int end, int inner) {
    if (f(end) <= 0) return 0.0;
    if (f(inner) <= f(end)) return f(end) * g.L();
    double beta = std::log(f(inner) / f(end)) / (span * g.dx);
    return f(end) / beta;
  };
  double tl = tail(0, std::min(n - 1, span)), tr = tail(n - 1, std::max(0, n - 1 - span));
  double scale = std::max(1.0, total);
  if (tl > tail_tol * scale || tr > tail_tol * scale) {
    double worst = std::max(tl, tr);
    double extra = std::max(1.0, std::log(worst / (tail_tol * scale)));
    std::ostringstream os;
    os << "decay_weights: tail mass " << worst << " beyond +-L exceeds tolerance; use L >= "
       << g.L() + 2.0 * extra;
    throw std::runtime_error(os.str());
  }
  DecayWeights w;
  w.s = s;
  w.plus.resize(n);
  w.minus.resize(n);
  w.plus(n - 1) = tr + 0.5 * f(n - 1) * g.dx;
  for (int j = n - 2; j >= 0; --j) w.plus(j) = w.plus(j + 1) + 0.5 * (f(j) + f(j + 1)) * g.dx;
  w.minus(0) = tl + 0.5 * f(0) * g.dx;
  for (int j = 1; j < n; ++j) w.minus(j) = w.minus(j - 1) + 0.5 * (f(j) + f(j - 1)) * g.dx;
  return w;
}

}  // namespace resnls
