#include "resnls/eigensplit.hpp"

#include "resnls/numerics.hpp"

#include <cmath>
#include <sstream>

namespace resnls {

const char* to_string(Part p) {
  switch (p) {
    case Part::Zero: return "0";
    case Part::Plus: return "+";
    case Part::Minus: return "-";
    case Part::S: return "S";
    default: return "R";
  }
}

cd BasisSplit::ks(int j, int i) const {
  const double x = xg.x(j), k = kg.k(i);
  const cd e = std::polar(1.0, k * x), ec = std::conj(e);
  return h0(j) * e + chip(j) * (app(i) * e + apm(i) * ec) + chim(j) * (amp(i) * e + amm(i) * ec);
}

BasisSplit split(const Eigenbasis& b, const JostField& field, const ScatteringData& sd, double gamma, double tol) {
  if (b.mode == BasisMode::Unpaired) throw std::domain_error("split: non-generic basis without parity");
  BasisSplit s;
  s.xg = b.xg;
  s.kg = b.kg;
  s.wk = b.wk;
  s.mode = b.mode;
  const int n = s.xg.n, nk = s.kg.n;
  const bool generic = b.mode == BasisMode::Generic;
  s.T0 = generic ? 0.0 : sd.a;
  const double sg = s.sigma(), T0 = s.T0;
  s.chip.resize(n);
  s.chim.resize(n);
  for (int j = 0; j < n; ++j) {
    s.chip(j) = chi_plus(s.xg.x(j));
    s.chim(j) = 1.0 - s.chip(j);
  }
  s.h0 = generic ? ArrayXd::Zero(n) : ArrayXd(T0 * field.m0p);
  const ArrayXd& m0p = field.m0p;
  const ArrayXd& m0m = field.m0m;

  s.app.resize(nk);
  s.apm.resize(nk);
  s.amp.resize(nk);
  s.amm.resize(nk);
  for (int i = 0; i < nk; ++i) {
    const int r = s.kg.mirror(i);
    if (s.kg.k(i) > 0) {
      s.app(i) = sd.T(i) - T0;
      s.apm(i) = 0;
      s.amp(i) = 1.0 - T0 * sd.a;
      s.amm(i) = sd.Rm(i);
    } else if (generic) {
      s.app(i) = 1.0;
      s.apm(i) = sd.Rp(r);
      s.amp(i) = sd.T(r);
      s.amm(i) = 0;
    } else {
      s.app(i) = sg - T0;
      s.apm(i) = sg * sd.Rp(r);
      s.amp(i) = sg * sd.T(r) - 1.0;
      s.amm(i) = 0;
    }
  }

  s.KR.resize(n, nk);
  ArrayXd x = s.xg.points();
  for (int i = 0; i < nk; ++i) {
    const int r = s.kg.mirror(i);
    const double k = s.kg.k(i);
    for (int j = 0; j < n; ++j) {
      const cd e = std::polar(1.0, k * x(j)), ec = std::conj(e);
      cd v;
      if (k > 0) {
        const cd T = sd.T(i);
        if (generic) {
          v = s.chip(j) * T * (field.mp(j, i) - 1.0) * e +
              s.chim(j) * ((field.mm(j, r) - 1.0) * e + sd.Rm(i) * (field.mm(j, i) - 1.0) * ec);
        } else {
          v = s.chip(j) * ((T - T0) * (m0p(j) - 1.0) + T * (field.mp(j, i) - m0p(j))) * e +
              s.chim(j) * ((field.mm(j, r) - m0m(j)) * e + sd.Rm(i) * (field.mm(j, i) - 1.0) * ec);
        }
      } else {
        const cd Tm = sd.T(r);
        if (generic) {
          v = s.chim(j) * Tm * (field.mm(j, r) - 1.0) * e +
              s.chip(j) * ((field.mp(j, i) - 1.0) * e + sd.Rp(r) * (field.mp(j, r) - 1.0) * ec);
        } else {
          v = sg * (s.chim(j) * ((Tm - T0) * (m0m(j) - 1.0) + Tm * (field.mm(j, r) - m0m(j))) * e +
                    s.chip(j) * ((field.mp(j, i) - m0p(j)) * e + sd.Rp(r) * (field.mp(j, r) - 1.0) * ec));
        }
      }
      s.KR(j, i) = v;
    }
  }

  // Diagnostics.
  for (int i = 0; i < nk; ++i) {
    const double sig = s.kg.k(i) > 0 ? 1.0 : (b.mode == BasisMode::Odd ? -1.0 : 1.0);
    for (int j = 0; j < n; ++j)
      s.reassembly_residual =
          std::max(s.reassembly_residual, std::abs(s.ks(j, i) + s.KR(j, i) - kSqrt2Pi * sig * b.K(j, i)));
  }
  if (!generic) {
    s.coeff_at_zero = std::max({std::abs(limit_at_zero(s.kg, s.app, 1)), std::abs(limit_at_zero(s.kg, s.amm, 1)),
                                std::abs(limit_at_zero(s.kg, s.apm, -1)), std::abs(limit_at_zero(s.kg, s.amp, -1)),
                                std::abs(s.amp(s.kg.first_positive())), std::abs(s.app(0))});
  }
  for (const ArrayXcd* c : {&s.app, &s.apm, &s.amp, &s.amm})
    for (int i = 0; i + 1 < nk; ++i) {
      if (i + 1 == s.kg.first_positive()) continue;
      s.lipschitz = std::max(s.lipschitz, std::abs((*c)(i + 1) - (*c)(i)) / s.kg.dk);
    }
  for (int j = 0; j < n; ++j) {
    ArrayXcd row = s.KR.row(j).transpose();
    s.kr_at_zero = std::max({s.kr_at_zero, std::abs(limit_at_zero(s.kg, row, 1)), std::abs(limit_at_zero(s.kg, row, -1))});
    double m = row.abs().maxCoeff(), xb = std::sqrt(1.0 + x(j) * x(j));
    s.kr_weighted = std::max(s.kr_weighted, xb * m);
    s.kr_weighted_gamma = std::max(s.kr_weighted_gamma, std::pow(xb, gamma - 1.0) * m);
  }
  if (s.reassembly_residual > tol) {
    std::ostringstream os;
    os << "split: reassembly residual " << s.reassembly_residual << " above " << tol;
    throw std::runtime_error(os.str());
  }
  return s;
}

ArrayXcd project(const BasisSplit& s, const ArrayXcd& g, Part part) {
  if (g.size() != s.kg.n) throw std::invalid_argument("project: size mismatch");
  const int n = s.xg.n, nk = s.kg.n;
  ArrayXcd out = ArrayXcd::Zero(n);
  if (part == Part::S) {
    out = project(s, g, Part::Zero) + project(s, g, Part::Plus) + project(s, g, Part::Minus);
    return out;
  }
  ArrayXcd gw = g * s.wk / kSqrt2Pi;
  if (part == Part::R) return (s.KR.matrix() * gw.matrix()).array();
  ArrayXcd cp(nk), cm(nk);
  if (part == Part::Zero) {
    cp = gw;
    cm.setZero();
  } else if (part == Part::Plus) {
    cp = s.app * gw;
    cm = s.apm * gw;
  } else {
    cp = s.amp * gw;
    cm = s.amm * gw;
  }
  for (int j = 0; j < n; ++j) {
    const double x = s.xg.x(j);
    cd acc = 0;
    for (int i = 0; i < nk; ++i) {
      const cd e = std::polar(1.0, s.kg.k(i) * x);
      acc += cp(i) * e + cm(i) * std::conj(e);
    }
    const double w = part == Part::Zero ? s.h0(j) : (part == Part::Plus ? s.chip(j) : s.chim(j));
    out(j) = w * acc;
  }
  return out;
}

double TailReport::max() const {
  double m = 0;
  for (const auto& r : sup)
    for (const auto& a : r)
      for (double v : a) m = std::max(m, v);
  return m;
}

TailReport resonance_tail_check(const JostField& field, double a, double gamma) {
  TailReport rep;
  const XGrid& g = field.xg;
  for (int r = 1; r <= 4; ++r)
    for (int side = 0; side < 2; ++side) {
      const double eps = side == 0 ? 1.0 : a;
      const double target = std::pow(eps, r);
      for (int j = 0; j < g.n; ++j) {
        const double x = g.x(j);
        const double chi = side == 0 ? chi_plus(x) : 1.0 - chi_plus(x);
        if (chi <= 0) continue;
        const double m = field.m0p(j), w = std::pow(1.0 + x * x, 0.5 * (gamma - 1.0));
        const double d0 = std::abs(std::pow(m, r) - target);
        const double d1 = std::abs(r * std::pow(m, r - 1) * field.dx_m0p(j));
        rep.sup[r - 1][0][side] = std::max(rep.sup[r - 1][0][side], w * d0);
        rep.sup[r - 1][1][side] = std::max(rep.sup[r - 1][1][side], w * d1);
      }
    }
  return rep;
}

}  // namespace resnls
