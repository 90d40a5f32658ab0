#include "resnls/dft.hpp"

#include "resnls/numerics.hpp"

#include <cmath>
#include <iostream>
#include <sstream>

namespace resnls {

const char* to_string(BasisMode m) {
  switch (m) {
    case BasisMode::Generic: return "generic";
    case BasisMode::Even: return "even";
    case BasisMode::Odd: return "odd";
    default: return "unpaired";
  }
}

double Eigenbasis::sign(int i, Transform t) const {
  return resolve(t) == Transform::Sharp ? kg.sgn(i) : 1.0;
}

Transform Eigenbasis::resolve(Transform t) const {
  if (t == Transform::Active) return mode == BasisMode::Odd ? Transform::Sharp : Transform::Tilde;
  if (t == Transform::Sharp && !sharp_allowed())
    throw std::domain_error(std::string("sharp transform refused for basis mode ") + to_string(mode));
  return t;
}

Eigenbasis build_basis(const JostField& field, const ScatteringData& sd) {
  if (sd.cls == Genericity::Indeterminate) throw std::domain_error("build_basis: genericity is indeterminate");
  Eigenbasis b;
  b.xg = field.xg;
  b.kg = field.kg;
  b.wk = k_weights(b.kg);
  if (sd.cls == Genericity::Generic) b.mode = BasisMode::Generic;
  else if (sd.parity == Parity::Odd) b.mode = BasisMode::Odd;
  else if (sd.parity == Parity::Even) b.mode = BasisMode::Even;
  else b.mode = BasisMode::Unpaired;
  b.a = sd.a;
  const int n = b.xg.n, nk = b.kg.n;
  b.K.resize(n, nk);
  ArrayXd x = b.xg.points();
  for (int i = 0; i < nk; ++i) {
    const double k = b.kg.k(i);
    const int r = b.kg.mirror(i);
    if (k > 0) {
      for (int j = 0; j < n; ++j) b.K(j, i) = sd.T(i) * field.mp(j, i) * std::polar(1.0, k * x(j)) / kSqrt2Pi;
    } else {
      for (int j = 0; j < n; ++j) b.K(j, i) = sd.T(r) * field.mm(j, r) * std::polar(1.0, k * x(j)) / kSqrt2Pi;
    }
  }
  b.T0p = sd.T0p;
  b.K0p = sd.T0p * field.m0p.cast<cd>() / kSqrt2Pi;
  b.K0m = sd.T0p * field.m0m.cast<cd>() / kSqrt2Pi;
  double scale = b.K0p.abs().maxCoeff();
  if (b.sharp_allowed()) b.sharp_jump = (b.K0p + b.K0m).abs().maxCoeff();
  if (sd.cls == Genericity::NonGeneric && std::abs(b.a) > 0 && scale > 0)
    b.tilde_jump_ratio_err = (b.K0m - b.K0p / b.a).abs().maxCoeff() / scale;
  if (b.mode == BasisMode::Odd && b.sharp_jump > 1e-6) {
    std::ostringstream os;
    os << "build_basis: K# discontinuous at k=0, jump " << b.sharp_jump;
    throw std::runtime_error(os.str());
  }
  return b;
}

double boundary_mass(const XGrid& g, const ArrayXcd& f) {
  const int edge = std::max(1, g.n / 40);
  double peak = f.abs().maxCoeff();
  if (peak == 0) return 0;
  double e = std::max(f.head(edge).abs().maxCoeff(), f.tail(edge).abs().maxCoeff());
  return e / peak;
}

ArrayXcd forward(const Eigenbasis& b, const ArrayXcd& f, Transform t, double tail_tol) {
  if (f.size() != b.xg.n) throw std::invalid_argument("forward: field size does not match the x-grid");
  double tail = boundary_mass(b.xg, f);
  if (tail > tail_tol) {
    std::ostringstream os;
    os << "forward: field carries " << tail << " of its peak near +-L; use L >= " << 1.5 * b.xg.L();
    throw std::runtime_error(os.str());
  }
  Transform r = b.resolve(t);
  ArrayXcd g = (b.K.matrix().adjoint() * f.matrix()).array() * b.xg.dx;
  if (r == Transform::Sharp)
    for (int i = 0; i < b.kg.first_positive(); ++i) g(i) = -g(i);
  return g;
}

ArrayXcd inverse(const Eigenbasis& b, const ArrayXcd& g, Transform t) {
  if (g.size() != b.kg.n) throw std::invalid_argument("inverse: field size does not match the k-grid");
  Transform r = b.resolve(t);
  ArrayXcd gw = g * b.wk;
  if (r == Transform::Sharp)
    for (int i = 0; i < b.kg.first_positive(); ++i) gw(i) = -gw(i);
  double edge = spectral_edge(g);
  if (edge > 1e-6)
    std::cerr << "warning: inverse: spectral field is " << edge << " of its peak at the k-grid edge (aliasing)\n";
  return (b.K.matrix() * gw.matrix()).array();
}

ArrayXcd apply_symbol(const Eigenbasis& b, const std::function<cd(double)>& m, const ArrayXcd& f, Transform t) {
  ArrayXcd g = forward(b, f, t);
  for (int i = 0; i < b.kg.n; ++i) g(i) *= m(b.kg.k(i));
  return inverse(b, g, t);
}

JumpReport jump_at_zero(const Eigenbasis& b, const ArrayXcd& f, Transform t) {
  if (b.mode == BasisMode::Generic) throw std::domain_error("jump_at_zero: needs a non-generic basis");
  ArrayXcd g = forward(b, f, t);
  JumpReport r;
  r.plus = limit_at_zero(b.kg, g, 1);
  r.minus = limit_at_zero(b.kg, g, -1);
  double floor = 1e-10 * f.abs().sum() * b.xg.dx;
  r.defined = std::abs(r.plus) > floor;
  if (r.defined) r.ratio = r.minus / r.plus;
  return r;
}

double spectral_edge(const ArrayXcd& g) {
  const int n = static_cast<int>(g.size());
  double peak = g.abs().maxCoeff();
  if (peak == 0) return 0;
  const int edge = std::max(1, n / 50);
  return std::max(g.head(edge).abs().maxCoeff(), g.tail(edge).abs().maxCoeff()) / peak;
}

}  // namespace resnls
