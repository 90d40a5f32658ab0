#pragma once

#include "resnls/scattering.hpp"

#include <functional>

namespace resnls {

// Generic: only the distorted transform. Even: continuous at 0, distorted transform is active.
// Odd: sharp transform active. Unpaired: non-generic without parity, sharp transform refused.
enum class BasisMode { Generic, Even, Odd, Unpaired };
const char* to_string(BasisMode m);

enum class Transform { Tilde, Sharp, Active };

struct Eigenbasis {
  XGrid xg;
  KGrid kg;
  ArrayXd wk;               // k quadrature weights
  ArrayXXcd K;              // K(x_j, k_i), rows x
  BasisMode mode = BasisMode::Generic;
  double a = 0;
  cd T0p = 0;               // T(0+)
  ArrayXcd K0p, K0m;        // K(x, 0+) and K(x, 0-)
  double sharp_jump = 0;    // max_x |K#(x,0+) - K#(x,0-)|
  double tilde_jump_ratio_err = 0;  // max_x |K(x,0-) - K(x,0+)/a| / max|K(x,0+)|

  double sign(int i, Transform t) const;
  bool sharp_allowed() const { return mode == BasisMode::Odd || mode == BasisMode::Even; }
  Transform resolve(Transform t) const;
};

Eigenbasis build_basis(const JostField& field, const ScatteringData& sd);

// Fraction of |f| carried by the outer 5% of the box on either side.
double boundary_mass(const XGrid& g, const ArrayXcd& f);

ArrayXcd forward(const Eigenbasis& b, const ArrayXcd& f, Transform t = Transform::Active, double tail_tol = 1e-8);
ArrayXcd inverse(const Eigenbasis& b, const ArrayXcd& g, Transform t = Transform::Active);
ArrayXcd apply_symbol(const Eigenbasis& b, const std::function<cd(double)>& m, const ArrayXcd& f,
                      Transform t = Transform::Active);

struct JumpReport {
  cd plus = 0, minus = 0;
  cd ratio = 0;           // g(0-)/g(0+)
  bool defined = false;   // false when |g(0+)| is below the noise floor
};
JumpReport jump_at_zero(const Eigenbasis& b, const ArrayXcd& f, Transform t = Transform::Tilde);

// Edge-of-grid size of a spectral field relative to its maximum.
double spectral_edge(const ArrayXcd& g);

}  // namespace resnls
