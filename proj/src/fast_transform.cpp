#include "resnls/fast_transform.hpp"

#include "resnls/numerics.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>

namespace resnls {

namespace {
thread_local Eigen::FFT<double> tl_fft;

ArrayXcd reversed(const ArrayXcd& a) { return a.reverse(); }
}  // namespace

ArrayXcd FastTransform::dft(const ArrayXcd& f) const {
  const int n = xg_.n;
  std::vector<cd> in(n), out;
  for (int j = 0; j < n; ++j) in[j] = f(j) * post_(j);
  tl_fft.fwd(out, in);
  ArrayXcd g(n);
  for (int i = 0; i < n; ++i) g(i) = xg_.dx * corner_ * pre_(i) * out[i];
  return g;
}

ArrayXcd FastTransform::idft(const ArrayXcd& g) const {
  const int n = xg_.n;
  std::vector<cd> in(n), out;
  for (int i = 0; i < n; ++i) in[i] = std::conj(pre_(i)) * g(i);
  tl_fft.inv(out, in);
  ArrayXcd f(n);
  const cd c = std::conj(corner_) * static_cast<double>(n);
  for (int j = 0; j < n; ++j) f(j) = c * std::conj(post_(j)) * out[j];
  return f;
}

ArrayXcd FastTransform::forward(const ArrayXcd& f) const {
  if (f.size() != xg_.n) throw std::invalid_argument("FastTransform::forward: size mismatch");
  ArrayXcd A = dft(h0_.cast<cd>() * f);
  ArrayXcd B = dft(chip_.cast<cd>() * f);
  ArrayXcd C = dft(chim_.cast<cd>() * f);
  ArrayXcd g = A + app_.conjugate() * B + apm_.conjugate() * reversed(B) + amp_.conjugate() * C +
               amm_.conjugate() * reversed(C);
  if (nw_ > 0) g += (KR_.matrix().adjoint() * f.segment(j0_, nw_).matrix()).array() * xg_.dx;
  return g / kSqrt2Pi;
}

ArrayXcd FastTransform::inverse(const ArrayXcd& g) const {
  if (g.size() != kg_.n) throw std::invalid_argument("FastTransform::inverse: size mismatch");
  ArrayXcd G = g * wk_ / kSqrt2Pi;
  ArrayXcd e0 = idft(G);
  ArrayXcd ep = idft(app_ * G + reversed(apm_ * G));
  ArrayXcd em = idft(amp_ * G + reversed(amm_ * G));
  ArrayXcd f = h0_.cast<cd>() * e0 + chip_.cast<cd>() * ep + chim_.cast<cd>() * em;
  if (nw_ > 0) f.segment(j0_, nw_) += (KR_.matrix() * G.matrix()).array();
  return f;
}

std::shared_ptr<FastTransform> build_fast_transform(const Potential& V, const XGrid& big, double h_max,
                                                    double window_tol) {
  auto ft = std::make_shared<FastTransform>();
  ft->xg_ = big;
  ft->kg_ = fft_kgrid(big);
  ft->wk_ = k_weights(ft->kg_);
  const int n = big.n;
  const double steps = big.L() / big.dx;
  if (std::abs(steps - std::round(steps)) > 1e-9 || big.mirror(0) != -1 || big.mirror(1) != n - 1)
    throw std::invalid_argument("build_fast_transform: grid must be XGrid::box(L, n)");

  // Window half-width: a whole number of cells, at least 4 so that chi_+- transitions fit.
  Potential onbig = V.resampled(big);
  const double l1 = onbig.l1();
  int m = static_cast<int>(std::ceil(4.0 / big.dx));
  if (l1 > 0) {
    DecayWeights w = decay_weights(onbig, 0.0, 1.0);
    while (m < n / 2 - 1) {
      int jr = n / 2 + m, jl = n / 2 - m;
      if (w.plus(jr) + w.minus(jl) < window_tol * l1) break;
      ++m;
    }
  }
  m += static_cast<int>(std::ceil(1.0 / big.dx));
  m = std::min(m, n / 2);
  ft->window_ = m * big.dx;
  ft->j0_ = n / 2 - m;
  ft->nw_ = 2 * m;
  XGrid win = XGrid::box(ft->window_, 2 * m);

  Potential Vw = V.resampled(win);
  JostOptions opt;
  opt.h_max = h_max;
  JostField field = solve_jost(Vw, ft->kg_, opt);
  ft->sd_ = coefficients(field, Vw);
  Eigenbasis b = build_basis(field, ft->sd_);
  if (b.mode == BasisMode::Unpaired) throw std::domain_error("build_fast_transform: non-generic potential without parity");
  BasisSplit s = split(b, field, ft->sd_);
  ft->mode_ = b.mode;
  ft->app_ = s.app;
  ft->apm_ = s.apm;
  ft->amp_ = s.amp;
  ft->amm_ = s.amm;
  ft->KR_ = s.KR;

  ft->h0_.resize(n);
  ft->chip_.resize(n);
  ft->chim_.resize(n);
  const double left = b.mode == BasisMode::Generic ? 0.0 : s.T0 * ft->sd_.a;
  const double right = s.T0;
  for (int j = 0; j < n; ++j) {
    const int jw = j - ft->j0_;
    if (jw < 0) ft->h0_(j) = left;
    else if (jw >= ft->nw_) ft->h0_(j) = right;
    else ft->h0_(j) = s.h0(jw);
    ft->chip_(j) = chi_plus(big.x(j));
    ft->chim_(j) = 1.0 - ft->chip_(j);
  }

  const double k0 = ft->kg_.k(0), x0 = big.x0;
  ft->pre_.resize(n);
  ft->post_.resize(n);
  for (int i = 0; i < n; ++i) {
    ft->pre_(i) = std::polar(1.0, -i * ft->kg_.dk * x0);
    ft->post_(i) = std::polar(1.0, -k0 * i * big.dx);
  }
  ft->corner_ = std::polar(1.0, -k0 * x0);
  return ft;
}

}  // namespace resnls
