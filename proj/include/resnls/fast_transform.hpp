#pragma once

#include "resnls/eigensplit.hpp"

#include <memory>

namespace resnls {

// Active transform (sharp for odd resonances, distorted otherwise) and its inverse.
class SpectralTransform {
 public:
  virtual ~SpectralTransform() = default;
  virtual const XGrid& xgrid() const = 0;
  virtual const KGrid& kgrid() const = 0;
  virtual const ArrayXd& kweights() const = 0;
  virtual BasisMode mode() const = 0;
  virtual ArrayXcd forward(const ArrayXcd& f) const = 0;
  virtual ArrayXcd inverse(const ArrayXcd& g) const = 0;
};

class DenseTransform : public SpectralTransform {
 public:
  explicit DenseTransform(std::shared_ptr<const Eigenbasis> b) : b_(std::move(b)) {}
  const XGrid& xgrid() const override { return b_->xg; }
  const KGrid& kgrid() const override { return b_->kg; }
  const ArrayXd& kweights() const override { return b_->wk; }
  BasisMode mode() const override { return b_->mode; }
  ArrayXcd forward(const ArrayXcd& f) const override { return resnls::forward(*b_, f, Transform::Active, 1.0); }
  ArrayXcd inverse(const ArrayXcd& g) const override { return resnls::inverse(*b_, g, Transform::Active); }
  const Eigenbasis& basis() const { return *b_; }

 private:
  std::shared_ptr<const Eigenbasis> b_;
};

// Plane-wave parts of the split through three shifted FFTs, K_R as a dense block on a window
// |x| <= X around the potential. Needs dk*dx = 2 pi / n.
class FastTransform : public SpectralTransform {
 public:
  const XGrid& xgrid() const override { return xg_; }
  const KGrid& kgrid() const override { return kg_; }
  const ArrayXd& kweights() const override { return wk_; }
  BasisMode mode() const override { return mode_; }
  ArrayXcd forward(const ArrayXcd& f) const override;
  ArrayXcd inverse(const ArrayXcd& g) const override;

  double window() const { return window_; }
  const ScatteringData& scattering() const { return sd_; }
  const ArrayXd& h0() const { return h0_; }

  friend std::shared_ptr<FastTransform> build_fast_transform(const Potential& V, const XGrid& big, double h_max,
                                                             double window_tol);

 private:
  ArrayXcd dft(const ArrayXcd& f) const;    // dx sum_j e^{-i k_i x_j} f_j
  ArrayXcd idft(const ArrayXcd& g) const;   // sum_i e^{i k_i x_j} g_i

  XGrid xg_;
  KGrid kg_;
  ArrayXd wk_;
  BasisMode mode_ = BasisMode::Generic;
  double window_ = 0;
  int j0_ = 0, nw_ = 0;
  ArrayXd h0_, chip_, chim_;
  ArrayXcd app_, apm_, amp_, amm_;
  ArrayXXcd KR_;             // window rows
  ArrayXcd pre_, post_;      // DFT shift factors
  cd corner_ = 1.0;
  ScatteringData sd_;
};

// The potential is solved on the window only; the window ends where the tail of V is below window_tol * |V|_1.
std::shared_ptr<FastTransform> build_fast_transform(const Potential& V, const XGrid& big, double h_max = 0.01,
                                                    double window_tol = 1e-15);

}  // namespace resnls
