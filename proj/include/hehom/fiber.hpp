#pragma once

#include "hehom/coefficients.hpp"

namespace hehom {

struct FiberMatrix {
  VecR k;
  MatC matrix;
};

// Plane-wave matrix of 𝒜(k) = ω⁻¹(D+k)*g(D+k)ω⁻¹, with k reduced to the fundamental domain.
FiberMatrix assemble_fiber(const PeriodicCoefficients& coeffs, const PlaneWaveBasis& basis, const VecR& k);
// Same matrix without reducing k.
MatC fiber_matrix(const PeriodicCoefficients& coeffs, const PlaneWaveBasis& basis, const VecR& k);

// Convolution matrix [f̂(m_i - m_j)] of ω⁻¹ over the basis.
MatC inv_omega_matrix(const PeriodicCoefficients& coeffs, const PlaneWaveBasis& basis);

// Expansion of the fiber around k0:
//   𝒜(k0+δk) = M0 + Σ_r δk_r A_r + Σ_{r,q} δk_r δk_q B_rq
// where A_r = W Σ_s (G_rs D_s + D_s G_sr) W and B_rq = W G_rq W.
class FiberExpansion {
 public:
  FiberExpansion() = default;
  FiberExpansion(const PeriodicCoefficients& coeffs, const PlaneWaveBasis& basis, const VecR& k0,
                 bool with_derivatives = true);

  int dim() const { return d_; }
  Eigen::Index size() const { return m0_.rows(); }
  const VecR& k0() const { return k0_; }
  const MatC& base() const { return m0_; }
  const MatC& linear(int r) const { return a_[static_cast<std::size_t>(r)]; }
  const MatC& quadratic(int r, int q) const { return b_[static_cast<std::size_t>(r * d_ + q)]; }
  const MatC& w() const { return w_; }

  // 𝒜(k0+δk) - shift·I, assembled so that small δk stays accurate relative to shift.
  MatC at(const VecR& dk, double shift = 0.0) const;

 private:
  int d_ = 0;
  VecR k0_;
  MatC w_, m0_;
  std::vector<MatC> a_, b_;
};

}  // namespace hehom
