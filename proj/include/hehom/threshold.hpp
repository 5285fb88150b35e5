#pragma once

#include "hehom/spectral.hpp"

namespace hehom {

struct EffectiveTensors;

struct ConstantsLedger {
  double lambda0 = 0.0, d0 = 0.0, kappa = 0.0, metric_sup = 0.0, inv_omega_sup = 0.0;
  double contour_length = 0.0;
  double c1 = 0.0, c2 = 0.0, c2_check = 0.0, c3 = 0.0, c4 = 0.0, c5 = 0.0, c6 = 0.0;
  double c7 = 0.0, c8 = 0.0, c9 = 0.0, c10 = 0.0, c11 = 0.0;
  // Expanded closed forms of C7 and C11, evaluated independently of the chain above.
  double c7_closed = 0.0, c11_closed = 0.0;
};

ConstantsLedger constants_ledger(double lambda0, double d0, double kappa, double metric_sup, double inv_omega_sup);
ConstantsLedger constants_ledger(const PeriodicCoefficients& coeffs, const ThresholdPoint& tp);
// Throws ConsistencyError if the two evaluations of C7 or C11 disagree beyond 1e-12 relative.
void check_ledger(const ConstantsLedger& ledger);

struct ProjectionData {
  MatC projection;    // F(k)
  MatC eigenvectors;  // columns spanning the range of F(k)
  VecR eigenvalues;
  double distance_to_p = 0.0;  // ‖F(k) - P‖
};

struct BoundSample {
  double dk_norm = 0.0, tau = 0.0, lhs = 0.0, rhs = 0.0;
  double margin() const { return rhs - lhs; }
};

// Fiber expansion, cluster projector and a factorised reduced resolvent around one threshold.
class ThresholdModel {
 public:
  ThresholdModel(const PeriodicCoefficients& coeffs, const PlaneWaveBasis& basis, const ThresholdPoint& tp);

  const PeriodicCoefficients& coeffs() const { return *coeffs_; }
  const PlaneWaveBasis& basis() const { return *basis_; }
  const ThresholdPoint& point() const { return tp_; }
  const FiberExpansion& expansion() const { return ex_; }
  const MatC& p() const { return p_; }

  // Offset from k0, minimum-imaged modulo the dual lattice.
  VecR offset(const VecR& k) const;
  // Spectral projection of 𝒜(k) for eigenvalues within d0/3 of λ0; |k - k0| must not exceed κ.
  ProjectionData spectral_projection(const VecR& k) const;
  // x with (𝒜(k0) - λ0) x = P^⊥ y and x ⊥ 𝔑.
  VecC reduced_resolvent_apply(const VecC& y) const;
  MatC reduced_resolvent_apply(const MatC& y) const;
  // F1^×(δk) and F1 = F1^× + F1^×*.
  MatC f1_cross(const VecR& dk) const;
  MatC f1(const VecR& dk) const;

 private:
  const PeriodicCoefficients* coeffs_;
  const PlaneWaveBasis* basis_;
  ThresholdPoint tp_;
  FiberExpansion ex_;
  MatC p_;
  Eigen::PartialPivLU<MatC> lu_;
};

// Checks ‖(e^{-iτ𝒜(k)} - e^{-iτ𝔊°P}) P‖ <= 3 C7 |δk| + C11 |τ| |δk|³ at k = k0 + δk.
BoundSample verify_exponential_bound(const ThresholdModel& model, const EffectiveTensors& tensors, const VecR& dk,
                                     double tau, const ConstantsLedger& ledger);

// Spectral norm of a matrix.
double spectral_norm(const MatC& m);

}  // namespace hehom
