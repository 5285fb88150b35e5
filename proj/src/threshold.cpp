#include "hehom/threshold.hpp"

#include <cmath>

#include "hehom/effective.hpp"

namespace hehom {

double spectral_norm(const MatC& m) {
  if (m.size() == 0) return 0.0;
  // ‖M‖² is the top eigenvalue of the smaller Gram matrix.
  MatC g = m.rows() >= m.cols() ? MatC(m.adjoint() * m) : MatC(m * m.adjoint());
  g = 0.5 * (g + g.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<MatC> es(g, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

ConstantsLedger constants_ledger(double lambda0, double d0, double kappa, double metric_sup, double inv_omega_sup) {
  if (!(d0 > 0.0)) throw InvalidInput("gap must be positive");
  if (kappa < 0.0 || metric_sup <= 0.0 || inv_omega_sup <= 0.0) throw InvalidInput("ledger inputs must be positive");
  ConstantsLedger c;
  const double lam = lambda0, k = kappa;
  c.lambda0 = lam;
  c.d0 = d0;
  c.kappa = k;
  c.metric_sup = metric_sup;
  c.inv_omega_sup = inv_omega_sup;
  const double l = (kPi + 4.0) * d0 / 3.0;
  c.contour_length = l;
  const double root_g = std::sqrt(metric_sup);
  const double c1 = 6.0 * root_g * inv_omega_sup / d0;
  const double c2 = std::sqrt(24.0 / d0 + 36.0 * lam / (d0 * d0));
  const double c2c = c2 + 6.0 * root_g * inv_omega_sup * k / d0;
  const double c3 = 4.0 + 6.0 * lam / d0;
  const double c4 = root_g * inv_omega_sup;
  c.c1 = c1;
  c.c2 = c2;
  c.c2_check = c2c;
  c.c3 = c3;
  c.c4 = c4;
  c.c5 = 2 * c1 * c2 * c2c * c4 + c1 * c1 * c3 + 2 * c1 * c1 * c2 * c4 * k + c1 * c2 * c2 * c4 + c1 * c1;
  c.c6 = 3 * c1 * c1 * c2 * c4 + 3 * c1 * c2 * c2 * c2c * c4 * c4 + 3 * c1 * c1 * c2 * c3 * c4 +
         3 * c1 * c1 * c2 * c2 * c4 * c4 * k + c1 * c1 * c2c * c3 * c4 + c1 * c1 * c1 * c3 * c4 * k +
         c1 * c2 * c2 * c2 * c4 * c4 + c1 * c1 * c2c * c4 + c1 * c1 * c1 * c4 * k;
  const double inv2pi = 1.0 / (2.0 * kPi);
  c.c7 = inv2pi * l * (c1 * c2 + c1 * c2c + c1 * c1 * k);
  c.c8 = inv2pi * l * c.c5;
  c.c9 = l * l * c1 * c2 * c.c5 / (2.0 * kPi * kPi);
  c.c10 = inv2pi * (lam + d0 / 2.0) * l * (3 * c1 * c2 * c2 * c4 + c1 * c1 * c3 + c1 * c1);
  c.c11 = lam * c.c9 + c.c7 * c.c10 + inv2pi * (lam + d0 / 2.0) * l * c.c6;

  // Expanded statement of the exponential estimate.
  {
    const double A = c1, B = c2, Bc = c2c, C = c3, D = c4;
    c.c7_closed = l / (2.0 * kPi) * (A * B + A * Bc + A * A * k);
    c.c11_closed =
        0.5 / (kPi * kPi) * lam * l * l * A * B *
            (2 * A * B * Bc * D + A * A * C + 2 * A * A * B * D * k + A * B * B * D + A * A) +
        std::pow(2.0 * kPi, -2.0) * (lam + d0 / 2.0) * l * l * (A * B + A * Bc + A * A * k) *
            (3 * A * B * B * D + A * A * C + A * A) +
        (lam + d0 / 2.0) * l / (2.0 * kPi) *
            (3 * A * A * B * D + 3 * A * B * B * Bc * D * D + 3 * A * A * B * C * D + 3 * A * A * B * B * D * D * k +
             A * A * Bc * C * D + A * A * A * C * D * k + A * B * B * B * D * D + A * A * Bc * D + A * A * A * D * k);
  }
  return c;
}

ConstantsLedger constants_ledger(const PeriodicCoefficients& coeffs, const ThresholdPoint& tp) {
  return constants_ledger(tp.lambda0, tp.d0, tp.kappa, coeffs.metric_sup(), coeffs.inv_omega_sup());
}

void check_ledger(const ConstantsLedger& c) {
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(a), 1e-300); };
  if (rel(c.c7, c.c7_closed) > 1e-12 || rel(c.c11, c.c11_closed) > 1e-12)
    throw ConsistencyError("constants ledger disagrees with the closed-form estimate");
}

ThresholdModel::ThresholdModel(const PeriodicCoefficients& coeffs, const PlaneWaveBasis& basis, const ThresholdPoint& tp)
    : coeffs_(&coeffs), basis_(&basis), tp_(tp), ex_(coeffs, basis, tp.k0) {
  if (tp.cluster.rows() != static_cast<Eigen::Index>(basis.size()) || tp.cluster.cols() != tp.n)
    throw InvalidInput("threshold point does not match the basis");
  p_ = tp.cluster * tp.cluster.adjoint();
  MatC shifted = ex_.at(VecR::Zero(ex_.dim()), tp.lambda0) + tp.d0 * p_;
  lu_.compute(shifted);
}

VecR ThresholdModel::offset(const VecR& k) const { return basis_->lattice().minimum_image(k - tp_.k0); }

ProjectionData ThresholdModel::spectral_projection(const VecR& k) const {
  VecR dk = offset(k);
  if (dk.norm() > tp_.kappa * (1.0 + 1e-9)) throw InvalidInput("quasimomentum lies outside the certified ball");
  EigenPairs e = eig_hermitian(ex_.at(dk, tp_.lambda0));
  std::vector<Eigen::Index> sel;
  for (Eigen::Index i = 0; i < e.values.size(); ++i)
    if (std::abs(e.values(i)) <= tp_.d0 / 3.0) sel.push_back(i);
  if (static_cast<int>(sel.size()) != tp_.n) throw CertificationError("cluster size changed inside the certified ball");
  ProjectionData out;
  out.eigenvectors.resize(e.vectors.rows(), tp_.n);
  out.eigenvalues.resize(tp_.n);
  for (int j = 0; j < tp_.n; ++j) {
    out.eigenvectors.col(j) = e.vectors.col(sel[static_cast<std::size_t>(j)]);
    out.eigenvalues(j) = e.values(sel[static_cast<std::size_t>(j)]) + tp_.lambda0;
  }
  out.projection = out.eigenvectors * out.eigenvectors.adjoint();
  out.distance_to_p = spectral_norm(out.projection - p_);
  return out;
}

MatC ThresholdModel::reduced_resolvent_apply(const MatC& y) const {
  if (y.rows() != ex_.size()) throw InvalidInput("vector does not match the basis");
  MatC rhs = y - p_ * y;
  const MatC shifted = ex_.at(VecR::Zero(ex_.dim()), tp_.lambda0);
  MatC x = lu_.solve(rhs);
  x -= p_ * x;
  // One refinement sweep; small gaps make the factorisation lose digits.
  MatC res = shifted * x - rhs;
  x -= lu_.solve(MatC(res));
  x -= p_ * x;
  res = shifted * x - rhs;
  for (Eigen::Index j = 0; j < y.cols(); ++j)
    if (res.col(j).norm() > 1e-10 * y.col(j).norm()) throw NumericalError("reduced resolvent residual exceeds tolerance");
  return x;
}

VecC ThresholdModel::reduced_resolvent_apply(const VecC& y) const {
  return reduced_resolvent_apply(MatC(y)).col(0);
}

MatC ThresholdModel::f1_cross(const VecR& dk) const {
  MatC l = MatC::Zero(ex_.size(), ex_.size());
  for (int r = 0; r < ex_.dim(); ++r) l += dk(r) * ex_.linear(r);
  MatC x = reduced_resolvent_apply(MatC(l * tp_.cluster));
  return -tp_.cluster * x.adjoint();
}

MatC ThresholdModel::f1(const VecR& dk) const {
  MatC c = f1_cross(dk);
  return c + c.adjoint();
}

BoundSample verify_exponential_bound(const ThresholdModel& model, const EffectiveTensors& tensors, const VecR& dk,
                                     double tau, const ConstantsLedger& ledger) {
  const ThresholdPoint& tp = model.point();
  if (tensors.n != tp.n || (tensors.cluster - tp.cluster).norm() > 1e-10)
    throw InvalidInput("tensors were computed in a different gauge");
  EigenPairs e = eig_hermitian(model.expansion().at(dk, tp.lambda0));
  VecC phase = (-kI * tau * e.values.array()).exp();
  MatC exact = e.vectors * (phase.asDiagonal() * (e.vectors.adjoint() * tp.cluster));
  MatC eff = tp.cluster * symbol_exponential(tensors, dk, tau);
  BoundSample s;
  s.dk_norm = dk.norm();
  s.tau = tau;
  s.lhs = spectral_norm(exact - eff);
  s.rhs = 3.0 * ledger.c7 * s.dk_norm + ledger.c11 * std::abs(tau) * std::pow(s.dk_norm, 3);
  return s;
}

}  // namespace hehom
