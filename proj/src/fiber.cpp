#include "hehom/fiber.hpp"

namespace hehom {

namespace {

// Grid slot of m_i - m_j for every pair of basis modes.
std::vector<std::size_t> difference_slots(const SamplingGrid& grid, const PlaneWaveBasis& basis) {
  const std::size_t n = basis.size();
  std::vector<std::size_t> out(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const auto& a = basis.index(i);
      const auto& b = basis.index(j);
      out[i * n + j] = grid.slot({a[0] - b[0], a[1] - b[1], a[2] - b[2]});
    }
  return out;
}

MatC convolution(const VecC& hat, const std::vector<std::size_t>& slots, Eigen::Index n) {
  MatC c(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) c(i, j) = hat(static_cast<Eigen::Index>(slots[static_cast<std::size_t>(i * n + j)]));
  return c;
}

MatC metric_matrix(const PeriodicCoefficients& coeffs, int r, int s, const std::vector<std::size_t>& slots, Eigen::Index n) {
  const SamplingGrid& grid = coeffs.grid();
  VecC hat(static_cast<Eigen::Index>(grid.size()));
  // metric_hat is slot-indexed; rebuild the array through the public accessor once.
  for (std::size_t q = 0; q < grid.size(); ++q) hat(static_cast<Eigen::Index>(q)) = coeffs.metric_hat(r, s, grid.frequency(q));
  return convolution(hat, slots, n);
}

MatC hermitian(const MatC& m) { return 0.5 * (m + m.adjoint()); }

}  // namespace

MatC inv_omega_matrix(const PeriodicCoefficients& coeffs, const PlaneWaveBasis& basis) {
  coeffs.check_basis(basis);
  const SamplingGrid& grid = coeffs.grid();
  auto slots = difference_slots(grid, basis);
  VecC hat(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t q = 0; q < grid.size(); ++q) hat(static_cast<Eigen::Index>(q)) = coeffs.inv_omega_hat(grid.frequency(q));
  return hermitian(convolution(hat, slots, static_cast<Eigen::Index>(basis.size())));
}

FiberExpansion::FiberExpansion(const PeriodicCoefficients& coeffs, const PlaneWaveBasis& basis, const VecR& k0,
                               bool with_derivatives)
    : d_(basis.dim()), k0_(k0) {
  if (k0.size() != d_) throw InvalidInput("quasimomentum has wrong dimension");
  coeffs.check_basis(basis);
  const auto n = static_cast<Eigen::Index>(basis.size());
  auto slots = difference_slots(coeffs.grid(), basis);
  w_ = inv_omega_matrix(coeffs, basis);
  std::vector<MatC> g(static_cast<std::size_t>(d_ * d_));
  for (int r = 0; r < d_; ++r)
    for (int s = 0; s < d_; ++s) g[static_cast<std::size_t>(r * d_ + s)] = metric_matrix(coeffs, r, s, slots, n);
  // D_s = diag((b + k0)_s)
  MatR shifted = basis.vectors().colwise() + k0;
  MatC k_mat = MatC::Zero(n, n);
  for (int r = 0; r < d_; ++r)
    for (int s = 0; s < d_; ++s)
      k_mat += shifted.row(r).transpose().asDiagonal() * g[static_cast<std::size_t>(r * d_ + s)] * shifted.row(s).asDiagonal();
  m0_ = hermitian(w_ * k_mat * w_);
  if (!with_derivatives) return;
  for (int r = 0; r < d_; ++r) {
    MatC l = MatC::Zero(n, n);
    for (int s = 0; s < d_; ++s) {
      l += g[static_cast<std::size_t>(r * d_ + s)] * shifted.row(s).asDiagonal();
      l += shifted.row(s).transpose().asDiagonal() * g[static_cast<std::size_t>(s * d_ + r)];
    }
    a_.push_back(hermitian(w_ * l * w_));
  }
  for (int r = 0; r < d_; ++r)
    for (int q = 0; q < d_; ++q) b_.push_back(hermitian(w_ * g[static_cast<std::size_t>(r * d_ + q)] * w_));
}

MatC FiberExpansion::at(const VecR& dk, double shift) const {
  if (dk.size() != d_) throw InvalidInput("quasimomentum offset has wrong dimension");
  if (a_.empty() && !dk.isZero(0.0)) throw InvalidInput("fiber expansion was built without derivatives");
  MatC m = m0_;
  if (shift != 0.0) m.diagonal().array() -= shift;
  for (int r = 0; r < d_; ++r) {
    if (dk(r) == 0.0) continue;
    m += dk(r) * a_[static_cast<std::size_t>(r)];
    for (int q = 0; q < d_; ++q) m += (dk(r) * dk(q)) * b_[static_cast<std::size_t>(r * d_ + q)];
  }
  return m;
}

MatC fiber_matrix(const PeriodicCoefficients& coeffs, const PlaneWaveBasis& basis, const VecR& k) {
  return FiberExpansion(coeffs, basis, k, false).base();
}

FiberMatrix assemble_fiber(const PeriodicCoefficients& coeffs, const PlaneWaveBasis& basis, const VecR& k) {
  FiberMatrix f;
  f.k = basis.lattice().reduce(k);
  f.matrix = fiber_matrix(coeffs, basis, f.k);
  return f;
}

}  // namespace hehom
