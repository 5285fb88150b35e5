#include "hehom/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hehom {

namespace {

constexpr double kMaxCondition = 1e8;

void for_each_box(int d, const MultiIndex& ext, auto&& fn) {
  MultiIndex m{0, 0, 0};
  int lo0 = -ext[0], hi0 = ext[0];
  int lo1 = d > 1 ? -ext[1] : 0, hi1 = d > 1 ? ext[1] : 0;
  int lo2 = d > 2 ? -ext[2] : 0, hi2 = d > 2 ? ext[2] : 0;
  for (m[0] = lo0; m[0] <= hi0; ++m[0])
    for (m[1] = lo1; m[1] <= hi1; ++m[1])
      for (m[2] = lo2; m[2] <= hi2; ++m[2]) fn(m);
}

}  // namespace

Lattice::Lattice(const MatR& basis) {
  if (basis.rows() != basis.cols() || basis.rows() < 1 || basis.rows() > 3)
    throw InvalidInput("lattice basis must be a square matrix of dimension 1, 2 or 3");
  if (!basis.allFinite()) throw InvalidInput("lattice basis has non-finite entries");
  a_ = basis;
  Eigen::JacobiSVD<MatR> svd(a_);
  const VecR& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= 0.0) throw InvalidInput("lattice basis is singular");
  cond_ = sv(0) / sv(sv.size() - 1);
  if (cond_ > kMaxCondition) throw InvalidInput("lattice basis is ill-conditioned");
  volume_ = std::abs(a_.determinant());
  b_ = 2.0 * kPi * a_.inverse().transpose();
  binv_ = b_.inverse();

  shortest_dual_ = std::numeric_limits<double>::infinity();
  const int d = dim();
  for_each_box(d, {3, 3, 3}, [&](const MultiIndex& m) {
    if (m[0] == 0 && m[1] == 0 && m[2] == 0) return;
    shortest_dual_ = std::min(shortest_dual_, dual_vector(m).norm());
  });
}

double Lattice::dual_cell_volume() const { return std::pow(2.0 * kPi, dim()) / volume_; }

VecR Lattice::dual_vector(const MultiIndex& m) const {
  VecR v = VecR::Zero(dim());
  for (int a = 0; a < dim(); ++a) v += b_.col(a) * static_cast<double>(m[a]);
  return v;
}

VecR Lattice::reduce(const VecR& k) const {
  if (k.size() != dim()) throw InvalidInput("quasimomentum has wrong dimension");
  VecR f = binv_ * k;
  for (int a = 0; a < f.size(); ++a) {
    // Fractional part in (-1/2, 1/2]; values within roundoff of +1/2 stay there.
    double r = f(a) - std::ceil(f(a) - 0.5);
    if (r <= -0.5 + 1e-13) r += 1.0;
    f(a) = r;
  }
  return b_ * f;
}

VecR Lattice::minimum_image(const VecR& k) const {
  VecR base = reduce(k);
  VecR best = base;
  for_each_box(dim(), {1, 1, 1}, [&](const MultiIndex& m) {
    VecR c = base - dual_vector(m);
    if (c.norm() < best.norm() - 1e-14) best = c;
  });
  return best;
}

Lattice build_lattice(const MatR& basis) { return Lattice(basis); }

double default_cutoff(const Lattice& lattice) {
  double m = std::numeric_limits<double>::infinity();
  for (int l = 0; l < lattice.dim(); ++l) m = std::min(m, lattice.dual().col(l).norm());
  return 8.0 * m;
}

PlaneWaveBasis::PlaneWaveBasis(Lattice lattice, double cutoff) : lattice_(std::move(lattice)), cutoff_(cutoff) {
  if (!(cutoff >= 0.0) || !std::isfinite(cutoff)) throw InvalidInput("cutoff must be finite and non-negative");
  const int d = lattice_.dim();
  // |m_a| <= |row a of B^{-1}| * |b|
  MatR binv = lattice_.dual().inverse();
  MultiIndex box{0, 0, 0};
  for (int a = 0; a < d; ++a) box[a] = static_cast<int>(std::floor(cutoff * binv.row(a).norm() + 1e-9));
  const double tol = cutoff * (1.0 + 1e-12) + 1e-14;
  for_each_box(d, box, [&](const MultiIndex& m) {
    if (lattice_.dual_vector(m).norm() <= tol) indices_.push_back(m);
  });
  // for_each_box already visits in lexicographic order
  vectors_.resize(d, static_cast<Eigen::Index>(indices_.size()));
  extent_ = {0, 0, 0};
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    vectors_.col(static_cast<Eigen::Index>(i)) = lattice_.dual_vector(indices_[i]);
    for (int a = 0; a < d; ++a) extent_[a] = std::max(extent_[a], std::abs(indices_[i][a]));
  }
  lookup_.assign([&] {
    std::size_t s = 1;
    for (int a = 0; a < 3; ++a) s *= static_cast<std::size_t>(2 * extent_[a] + 1);
    return s;
  }(), -1);
  for (std::size_t i = 0; i < indices_.size(); ++i) lookup_[box_offset(indices_[i])] = static_cast<long>(i);
  negation_.resize(indices_.size());
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    MultiIndex n = indices_[i];
    for (auto& c : n) c = -c;
    auto j = find(n);
    if (!j) throw ConsistencyError("plane-wave basis is not closed under negation");
    negation_[i] = *j;
  }
  zero_ = *find({0, 0, 0});
  grid_shape_ = {1, 1, 1};
  for (int a = 0; a < d; ++a) grid_shape_[a] = 4 * (2 * extent_[a] + 1);
}

std::size_t PlaneWaveBasis::box_offset(const MultiIndex& m) const {
  std::size_t off = 0;
  for (int a = 0; a < 3; ++a) off = off * static_cast<std::size_t>(2 * extent_[a] + 1) + static_cast<std::size_t>(m[a] + extent_[a]);
  return off;
}

std::optional<std::size_t> PlaneWaveBasis::find(const MultiIndex& m) const {
  for (int a = 0; a < 3; ++a)
    if (std::abs(m[a]) > extent_[a]) return std::nullopt;
  long v = lookup_[box_offset(m)];
  if (v < 0) return std::nullopt;
  return static_cast<std::size_t>(v);
}

PlaneWaveBasis build_basis(const Lattice& lattice, double cutoff) { return PlaneWaveBasis(lattice, cutoff); }

}  // namespace hehom
