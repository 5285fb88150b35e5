#pragma once

#include <optional>
#include <vector>

#include "hehom/types.hpp"

namespace hehom {

// Period lattice Γ spanned by the columns of A, with dual lattice Γ̃ spanned by the columns of B = 2π A^{-T}.
class Lattice {
 public:
  Lattice() = default;
  explicit Lattice(const MatR& basis);

  int dim() const { return static_cast<int>(a_.rows()); }
  const MatR& basis() const { return a_; }
  const MatR& dual() const { return b_; }
  double cell_volume() const { return volume_; }
  double dual_cell_volume() const;
  double condition_number() const { return cond_; }

  VecR dual_vector(const MultiIndex& m) const;
  VecR point(const VecR& frac) const { return a_ * frac; }

  // Length of the shortest nonzero dual lattice vector.
  double shortest_dual() const { return shortest_dual_; }
  // Inradius of the Brillouin zone.
  double inradius() const { return 0.5 * shortest_dual_; }

  // Fractional dual coordinates in (-1/2, 1/2].
  VecR reduce(const VecR& k) const;
  // Shortest representative of k modulo Γ̃.
  VecR minimum_image(const VecR& k) const;

 private:
  MatR a_, b_, binv_;
  double volume_ = 0.0;
  double cond_ = 0.0;
  double shortest_dual_ = 0.0;
};

Lattice build_lattice(const MatR& basis);

// All dual lattice vectors with |b| <= cutoff, ordered lexicographically by multi-index.
class PlaneWaveBasis {
 public:
  PlaneWaveBasis() = default;
  PlaneWaveBasis(Lattice lattice, double cutoff);

  const Lattice& lattice() const { return lattice_; }
  int dim() const { return lattice_.dim(); }
  double cutoff() const { return cutoff_; }
  std::size_t size() const { return indices_.size(); }

  const MultiIndex& index(std::size_t i) const { return indices_[i]; }
  const std::vector<MultiIndex>& indices() const { return indices_; }
  // Cartesian dual vectors, one column per mode.
  const MatR& vectors() const { return vectors_; }
  std::optional<std::size_t> find(const MultiIndex& m) const;
  std::size_t negation(std::size_t i) const { return negation_[i]; }
  std::size_t zero() const { return zero_; }

  // Largest |m_a| per axis.
  const MultiIndex& extent() const { return extent_; }
  // Sampling grid points per axis: even, at least 4x the modes per axis.
  const MultiIndex& grid_shape() const { return grid_shape_; }

 private:
  Lattice lattice_;
  double cutoff_ = 0.0;
  std::vector<MultiIndex> indices_;
  MatR vectors_;
  std::vector<std::size_t> negation_;
  std::size_t zero_ = 0;
  MultiIndex extent_{0, 0, 0};
  MultiIndex grid_shape_{1, 1, 1};
  // Dense lookup over the extent box.
  std::vector<long> lookup_;
  std::size_t box_offset(const MultiIndex& m) const;
};

PlaneWaveBasis build_basis(const Lattice& lattice, double cutoff);
// 8 times the shortest dual basis vector.
double default_cutoff(const Lattice& lattice);

}  // namespace hehom
