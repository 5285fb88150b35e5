#pragma once

#include <memory>

#include "hehom/lattice.hpp"

namespace hehom {

// Uniform sampling grid x_j = A (j / n) on the period cell, with FFT transforms.
// Fourier coefficients follow f(x) = Σ_m f̂_m exp(i b_m · x).
class SamplingGrid {
 public:
  SamplingGrid() = default;
  SamplingGrid(const Lattice& lattice, const MultiIndex& shape);

  const Lattice& lattice() const { return lattice_; }
  int dim() const { return lattice_.dim(); }
  const MultiIndex& shape() const { return shape_; }
  std::size_t size() const { return size_; }

  std::size_t slot(const MultiIndex& m) const;
  // Signed frequency stored in a slot.
  MultiIndex frequency(std::size_t slot) const;
  VecR point(std::size_t slot) const;
  // True when m lies strictly below the Nyquist frequency on every axis.
  bool resolves(const MultiIndex& m) const;

  // Samples to Fourier coefficients.
  VecC forward(const VecC& samples) const;
  // Fourier coefficients to samples.
  VecC backward(const VecC& coeffs) const;
  // Cartesian partial derivative ∂_s, Nyquist modes dropped.
  VecC derivative(const VecC& samples, int s) const;
  cplx integrate(const VecC& samples) const;
  double integrate(const VecR& samples) const;

  // Cell vector c over basis modes represents u(x) = |Ω|^{-1/2} Σ c_m exp(i b_m · x).
  VecC cell_to_grid(const PlaneWaveBasis& basis, const VecC& c) const;
  // L2(Ω) projection of grid samples onto the basis modes.
  VecC grid_to_cell(const PlaneWaveBasis& basis, const VecC& samples) const;

 private:
  struct Plans;
  Lattice lattice_;
  MultiIndex shape_{1, 1, 1};
  std::size_t size_ = 1;
  std::shared_ptr<Plans> plans_;
};

}  // namespace hehom
