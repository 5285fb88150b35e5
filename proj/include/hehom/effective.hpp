#pragma once

#include <vector>

#include "hehom/threshold.hpp"

namespace hehom {

struct TensorProvenance {
  double cutoff = 0.0;
  std::size_t basis_size = 0;
  MultiIndex grid_shape{1, 1, 1};
  int grid_factor = 0;
  double cluster_tol = 0.0;
  std::vector<std::size_t> reference;
  double cell_residual = 0.0;
  // Largest change of any tensor entry when the quadrature grid is doubled; negative if not checked.
  double refinement_delta = -1.0;
  MatR lattice;
  double shift = 0.0;
};

struct EffectiveTensors {
  int n = 0, d = 0;
  VecR k0;
  int band = 1;
  double lambda0 = 0.0, d0 = 0.0, kappa = 0.0;
  // Flattened [l][p][r] and [l][p][r][q].
  std::vector<cplx> g1, g1_tilde, g2;
  MatC cluster;
  std::vector<MultiIndex> modes;
  TensorProvenance provenance;
  std::vector<std::string> warnings;

  cplx& first(int l, int p, int r) { return g1[static_cast<std::size_t>((l * n + p) * d + r)]; }
  cplx first(int l, int p, int r) const { return g1[static_cast<std::size_t>((l * n + p) * d + r)]; }
  cplx& second(int l, int p, int r, int q) { return g2[static_cast<std::size_t>(((l * n + p) * d + r) * d + q)]; }
  cplx second(int l, int p, int r, int q) const { return g2[static_cast<std::size_t>(((l * n + p) * d + r) * d + q)]; }
};

struct CellProblems {
  // Index p * d + r. rhs is before projection onto the complement of the cluster.
  std::vector<VecC> rhs, solutions;
  double residual = 0.0;
};

// First-order tensor and its intermediate g̃ from grid quadrature.
void g1_tensor(const PeriodicCoefficients& coeffs, const PlaneWaveBasis& basis, const ThresholdPoint& tp,
               std::vector<cplx>& g1, std::vector<cplx>& g1_tilde);
CellProblems solve_cell_problems(const ThresholdModel& model);
std::vector<cplx> g2_tensor(const PeriodicCoefficients& coeffs, const PlaneWaveBasis& basis, const ThresholdPoint& tp,
                            const CellProblems& cells);

// Full tensor record; with refine the quadrature is repeated on a doubled grid.
EffectiveTensors effective_tensors(const ThresholdModel& model, bool refine = true);

// 𝔤(δk) = λ0 I + ⟨g1, δk⟩ + Σ g2_rq δk_r δk_q; throws ConsistencyError if not Hermitian to 1e-10.
MatC effective_symbol(const EffectiveTensors& t, const VecR& dk);
// 𝔤(δk) - λ0 I
MatC effective_symbol_shifted(const EffectiveTensors& t, const VecR& dk);
// exp(-iτ(𝔤(δk) - λ0))
MatC symbol_exponential(const EffectiveTensors& t, const VecR& dk, double tau);
// c_j(τ) = exp(-iτ𝔤(δk)) e_j
VecC reduced_evolution(const EffectiveTensors& t, const VecR& dk, double tau, int j);

}  // namespace hehom
