#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hehom/grid.hpp"

namespace hehom {

struct FourierTerm {
  MultiIndex index{0, 0, 0};
  cplx amplitude{0.0, 0.0};
};
using FourierSeries = std::vector<FourierTerm>;

// Input coefficients: metric ǧ (d*d entries, row-major) plus either a potential V or the ground state ω.
struct CoefficientSpec {
  std::vector<FourierSeries> metric;
  std::optional<FourierSeries> potential;
  std::optional<FourierSeries> weight;
};

// Checks dimensions, Hermitian symmetry of each series and symmetry of the metric.
void validate_spec(const CoefficientSpec& spec, int d);

// Identity metric, optionally with a potential.
CoefficientSpec free_spec(int d);

struct GroundState {
  // Fourier coefficients of ω over the basis modes; Σ|ω̂|² = 1, i.e. ‖ω‖² = |Ω|.
  VecC omega_hat;
  double shift = 0.0;
  double residual = 0.0;
};

// Lowest eigenpair of D*ǧD + V in the plane-wave basis.
GroundState ground_state(const CoefficientSpec& spec, const PlaneWaveBasis& basis);

// Factorised coefficients g = ω²ǧ and ω⁻¹ sampled on a grid tied to a basis.
class PeriodicCoefficients {
 public:
  PeriodicCoefficients() = default;
  PeriodicCoefficients(const CoefficientSpec& spec, const PlaneWaveBasis& basis, int grid_factor = 4);

  const SamplingGrid& grid() const { return grid_; }
  int dim() const { return grid_.dim(); }
  int grid_factor() const { return grid_factor_; }
  const CoefficientSpec& spec() const { return spec_; }
  double shift() const { return shift_; }
  double ground_residual() const { return ground_residual_; }
  bool derived_weight() const { return derived_weight_; }

  const VecC& omega_hat() const { return omega_hat_; }
  const std::vector<MultiIndex>& omega_modes() const { return omega_modes_; }
  const VecR& omega() const { return omega_; }
  const VecR& inv_omega() const { return inv_omega_; }
  const VecR& metric(int r, int s) const { return g_[static_cast<std::size_t>(r * dim() + s)]; }
  const VecR& metric_input(int r, int s) const { return gcheck_[static_cast<std::size_t>(r * dim() + s)]; }

  // Fourier coefficients of ω⁻¹ and g_rs at frequency m.
  cplx inv_omega_hat(const MultiIndex& m) const { return inv_omega_hat_(static_cast<Eigen::Index>(grid_.slot(m))); }
  cplx metric_hat(int r, int s, const MultiIndex& m) const {
    return g_hat_[static_cast<std::size_t>(r * dim() + s)](static_cast<Eigen::Index>(grid_.slot(m)));
  }

  // Ellipticity bounds of ǧ.
  double alpha0() const { return alpha0_; }
  double alpha1() const { return alpha1_; }
  // sup_x |g(x)| (spectral norm) and sup_x ω⁻¹(x).
  double metric_sup() const { return metric_sup_; }
  double inv_omega_sup() const { return inv_omega_sup_; }
  // |‖ω‖² - |Ω|| / |Ω|
  double omega_norm_error() const { return omega_norm_error_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  // Grid extent the basis may not exceed.
  const MultiIndex& basis_extent() const { return basis_extent_; }
  void check_basis(const PlaneWaveBasis& basis) const;

 private:
  CoefficientSpec spec_;
  SamplingGrid grid_;
  int grid_factor_ = 4;
  double shift_ = 0.0;
  double ground_residual_ = 0.0;
  bool derived_weight_ = false;
  VecC omega_hat_;
  std::vector<MultiIndex> omega_modes_;
  VecR omega_, inv_omega_;
  std::vector<VecR> g_, gcheck_;
  VecC inv_omega_hat_;
  std::vector<VecC> g_hat_;
  double alpha0_ = 0.0, alpha1_ = 0.0, metric_sup_ = 0.0, inv_omega_sup_ = 0.0, omega_norm_error_ = 0.0;
  std::vector<std::string> warnings_;
  MultiIndex basis_extent_{0, 0, 0};
};

// Evaluates a Fourier series on the grid (real part; imaginary residue is checked).
VecR evaluate_series(const SamplingGrid& grid, const FourierSeries& series);

}  // namespace hehom
