#pragma once

#include <optional>
#include <vector>

#include "hehom/fiber.hpp"

namespace hehom {

struct EigenPairs {
  VecR values;
  MatC vectors;
};

// Lowest m eigenpairs in ascending order; m = 0 means all. Residuals are checked against 1e-10‖M‖.
EigenPairs eig_hermitian(const MatC& m, Eigen::Index count = 0, bool vectors = true);
EigenPairs eig_fiber(const FiberMatrix& fiber, Eigen::Index count = 0);

struct BandStructure {
  std::vector<VecR> ks;
  MatR energies;  // one row per k
  std::vector<MatC> vectors;
};

BandStructure band_structure(const PeriodicCoefficients& coeffs, const PlaneWaveBasis& basis,
                             const std::vector<VecR>& ks, Eigen::Index count, bool with_vectors = false);

struct ThresholdOptions {
  std::optional<double> cluster_tol;
  int radii = 8;
  int bisection_steps = 30;
  // d0 below gap_floor * (1 + |λ0|) is rejected.
  double gap_floor = 1e-6;
};

struct ThresholdPoint {
  VecR k0;
  int band = 1;  // 1-based
  double lambda0 = 0.0;
  int n = 0;
  double d0 = 0.0;
  double kappa = 0.0;
  double kappa_cap = 0.0;
  double cluster_tol = 0.0;
  // Columns are the gauge-fixed eigenvectors ς_1..ς_n over the basis.
  MatC cluster;
  std::vector<double> sup_norms;
  // Basis positions of the reference plane waves fixing the gauge.
  std::vector<std::size_t> reference;
  int directions = 0;
  int radii = 0;
};

// Directions used for the separation scan.
std::vector<VecR> scan_directions(int d);

// True when 𝒜(k0+δk) has exactly n eigenvalues within d0/3 of λ0 and none in the two flanking bands of width d0/3.
bool separated(const VecR& shifted_eigenvalues, int n, double d0);

ThresholdPoint detect_threshold(const PeriodicCoefficients& coeffs, const PlaneWaveBasis& basis, const VecR& k0,
                                int band, const ThresholdOptions& options = {});

// Gauge fix: rotate an orthonormal frame so its Gram matrix against the reference plane waves
// is upper triangular with positive diagonal. The references are chosen and returned.
MatC fix_gauge(const MatC& frame, const PlaneWaveBasis& basis, const VecR& k0, std::vector<std::size_t>* reference);

// Replaces the cluster basis by cluster * u (u unitary).
ThresholdPoint regauge(const PeriodicCoefficients& coeffs, const PlaneWaveBasis& basis, const ThresholdPoint& tp,
                       const MatC& u);

// Grid maxima of |ς_p|.
std::vector<double> sup_norms(const PeriodicCoefficients& coeffs, const PlaneWaveBasis& basis, const MatC& cluster);

}  // namespace hehom
