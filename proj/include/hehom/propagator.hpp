#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hehom/effective.hpp"

namespace hehom {

struct PacketSpec {
  std::string kind = "gaussian";  // gaussian | single | explicit
  int nodes = 64;                 // per axis
  double radius = 1.0;            // R_ξ
  VecR center;                    // defaults to 0
  double width = 1.0;             // a(ξ) = amplitude · exp(-|ξ - center|² / width²)
  cplx amplitude{1.0, 0.0};
  double weight = 1.0;            // single mode quadrature weight
  std::vector<VecR> xi;           // explicit nodes (or the single mode)
  std::vector<cplx> values;       // explicit amplitudes
  std::vector<double> weights;    // explicit weights
};

// Initial profile in Fourier variables, sampled on a quadrature grid.
struct WavePacket {
  int d = 0;
  int profile = 1;  // j, 1-based
  double radius = 0.0;
  std::vector<VecR> nodes;
  std::vector<cplx> amplitudes;
  std::vector<double> weights;
  double l2_norm = 0.0;
  double h3_norm = 0.0;
  std::size_t size() const { return nodes.size(); }
};

WavePacket make_packet(const PacketSpec& spec, int d, int profile);

// Per-node cell vectors, without the packet amplitude.
struct FiberField {
  double eps = 0.0, tau = 0.0;
  std::vector<VecC> vectors;
  std::vector<std::string> warnings;
  double norm(const WavePacket& packet) const;
};

// Per-node coefficient vectors in the ς basis, including the packet amplitude.
struct EffectiveField {
  double eps = 0.0, tau = 0.0;
  std::vector<VecC> coefficients;
  double norm(const WavePacket& packet) const;
};

// exp(-iτε⁻²𝒜(k0+εξ)) applied to initial (defaults to ς_j) for every node.
FiberField propagate_exact(const ThresholdModel& model, const WavePacket& packet, double eps, double tau,
                           const std::optional<VecC>& initial = std::nullopt);
// exp(-iτε⁻²𝔤(εξ)) applied to initial (defaults to e_j), times the amplitude.
EffectiveField propagate_effective(const EffectiveTensors& tensors, const WavePacket& packet, double eps, double tau,
                                   const std::optional<VecC>& initial = std::nullopt);

// L2(ℝ^d) norm of the difference of the two solutions.
double assemble_error(const WavePacket& packet, const FiberField& exact, const EffectiveField& effective,
                      const MatC& cluster, double cell_volume);

struct ErrorBound {
  double kappa_term = 0.0;
  double estimate_term = 0.0;
  double total() const { return kappa_term + estimate_term; }
  bool certified = true;  // ε R_ξ <= κ
};

ErrorBound error_bound(const ConstantsLedger& ledger, const ThresholdPoint& tp, const WavePacket& packet, double eps,
                       double tau, double cell_volume);

// Physical-space samples u(x) and u_eff(x) at the given points.
struct Snapshot {
  std::vector<VecR> points;
  std::vector<cplx> exact, effective;
};
Snapshot physical_snapshot(const PlaneWaveBasis& basis, const ThresholdPoint& tp, const WavePacket& packet,
                           const FiberField& exact, const EffectiveField& effective, const std::vector<VecR>& points);

}  // namespace hehom
