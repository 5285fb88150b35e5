#pragma once

#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "hehom/propagator.hpp"

namespace hehom {

using json = nlohmann::json;

struct BandPath {
  std::vector<VecR> ks;
  int count = 8;
};

struct RunConfig {
  MatR lattice;
  std::optional<double> cutoff;
  std::optional<double> cutoff_modes;  // cutoff = modes · shortest dual basis vector
  int grid_factor = 4;
  CoefficientSpec coefficients;
  VecR k0;
  int band = 1;
  ThresholdOptions threshold;
  PacketSpec packet;
  int profile = 1;
  std::vector<double> epsilons;
  std::vector<double> taus;
  BandPath bands;
  bool refine = true;
  // Error slopes must land in [slope_min, slope_max] when checked.
  double slope_min = 0.8, slope_max = 1.3;
};

RunConfig parse_config(const json& j);
RunConfig load_config(const std::string& path);
json read_json(const std::string& path);

cplx parse_complex(const json& j);
json complex_json(cplx z);
FourierSeries parse_series(const json& j, int d);

// Lattice, basis, coefficients, threshold, model, tensors and ledger, built in that order.
class Pipeline {
 public:
  explicit Pipeline(const RunConfig& cfg, bool with_tensors = true);
  // Reuses a stored tensor record instead of recomputing threshold and tensors.
  Pipeline(const RunConfig& cfg, const EffectiveTensors& tensors);
  Pipeline(const Pipeline&) = delete;
  Pipeline& operator=(const Pipeline&) = delete;

  const RunConfig& config() const { return cfg_; }
  const PlaneWaveBasis& basis() const { return basis_; }
  const PeriodicCoefficients& coeffs() const { return coeffs_; }
  const ThresholdPoint& point() const { return tp_; }
  const ThresholdModel& model() const { return *model_; }
  const EffectiveTensors& tensors() const { return tensors_; }
  const ConstantsLedger& ledger() const { return ledger_; }
  double cell_volume() const { return basis_.lattice().cell_volume(); }

 private:
  RunConfig cfg_;
  PlaneWaveBasis basis_;
  PeriodicCoefficients coeffs_;
  ThresholdPoint tp_;
  std::unique_ptr<ThresholdModel> model_;
  EffectiveTensors tensors_;
  ConstantsLedger ledger_;
};

double resolve_cutoff(const RunConfig& cfg, const Lattice& lattice);

struct SlopeFit {
  double slope = 0.0, intercept = 0.0, residual = 0.0;
  std::size_t points = 0;
};

// Least squares on (log ε, log error); needs at least three positive pairs.
SlopeFit fit_slope(const std::vector<double>& eps, const std::vector<double>& errors);

struct ConvergenceEntry {
  double eps = 0.0, tau = 0.0, error = 0.0, kappa_term = 0.0, estimate_term = 0.0, bound = 0.0;
  double l2_exact = 0.0, l2_effective = 0.0;
  bool certified = true;
  bool holds() const { return error <= bound; }
};

struct SlopeRecord {
  double tau = 0.0;
  std::optional<SlopeFit> fit;
  std::string status;  // fitted | noise-floor | too-few-points
};

struct ConvergenceReport {
  std::vector<ConvergenceEntry> entries;
  std::vector<SlopeRecord> slopes;
  std::vector<std::string> warnings;
  bool all_bounds_hold() const;
};

ConvergenceReport run_convergence(const Pipeline& pipeline);

json to_json(const ThresholdPoint& tp, const PlaneWaveBasis& basis);
json to_json(const EffectiveTensors& t);
json to_json(const ConstantsLedger& c);
json to_json(const ConvergenceReport& r, const Pipeline& p);
EffectiveTensors tensors_from_json(const json& j);

// Fixed-precision CSV output (17 significant digits).
void write_csv_row(std::ostream& os, const std::vector<double>& values);

}  // namespace hehom
