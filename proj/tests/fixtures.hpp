#pragma once

#include <cmath>

#include "hehom/harness.hpp"

namespace fixture {

using hehom::json;

inline double mathieu_potential(double x) { return 2.0 * std::cos(2.0 * M_PI * x); }

inline json free_1d(double k0, int band = 1) {
  return {{"lattice", {{1.0}}},
          {"coefficients", {{"metric", "identity"}}},
          {"threshold", {{"k", {k0}}, {"band", band}}}};
}

inline json free_2d(double kx, double ky, int band = 1) {
  return {{"lattice", {{1.0, 0.0}, {0.0, 1.0}}},
          {"cutoff_modes", 6},
          {"coefficients", {{"metric", "identity"}}},
          {"threshold", {{"k", {kx, ky}}, {"band", band}}}};
}

// ǧ = 1, V = 2cos 2πx, sixteen dual vectors of cutoff.
inline json mathieu(double k0, int band) {
  return {{"lattice", {{1.0}}},
          {"cutoff_modes", 16},
          {"coefficients", {{"metric", "identity"}, {"potential", {{{1}, 1.0}, {{-1}, 1.0}}}}},
          {"threshold", {{"k", {k0}}, {"band", band}}}};
}

inline hehom::RunConfig config(const json& j) { return hehom::parse_config(j); }

}  // namespace fixture
