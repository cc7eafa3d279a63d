#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "polya/partition.hpp"
#include "polya/state_space.hpp"

namespace polya {

// Log likelihood of a state trajectory under the urn model with the given
// concentration, partition, and strictly positive base weights. Evaluated by
// the chain rule in O(n + k) time. Requires nu to sum to 1 within 1e-6.
double log_likelihood(double concentration, const Partition& partition,
                      std::span<const double> nu, std::span<const std::size_t> trajectory);

struct ThetaFitOptions {
  double bracket_lo = 1e-3;
  double bracket_hi = 1e3;
  int grid_points = 64;        // log-spaced coarse scan
  double rel_width = 1e-6;     // golden-section stopping width, relative
  double flat_tol = 1e-9;      // grid spread below this reports Flat
};

enum class ThetaFitStatus {
  Ok,           // interior maximum
  Flat,         // likelihood does not depend on the concentration
  EdgeMaximum,  // maximum sits on the bracket boundary
};

struct ThetaFit {
  ThetaFitStatus status;
  double concentration;    // NaN when Flat, the bracket edge when EdgeMaximum
  double log_likelihood;
};

// Maximizes the log likelihood over the concentration: log-spaced grid scan,
// then golden-section refinement around the best grid point.
ThetaFit fit_theta(const Partition& partition, std::span<const double> nu,
                   std::span<const std::size_t> trajectory, ThetaFitOptions options = {});

struct PartitionFit {
  Partition partition;
  ThetaFit fit;
};

struct FitResult {
  // Sorted by log likelihood descending; ties prefer fewer blocks, then the
  // lexicographically smaller canonical assignment.
  std::vector<PartitionFit> table;
  std::vector<double> base_weights;
  bool base_estimated;

  const PartitionFit& best() const { return table.front(); }
};

// Exhaustive model selection over every partition of the space (k <= 8).
// Base weights are taken as given or estimated from the trajectory by
// add-one smoothing, which keeps unseen states strictly positive.
FitResult fit_model(const StateSpacePtr& space, std::span<const std::size_t> trajectory,
                    const std::optional<std::vector<double>>& nu, ThetaFitOptions options = {});

// (count_j + 1) / (n + k).
std::vector<double> estimate_base_weights(std::size_t k, std::span<const std::size_t> trajectory);

}  // namespace polya
