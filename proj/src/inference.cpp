#include "polya/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "polya/error.hpp"

namespace polya {

namespace {

void require_inputs(const Partition& partition, std::span<const double> nu,
                    std::span<const std::size_t> trajectory) {
  const std::size_t k = partition.size();
  if (nu.size() != k) throw ValidationError("log_likelihood: one base weight per state required");
  double total = 0.0;
  for (double w : nu) {
    if (!(w > 0.0)) throw ValidationError("log_likelihood: base weights must be strictly positive");
    total += w;
  }
  if (std::fabs(total - 1.0) > 1e-6) {
    throw ValidationError("log_likelihood: base weights must sum to 1");
  }
  for (std::size_t x : trajectory) {
    if (x >= k) throw ValidationError("log_likelihood: state out of range");
  }
}

double log_likelihood_unchecked(double concentration, const Partition& partition,
                                std::span<const double> nu,
                                std::span<const std::size_t> trajectory,
                                std::span<const double> block_mass) {
  // Chain rule: the i-th factor is
  //   nu(x) / nu(D)  *  (c nu(D) + hits(D)) / (c + i)
  // where D is the block of x and hits counts earlier visits to D.
  std::vector<std::size_t> hits(partition.num_blocks(), 0);
  double ll = 0.0;
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    const std::size_t x = trajectory[i];
    const std::size_t l = partition.block_of(x);
    ll += std::log(nu[x]) - std::log(block_mass[l]);
    ll += std::log(concentration * block_mass[l] + static_cast<double>(hits[l]));
    ll -= std::log(concentration + static_cast<double>(i));
    ++hits[l];
  }
  return ll;
}

std::vector<double> block_masses(const Partition& partition, std::span<const double> nu) {
  std::vector<double> mass(partition.num_blocks(), 0.0);
  for (std::size_t j = 0; j < nu.size(); ++j) mass[partition.block_of(j)] += nu[j];
  return mass;
}

}  // namespace

double log_likelihood(double concentration, const Partition& partition,
                      std::span<const double> nu, std::span<const std::size_t> trajectory) {
  if (!(concentration > 0.0)) {
    throw ValidationError("log_likelihood: concentration must be positive");
  }
  require_inputs(partition, nu, trajectory);
  return log_likelihood_unchecked(concentration, partition, nu, trajectory,
                                  block_masses(partition, nu));
}

ThetaFit fit_theta(const Partition& partition, std::span<const double> nu,
                   std::span<const std::size_t> trajectory, ThetaFitOptions options) {
  require_inputs(partition, nu, trajectory);
  if (trajectory.empty()) throw OutOfRangeError("fit_theta: empty trajectory");
  if (!(options.bracket_lo > 0.0) || !(options.bracket_hi > options.bracket_lo)) {
    throw ValidationError("fit_theta: bad bracket");
  }
  if (options.grid_points < 3) throw ValidationError("fit_theta: need at least 3 grid points");

  const auto mass = block_masses(partition, nu);
  const auto objective = [&](double log_c) {
    return log_likelihood_unchecked(std::exp(log_c), partition, nu, trajectory, mass);
  };

  const double lo = std::log(options.bracket_lo);
  const double hi = std::log(options.bracket_hi);
  const int g = options.grid_points;

  std::vector<double> value(g);
  double best_value = -std::numeric_limits<double>::infinity();
  double worst_value = std::numeric_limits<double>::infinity();
  int best = 0;
  for (int i = 0; i < g; ++i) {
    const double log_c = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(g - 1);
    value[i] = objective(log_c);
    if (value[i] > best_value) {
      best_value = value[i];
      best = i;
    }
    worst_value = std::min(worst_value, value[i]);
  }

  if (best_value - worst_value < options.flat_tol) {
    return {ThetaFitStatus::Flat, std::numeric_limits<double>::quiet_NaN(), best_value};
  }

  const double step = (hi - lo) / static_cast<double>(g - 1);
  double a = lo + step * static_cast<double>(std::max(best - 1, 0));
  double b = lo + step * static_cast<double>(std::min(best + 1, g - 1));

  // Golden-section ascent on log concentration; the bracket width in log
  // space is the relative width in concentration.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = objective(x1);
  double f2 = objective(x2);
  while (b - a > options.rel_width) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = objective(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = objective(x1);
    }
  }
  const double log_best = (a + b) / 2.0;
  const double ll_best = objective(log_best);

  const double edge_margin = 10.0 * options.rel_width;
  if (best == 0 && log_best - lo <= edge_margin) {
    return {ThetaFitStatus::EdgeMaximum, options.bracket_lo, objective(lo)};
  }
  if (best == g - 1 && hi - log_best <= edge_margin) {
    return {ThetaFitStatus::EdgeMaximum, options.bracket_hi, objective(hi)};
  }
  return {ThetaFitStatus::Ok, std::exp(log_best), ll_best};
}

std::vector<double> estimate_base_weights(std::size_t k,
                                          std::span<const std::size_t> trajectory) {
  if (k == 0) throw ValidationError("estimate_base_weights: empty state space");
  std::vector<double> w(k, 1.0);
  for (std::size_t x : trajectory) {
    if (x >= k) throw ValidationError("estimate_base_weights: state out of range");
    w[x] += 1.0;
  }
  const double total = static_cast<double>(trajectory.size() + k);
  for (double& v : w) v /= total;
  return w;
}

FitResult fit_model(const StateSpacePtr& space, std::span<const std::size_t> trajectory,
                    const std::optional<std::vector<double>>& nu, ThetaFitOptions options) {
  if (!space) throw ValidationError("fit_model: null state space");
  const std::size_t k = space->size();
  if (k > 8) {
    throw OutOfRangeError("fit_model: exhaustive partition search is limited to k <= 8");
  }
  if (trajectory.empty()) throw OutOfRangeError("fit_model: empty trajectory");

  FitResult result;
  result.base_estimated = !nu.has_value();
  result.base_weights = nu ? *nu : estimate_base_weights(k, trajectory);

  for (const Partition& p : enumerate_partitions(space)) {
    ThetaFit fit = fit_theta(p, result.base_weights, trajectory, options);
    result.table.push_back({p, fit});
  }

  std::stable_sort(result.table.begin(), result.table.end(),
                   [](const PartitionFit& lhs, const PartitionFit& rhs) {
                     if (lhs.fit.log_likelihood != rhs.fit.log_likelihood) {
                       return lhs.fit.log_likelihood > rhs.fit.log_likelihood;
                     }
                     if (lhs.partition.num_blocks() != rhs.partition.num_blocks()) {
                       return lhs.partition.num_blocks() < rhs.partition.num_blocks();
                     }
                     return lhs.partition.assignment() < rhs.partition.assignment();
                   });
  return result;
}

}  // namespace polya
