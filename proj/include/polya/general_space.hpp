#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "polya/rational.hpp"

namespace polya {

// Half-open interval [lo, hi).
struct Interval {
  double lo;
  double hi;
};

// Continuous distribution on an interval, given as a piecewise-linear CDF
// through knots (x_i, F_i). Draws invert the CDF at a uniform, so sampling is
// deterministic given the stream.
class PiecewiseLinearCdf {
 public:
  PiecewiseLinearCdf(std::vector<double> xs, std::vector<double> cdf);
  static PiecewiseLinearCdf uniform(Interval iv);

  // Smallest x with F(x) >= u, linear between knots; u in [0, 1).
  double inverse(double u) const;
  Interval support() const { return {xs_.front(), xs_.back()}; }
  const std::vector<double>& knots() const { return xs_; }
  const std::vector<double>& values() const { return cdf_; }

 private:
  std::vector<double> xs_;
  std::vector<double> cdf_;
};

// One mixture component: where it lives, how much base mass it carries, and
// how to draw a point inside it. The probability is exact; values are real.
struct GeneralBin {
  Interval interval;
  Rat prob;
  PiecewiseLinearCdf within;
};

// Base measure on the line split into finitely many disjoint bins. Observed
// values always identify their bin, which is all the block law depends on.
class GeneralMixtureModel {
 public:
  GeneralMixtureModel(Rat concentration, std::vector<GeneralBin> bins);

  // Accepts bin probabilities summing to s <= 1, renormalizes them, and
  // records 1 - s as the mass the model deliberately leaves out.
  static GeneralMixtureModel truncated(Rat concentration, std::vector<GeneralBin> bins);

  std::size_t num_bins() const { return bins_.size(); }
  const GeneralBin& bin(std::size_t l) const { return bins_.at(l); }
  const Rat& concentration() const { return concentration_; }
  const Rat& tail_mass() const { return tail_mass_; }

  std::size_t bin_of(double value) const;  // throws ValidationError if outside all bins

 private:
  GeneralMixtureModel(Rat concentration, std::vector<GeneralBin> bins, Rat tail);
  void validate() const;

  Rat concentration_;
  std::vector<GeneralBin> bins_;
  Rat tail_mass_;
};

struct RealTrajectory {
  std::vector<double> values;
  std::vector<std::size_t> blocks;
  std::size_t size() const { return values.size(); }
};

// Urn sampler: step i draws fresh from the base mixture with probability
// c / (c + i), otherwise a uniformly chosen past value's bin is resampled
// from its within-bin distribution. Every drawn value is checked to land in
// the bin that produced it.
RealTrajectory sample_urn(const GeneralMixtureModel& model, std::size_t n, std::uint64_t seed);

// Two-stage sampler: Dirichlet(c p_1, ..., c p_m) bin weights once, then
// i.i.d. draws of a bin and a point within it.
RealTrajectory sample_hierarchical(const GeneralMixtureModel& model, std::size_t n,
                                   std::uint64_t seed);

// Probability that the first draws fall in the given bins, in order:
// prod_i (c p_{b_i} + count_i(b_i)) / (c + i), exact.
Rat exact_block_law(const GeneralMixtureModel& model, std::span<const std::size_t> blocks);

struct CompareLawsRow {
  std::vector<std::size_t> sequence;
  Rat exact;
  double urn_empirical;
  double hierarchical_empirical;
};

struct CompareLawsReport {
  std::size_t prefix_len;
  std::size_t replicates;
  double tv_urn;           // total variation, urn empirical vs exact
  double tv_hierarchical;  // total variation, hierarchical empirical vs exact
  double mc_error_bound;   // sqrt(m^prefix_len / replicates)
  std::vector<CompareLawsRow> rows;
};

// Runs both samplers `replicates` times (replicate r uses seed + r for the
// urn stream and seed + replicates + r for the hierarchical stream), bins the
// length-`prefix_len` block sequences, and compares both empirical laws
// against the exact one. Guards: m^prefix_len <= 10^4 and prefix_len <= 4.
CompareLawsReport compare_laws(const GeneralMixtureModel& model, std::size_t prefix_len,
                               std::size_t replicates, std::uint64_t seed);

}  // namespace polya
