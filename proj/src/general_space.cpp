#include "polya/general_space.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "polya/error.hpp"
#include "polya/rng.hpp"

namespace polya {

PiecewiseLinearCdf::PiecewiseLinearCdf(std::vector<double> xs, std::vector<double> cdf)
    : xs_(std::move(xs)), cdf_(std::move(cdf)) {
  if (xs_.size() < 2 || xs_.size() != cdf_.size()) {
    throw ValidationError("cdf: need matching knot and value lists, at least two knots");
  }
  for (std::size_t i = 0; i + 1 < xs_.size(); ++i) {
    if (!(xs_[i] < xs_[i + 1])) throw ValidationError("cdf: knots must be strictly increasing");
    if (cdf_[i] > cdf_[i + 1]) throw ValidationError("cdf: values must be nondecreasing");
  }
  if (cdf_.front() != 0.0 || cdf_.back() != 1.0) {
    throw ValidationError("cdf: must start at 0 and end at 1");
  }
}

PiecewiseLinearCdf PiecewiseLinearCdf::uniform(Interval iv) {
  return PiecewiseLinearCdf({iv.lo, iv.hi}, {0.0, 1.0});
}

double PiecewiseLinearCdf::inverse(double u) const {
  if (!(u >= 0.0 && u < 1.0)) throw ValidationError("cdf inverse: u must lie in [0, 1)");
  // First segment whose right value exceeds u; flat segments are skipped so
  // the result stays strictly left of the final knot for u < 1.
  std::size_t i = 0;
  while (i + 2 < xs_.size() && cdf_[i + 1] <= u) ++i;
  const double span = cdf_[i + 1] - cdf_[i];
  if (span <= 0.0) return xs_[i];
  const double frac = (u - cdf_[i]) / span;
  return xs_[i] + frac * (xs_[i + 1] - xs_[i]);
}

GeneralMixtureModel::GeneralMixtureModel(Rat concentration, std::vector<GeneralBin> bins)
    : GeneralMixtureModel(std::move(concentration), std::move(bins), Rat(0)) {
  Rat total(0);
  for (const auto& b : bins_) total += b.prob;
  if (total != 1) {
    throw ValidationError("general model: bin probabilities must sum to 1 (use truncated() for partial mass)");
  }
}

GeneralMixtureModel GeneralMixtureModel::truncated(Rat concentration,
                                                   std::vector<GeneralBin> bins) {
  Rat total(0);
  for (const auto& b : bins) total += b.prob;
  if (!(total > 0) || total > 1) {
    throw ValidationError("general model: truncated bin probabilities must sum into (0, 1]");
  }
  const Rat tail = Rat(1) - total;
  for (auto& b : bins) b.prob /= total;
  return GeneralMixtureModel(std::move(concentration), std::move(bins), tail);
}

GeneralMixtureModel::GeneralMixtureModel(Rat concentration, std::vector<GeneralBin> bins,
                                         Rat tail)
    : concentration_(std::move(concentration)), bins_(std::move(bins)),
      tail_mass_(std::move(tail)) {
  validate();
}

void GeneralMixtureModel::validate() const {
  if (!(concentration_ > 0)) {
    throw ValidationError("general model: concentration must be positive");
  }
  if (bins_.empty()) throw ValidationError("general model: at least one bin required");
  for (std::size_t l = 0; l < bins_.size(); ++l) {
    const auto& b = bins_[l];
    if (!(b.interval.lo < b.interval.hi)) {
      throw ValidationError("general model: empty interval in bin " + std::to_string(l));
    }
    if (!(b.prob > 0)) {
      throw ValidationError("general model: bin probabilities must be strictly positive");
    }
    const Interval s = b.within.support();
    if (s.lo < b.interval.lo || s.hi > b.interval.hi) {
      throw ValidationError("general model: sampler support leaves bin " + std::to_string(l));
    }
    if (l + 1 < bins_.size() && !(b.interval.hi <= bins_[l + 1].interval.lo)) {
      throw ValidationError("general model: bins must be disjoint and ordered");
    }
  }
}

std::size_t GeneralMixtureModel::bin_of(double value) const {
  for (std::size_t l = 0; l < bins_.size(); ++l) {
    if (value >= bins_[l].interval.lo && value < bins_[l].interval.hi) return l;
  }
  throw ValidationError("general model: value " + std::to_string(value) + " lies outside every bin");
}

namespace {

std::size_t draw_bin(const GeneralMixtureModel& model, double u) {
  double cum = 0.0;
  for (std::size_t l = 0; l + 1 < model.num_bins(); ++l) {
    cum += to_double(model.bin(l).prob);
    if (u < cum) return l;
  }
  return model.num_bins() - 1;
}

double draw_in_bin(const GeneralMixtureModel& model, std::size_t l, SplitMix64& rng,
                   const char* who) {
  const double v = model.bin(l).within.inverse(rng.uniform());
  // Drawn values must land in the bin that produced them; anything else means
  // the discretization and the sampler disagree.
  if (model.bin_of(v) != l) {
    throw Error(std::string(who) + ": drew " + std::to_string(v) + " outside bin " +
                std::to_string(l));
  }
  return v;
}

}  // namespace

RealTrajectory sample_urn(const GeneralMixtureModel& model, std::size_t n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  RealTrajectory out;
  out.values.reserve(n);
  out.blocks.reserve(n);
  const double c = to_double(model.concentration());
  for (std::size_t i = 0; i < n; ++i) {
    const double fresh_prob = c / (c + static_cast<double>(i));
    std::size_t l;
    if (rng.uniform() < fresh_prob) {
      l = draw_bin(model, rng.uniform());
    } else {
      l = out.blocks[static_cast<std::size_t>(rng.below(i))];
    }
    out.values.push_back(draw_in_bin(model, l, rng, "sample_urn"));
    out.blocks.push_back(l);
  }
  return out;
}

RealTrajectory sample_hierarchical(const GeneralMixtureModel& model, std::size_t n,
                                   std::uint64_t seed) {
  SplitMix64 rng(seed);
  const double c = to_double(model.concentration());
  std::vector<double> alpha(model.num_bins());
  for (std::size_t l = 0; l < alpha.size(); ++l) {
    alpha[l] = c * to_double(model.bin(l).prob);
  }
  const std::vector<double> weights = rng.dirichlet(alpha);

  RealTrajectory out;
  out.values.reserve(n);
  out.blocks.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform();
    double cum = 0.0;
    std::size_t l = model.num_bins() - 1;
    for (std::size_t b = 0; b + 1 < model.num_bins(); ++b) {
      cum += weights[b];
      if (u < cum) {
        l = b;
        break;
      }
    }
    out.values.push_back(draw_in_bin(model, l, rng, "sample_hierarchical"));
    out.blocks.push_back(l);
  }
  return out;
}

Rat exact_block_law(const GeneralMixtureModel& model, std::span<const std::size_t> blocks) {
  std::vector<std::size_t> count(model.num_bins(), 0);
  Rat p(1);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const std::size_t b = blocks[i];
    if (b >= model.num_bins()) throw ValidationError("exact_block_law: block out of range");
    const Rat numer = model.concentration() * model.bin(b).prob + Rat(static_cast<long>(count[b]));
    const Rat denom = model.concentration() + Rat(static_cast<long>(i));
    p *= numer / denom;
    ++count[b];
  }
  return p;
}

CompareLawsReport compare_laws(const GeneralMixtureModel& model, std::size_t prefix_len,
                               std::size_t replicates, std::uint64_t seed) {
  const std::size_t m = model.num_bins();
  if (prefix_len < 1 || prefix_len > 4) {
    throw OutOfRangeError("compare_laws: prefix length must lie in [1, 4]");
  }
  double cells = 1.0;
  for (std::size_t i = 0; i < prefix_len; ++i) cells *= static_cast<double>(m);
  if (cells > 1e4) {
    throw OutOfRangeError("compare_laws: m^prefix_len exceeds the guard of 10^4");
  }
  if (replicates == 0) throw OutOfRangeError("compare_laws: at least one replicate required");

  const auto n_cells = static_cast<std::size_t>(cells);
  std::vector<std::size_t> urn_count(n_cells, 0);
  std::vector<std::size_t> hier_count(n_cells, 0);

  const auto cell_of = [&](const std::vector<std::size_t>& blocks) {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < prefix_len; ++i) idx = idx * m + blocks[i];
    return idx;
  };

  for (std::size_t r = 0; r < replicates; ++r) {
    ++urn_count[cell_of(sample_urn(model, prefix_len, seed + r).blocks)];
    ++hier_count[cell_of(sample_hierarchical(model, prefix_len, seed + replicates + r).blocks)];
  }

  CompareLawsReport report;
  report.prefix_len = prefix_len;
  report.replicates = replicates;
  report.mc_error_bound = std::sqrt(cells / static_cast<double>(replicates));
  report.rows.reserve(n_cells);

  double tv_urn = 0.0;
  double tv_hier = 0.0;
  std::vector<std::size_t> sequence(prefix_len, 0);
  for (std::size_t idx = 0; idx < n_cells; ++idx) {
    std::size_t rest = idx;
    for (std::size_t i = prefix_len; i-- > 0;) {
      sequence[i] = rest % m;
      rest /= m;
    }
    const Rat exact = exact_block_law(model, sequence);
    const double p_exact = to_double(exact);
    const double p_urn = static_cast<double>(urn_count[idx]) / static_cast<double>(replicates);
    const double p_hier = static_cast<double>(hier_count[idx]) / static_cast<double>(replicates);
    tv_urn += std::fabs(p_urn - p_exact);
    tv_hier += std::fabs(p_hier - p_exact);
    report.rows.push_back({sequence, exact, p_urn, p_hier});
  }
  report.tv_urn = tv_urn / 2.0;
  report.tv_hierarchical = tv_hier / 2.0;
  return report;
}

}  // namespace polya
