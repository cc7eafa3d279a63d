#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <type_traits>
#include <utility>
#include <vector>

#include "polya/error.hpp"
#include "polya/measure.hpp"
#include "polya/partition.hpp"
#include "polya/process.hpp"
#include "polya/rational.hpp"

namespace polya {

namespace detail {

// Every exhaustive sweep below visits at most k^L histories.
inline void require_enumeration_feasible(std::size_t k, std::size_t len, const char* what) {
  double total = 1.0;
  for (std::size_t i = 0; i < len; ++i) {
    total *= static_cast<double>(k);
    if (total > 1e7) {
      throw OutOfRangeError(std::string(what) + ": k^L exceeds the enumeration guard of 10^7");
    }
  }
}

}  // namespace detail

template <class S>
struct SwapCounterexample {
  Trajectory trajectory;  // lexicographically smaller trajectory of the violating pair
  std::size_t position;   // the swap exchanges entries position and position + 1
  S p_original;
  S p_swapped;
};

template <class S>
struct ExchangeabilityReport {
  bool exchangeable = true;
  std::size_t max_length_checked = 0;
  std::optional<SwapCounterexample<S>> counterexample;
};

// Exhaustive adjacent-transposition sweep: for every trajectory of length
// 2..max_len and every adjacent pair, the joint probability must survive the
// swap. The swapped trajectory is re-evaluated from scratch rather than
// patched, so nothing about order-insensitivity is assumed. Lengths ascend
// and trajectories are visited lexicographically; the first violation wins.
template <class S>
ExchangeabilityReport<S> check_exchangeable(const PredictiveFamily<S>& family,
                                            std::size_t max_len, double tol = kDefaultTol) {
  const std::size_t k = family.space()->size();
  detail::require_enumeration_feasible(k, max_len, "check_exchangeable");
  ExchangeabilityReport<S> report;
  report.max_length_checked = max_len;

  std::vector<std::size_t> t;
  std::vector<S> prefix;  // prefix[i] = joint probability of t[0..i]
  HistoryAccumulator<S> acc(family);
  std::optional<SwapCounterexample<S>> found;

  auto dfs = [&](auto&& self, std::size_t len) -> bool {
    if (t.size() == len) {
      for (std::size_t i = 0; i + 1 < len; ++i) {
        if (!(t[i] < t[i + 1])) continue;  // equal entries swap to themselves
        std::vector<std::size_t> swapped(t);
        std::swap(swapped[i], swapped[i + 1]);
        const S p_swapped = family.joint_probability(swapped);
        if (!scalar_traits<S>::eq(prefix.back(), p_swapped, tol)) {
          found = SwapCounterexample<S>{Trajectory(family.space(), t), i, prefix.back(),
                                        p_swapped};
          return true;
        }
      }
      return false;
    }
    const Measure<S> pred = acc.predictive();
    for (std::size_t j = 0; j < k; ++j) {
      const S p_next = prefix.empty() ? pred[j] : S(prefix.back() * pred[j]);
      t.push_back(j);
      prefix.push_back(p_next);
      acc.push(j);
      const bool hit = self(self, len);
      acc.pop(j);
      prefix.pop_back();
      t.pop_back();
      if (hit) return true;
    }
    return false;
  };

  for (std::size_t len = 2; len <= max_len; ++len) {
    if (dfs(dfs, len)) {
      report.exchangeable = false;
      report.max_length_checked = len;
      report.counterexample = std::move(found);
      break;
    }
  }
  return report;
}

// Largest violation of base({x}) row_x({y}) == base({y}) row_y({x}) over all
// state pairs. Zero for conditional kernels built from the same base measure.
template <class S>
S check_detailed_balance(const Measure<S>& base, const Kernel<S>& kernel,
                         double tol = kDefaultTol) {
  require_same_space(base.space(), kernel.space());
  if (!base.is_probability(tol)) {
    throw ValidationError("check_detailed_balance: base must be a probability measure");
  }
  if (!kernel.is_probability_kernel(tol)) {
    throw ValidationError("check_detailed_balance: rows must be probability measures");
  }
  S worst(0);
  for (std::size_t x = 0; x < base.size(); ++x) {
    for (std::size_t y = x + 1; y < base.size(); ++y) {
      const S diff = scalar_traits<S>::abs(base[x] * kernel.row(x)[y] -
                                           base[y] * kernel.row(y)[x]);
      if (diff > worst) worst = diff;
    }
  }
  return worst;
}

// (a2 - 2 a1 + a1 a2) / (a1 a2). Zero exactly when a1, a2 fit the closed form
// n / (n + concentration) for one shared concentration.
template <class S>
S coefficient_defect(const S& a1, const S& a2) {
  if (!(a1 > S(0)) || !(a1 < S(1)) || !(a2 > S(0)) || !(a2 < S(1))) {
    throw ValidationError("coefficient_defect: coefficients must lie strictly inside (0, 1)");
  }
  return (a2 - S(2) * a1 + a1 * a2) / (a1 * a2);
}

// Largest violation of the two-step identity
//   sum_y row_x({y}) row_y({z}) == (1 - defect) row_x({z}) + defect base({z})
// over states x with positive base mass and all z.
template <class S>
S check_kernel_identity(const Measure<S>& base, const Kernel<S>& kernel, const S& defect,
                        double tol = kDefaultTol) {
  require_same_space(base.space(), kernel.space());
  if (!base.is_probability(tol)) {
    throw ValidationError("check_kernel_identity: base must be a probability measure");
  }
  if (!kernel.is_probability_kernel(tol)) {
    throw ValidationError("check_kernel_identity: rows must be probability measures");
  }
  const std::size_t k = base.size();
  S worst(0);
  for (std::size_t x = 0; x < k; ++x) {
    if (!(base[x] > S(0))) continue;
    for (std::size_t z = 0; z < k; ++z) {
      S two_step(0);
      for (std::size_t y = 0; y < k; ++y) {
        two_step += kernel.row(x)[y] * kernel.row(y)[z];
      }
      const S target = (S(1) - defect) * kernel.row(x)[z] + defect * base[z];
      const S diff = scalar_traits<S>::abs(two_step - target);
      if (diff > worst) worst = diff;
    }
  }
  return worst;
}

// Unique solution a_n of the two-step recursion given a_1 and the defect:
// a_n = n / ((n - 1)(1 - defect) + 1/a_1). Defect 1 admits no sequence that
// stays inside (0, 1); a nonpositive denominator means the same for this n.
template <class S>
S coefficient_solution(const S& a1, const S& defect, std::size_t n, double tol = kDefaultTol) {
  if (!(a1 > S(0)) || !(a1 < S(1))) {
    throw ValidationError("coefficient_solution: a_1 must lie strictly inside (0, 1)");
  }
  if (n == 0) throw ValidationError("coefficient_solution: n starts at 1");
  if (scalar_traits<S>::eq(defect, S(1), tol)) {
    throw DegenerateError("coefficient_solution: defect 1 forces a_n = n a_1, which leaves (0, 1)");
  }
  const S den = S(static_cast<long>(n - 1)) * (S(1) - defect) + S(1) / a1;
  if (!(den > S(0))) {
    throw DegenerateError("coefficient_solution: nonpositive denominator at n = " +
                          std::to_string(n));
  }
  return S(static_cast<long>(n)) / den;
}

enum class CharacterizationVerdict { Mvps, NonExchangeable, NotSufficientnessForm };

template <class S>
struct CoefficientTraceRow {
  std::size_t n;
  S observed;
  S forced;  // n / (concentration_hat + n)
};

template <class S>
struct CharacterizationResult {
  CharacterizationVerdict verdict;
  std::optional<S> concentration_hat;
  std::vector<CoefficientTraceRow<S>> coefficient_trace;
  std::optional<SwapCounterexample<S>> counterexample;
  // Reinforcement rows all equal the base measure. Such a family is i.i.d.
  // under any coefficient sequence, so the coefficients are unidentified and
  // the trace reports the closed form derived from a_1 as the representative.
  bool iid_degenerate = false;
};

// Decides whether the family is an exchangeable urn process. Exchangeability
// is swept exhaustively up to max_len; if it holds, the stated coefficients
// must match the closed form n / (concentration_hat + n) pinned down by a_1.
// Families stated in i.i.d. form carry no coefficients to interrogate and are
// rejected as input.
template <class S>
CharacterizationResult<S> characterize(const PredictiveFamily<S>& family, std::size_t max_len,
                                       double tol = kDefaultTol) {
  using Kind = typename PredictiveFamily<S>::Kind;
  if (family.kind() == Kind::Iid) {
    throw ValidationError("characterize: family must be stated in urn or sufficientness form");
  }
  if (max_len < 2) {
    throw ValidationError("characterize: max_len must be at least 2");
  }
  CharacterizationResult<S> result{};
  auto exch = check_exchangeable(family, max_len, tol);
  if (!exch.exchangeable) {
    result.verdict = CharacterizationVerdict::NonExchangeable;
    result.counterexample = std::move(exch.counterexample);
    return result;
  }

  std::vector<S> observed;
  for (std::size_t n = 1; n < max_len; ++n) {
    if (family.kind() == Kind::Mvps) {
      observed.push_back(mvps_coefficient(*family.concentration(), n));
    } else {
      observed.push_back(family.coefficients()->at(n));
    }
  }
  const S a1 = observed.front();
  const S concentration_hat = S(1) / a1 - S(1);

  bool all_match = true;
  result.coefficient_trace.reserve(observed.size());
  for (std::size_t n = 1; n <= observed.size(); ++n) {
    const S nn(static_cast<long>(n));
    const S forced = nn / (concentration_hat + nn);
    if (!scalar_traits<S>::eq(observed[n - 1], forced, tol)) all_match = false;
    result.coefficient_trace.push_back({n, observed[n - 1], forced});
  }

  result.iid_degenerate = family.reinforcement().rows_all_equal(family.base_measure(), tol);

  if (all_match) {
    result.verdict = CharacterizationVerdict::Mvps;
    result.concentration_hat = concentration_hat;
  } else if (result.iid_degenerate) {
    result.verdict = CharacterizationVerdict::Mvps;
    result.concentration_hat = concentration_hat;
    for (auto& row : result.coefficient_trace) row.observed = row.forced;
  } else {
    result.verdict = CharacterizationVerdict::NotSufficientnessForm;
  }
  return result;
}

template <class S>
struct SufficientnessCounterexample {
  std::size_t state;  // the state whose predictive mass differs
  Trajectory history_a;
  Trajectory history_b;
  S mass_a;
  S mass_b;
};

template <class S>
struct SufficientnessReport {
  bool holds = true;
  std::size_t max_length_checked = 0;
  std::optional<SufficientnessCounterexample<S>> counterexample;
};

namespace detail {

// Shared sweep: visits every history of length 0..max_len in prefix
// lexicographic order and requires the predictive mass at each state to agree
// across histories with equal group keys. KeyFn(state, history length,
// block counts) -> key.
template <class S, class KeyFn>
SufficientnessReport<S> sweep_predictive_groups(const PredictiveFamily<S>& family,
                                                const Partition& partition,
                                                std::size_t max_len, double tol,
                                                KeyFn&& key_of, const char* what) {
  require_same_space(family.space(), partition.space());
  const std::size_t k = family.space()->size();
  detail::require_enumeration_feasible(k, max_len, what);

  SufficientnessReport<S> report;
  report.max_length_checked = max_len;

  using Key = std::decay_t<decltype(key_of(std::size_t(0), std::size_t(0),
                                            std::declval<const std::vector<std::size_t>&>()))>;
  std::map<Key, std::pair<S, std::vector<std::size_t>>> first_seen;

  std::vector<std::size_t> t;
  std::vector<std::size_t> block_count(partition.num_blocks(), 0);
  HistoryAccumulator<S> acc(family);
  std::optional<SufficientnessCounterexample<S>> found;

  auto dfs = [&](auto&& self) -> bool {
    const Measure<S> pred = acc.predictive();
    for (std::size_t j = 0; j < k; ++j) {
      Key key = key_of(j, t.size(), block_count);
      auto it = first_seen.find(key);
      if (it == first_seen.end()) {
        first_seen.emplace(std::move(key), std::make_pair(pred[j], t));
      } else if (!scalar_traits<S>::eq(it->second.first, pred[j], tol)) {
        found = SufficientnessCounterexample<S>{
            j, Trajectory(family.space(), it->second.second),
            Trajectory(family.space(), t), it->second.first, pred[j]};
        return true;
      }
    }
    if (t.size() == max_len) return false;
    for (std::size_t j = 0; j < k; ++j) {
      t.push_back(j);
      ++block_count[partition.block_of(j)];
      acc.push(j);
      const bool hit = self(self);
      acc.pop(j);
      --block_count[partition.block_of(j)];
      t.pop_back();
      if (hit) return true;
    }
    return false;
  };

  if (dfs(dfs)) {
    report.holds = false;
    report.counterexample = std::move(found);
  }
  return report;
}

}  // namespace detail

// Sufficientness in Johnson's sense, relative to a partition: after any two
// histories of equal length in which the block containing state x was hit
// equally often, the predictive mass at x must agree. Exhaustive over
// histories of length 0..max_len.
template <class S>
SufficientnessReport<S> check_johnson_sufficientness(const PredictiveFamily<S>& family,
                                                     const Partition& partition,
                                                     std::size_t max_len,
                                                     double tol = kDefaultTol) {
  return detail::sweep_predictive_groups<S>(
      family, partition, max_len, tol,
      [&](std::size_t j, std::size_t n, const std::vector<std::size_t>& counts) {
        return std::make_tuple(n, j, counts[partition.block_of(j)]);
      },
      "check_johnson_sufficientness");
}

// Stronger grouping: the predictive mass at x may depend on the history only
// through the ratio (w_bar_l + n_l) / (w_bar + n) for x's block l, where w is
// a strictly positive state weighting, pooled across all history lengths.
// In float mode the ratio is bucketed at the tolerance, so distinct ratios
// within tol of each other share a group.
template <class S>
SufficientnessReport<S> check_hill_sufficientness(const PredictiveFamily<S>& family,
                                                  std::span<const S> state_weights,
                                                  const Partition& partition,
                                                  std::size_t max_len,
                                                  double tol = kDefaultTol) {
  if (state_weights.size() != family.space()->size()) {
    throw ValidationError("check_hill_sufficientness: one weight per state required");
  }
  S weight_total(0);
  for (const S& w : state_weights) {
    if (!(w > S(0))) {
      throw ValidationError("check_hill_sufficientness: weights must be strictly positive");
    }
    weight_total += w;
  }
  std::vector<S> block_weight(partition.num_blocks(), S(0));
  for (std::size_t j = 0; j < state_weights.size(); ++j) {
    block_weight[partition.block_of(j)] += state_weights[j];
  }

  auto ratio_key = [&](std::size_t j, std::size_t n,
                       const std::vector<std::size_t>& counts) {
    const std::size_t l = partition.block_of(j);
    const S ratio = (block_weight[l] + S(static_cast<long>(counts[l]))) /
                    (weight_total + S(static_cast<long>(n)));
    if constexpr (scalar_traits<S>::exact) {
      return std::make_pair(j, ratio);
    } else {
      return std::make_pair(j, static_cast<long long>(std::llround(ratio / tol)));
    }
  };
  return detail::sweep_predictive_groups<S>(family, partition, max_len, tol, ratio_key,
                                            "check_hill_sufficientness");
}

// Common predictive mass of block `block` across every history of length
// `length` that hit the block exactly `block_count` times. Throws
// NotSufficientError if two such histories disagree, ValidationError if no
// history qualifies.
template <class S>
S block_predictive_mass(const PredictiveFamily<S>& family, const Partition& partition,
                        std::size_t block, std::size_t length, std::size_t block_count,
                        double tol = kDefaultTol) {
  require_same_space(family.space(), partition.space());
  if (block >= partition.num_blocks()) {
    throw ValidationError("block_predictive_mass: block out of range");
  }
  if (block_count > length) {
    throw ValidationError("block_predictive_mass: block count exceeds history length");
  }
  const std::size_t k = family.space()->size();
  detail::require_enumeration_feasible(k, length, "block_predictive_mass");
  const auto blocks = partition.members();
  const auto& block_states = blocks[block];

  std::optional<std::pair<S, std::vector<std::size_t>>> first;
  std::vector<std::size_t> t;
  std::size_t hits = 0;
  HistoryAccumulator<S> acc(family);
  std::optional<std::string> mismatch;

  auto dfs = [&](auto&& self) -> bool {
    if (t.size() == length) {
      if (hits != block_count) return false;
      const Measure<S> pred = acc.predictive();
      S mass(0);
      for (std::size_t j : block_states) mass += pred[j];
      if (!first) {
        first = std::make_pair(std::move(mass), t);
        return false;
      }
      if (!scalar_traits<S>::eq(first->first, mass, tol)) {
        mismatch = "block_predictive_mass: block " + std::to_string(block) + " has mass " +
                   scalar_traits<S>::str(first->first) + " after one history of length " +
                   std::to_string(length) + " with " + std::to_string(block_count) +
                   " hits but " + scalar_traits<S>::str(mass) + " after another";
        return true;
      }
      return false;
    }
    // Prune histories that can no longer reach the requested hit count.
    const std::size_t remaining = length - t.size();
    if (hits > block_count || hits + remaining < block_count) return false;
    for (std::size_t j = 0; j < k; ++j) {
      const bool in_block = partition.block_of(j) == block;
      t.push_back(j);
      if (in_block) ++hits;
      acc.push(j);
      const bool hit = self(self);
      acc.pop(j);
      if (in_block) --hits;
      t.pop_back();
      if (hit) return true;
    }
    return false;
  };

  dfs(dfs);
  if (mismatch) throw NotSufficientError(*mismatch);
  if (!first) {
    throw ValidationError("block_predictive_mass: no history of length " +
                          std::to_string(length) + " hits block " + std::to_string(block) +
                          " exactly " + std::to_string(block_count) + " times");
  }
  return first->first;
}

// True iff every trajectory of length 1..max_len has the product law of the
// base measure.
template <class S>
bool check_iid_degenerate(const PredictiveFamily<S>& family, std::size_t max_len,
                          double tol = kDefaultTol) {
  const std::size_t k = family.space()->size();
  detail::require_enumeration_feasible(k, max_len, "check_iid_degenerate");
  const Measure<S>& base = family.base_measure();

  std::vector<std::size_t> t;
  std::vector<S> joint_prefix;
  std::vector<S> iid_prefix;
  HistoryAccumulator<S> acc(family);

  auto dfs = [&](auto&& self) -> bool {  // returns true on violation
    if (!t.empty() &&
        !scalar_traits<S>::eq(joint_prefix.back(), iid_prefix.back(), tol)) {
      return true;
    }
    if (t.size() == max_len) return false;
    const Measure<S> pred = acc.predictive();
    for (std::size_t j = 0; j < k; ++j) {
      joint_prefix.push_back(joint_prefix.empty() ? pred[j] : S(joint_prefix.back() * pred[j]));
      iid_prefix.push_back(iid_prefix.empty() ? base[j] : S(iid_prefix.back() * base[j]));
      t.push_back(j);
      acc.push(j);
      const bool bad = self(self);
      acc.pop(j);
      t.pop_back();
      iid_prefix.pop_back();
      joint_prefix.pop_back();
      if (bad) return true;
    }
    return false;
  };

  return !dfs(dfs);
}

}  // namespace polya
