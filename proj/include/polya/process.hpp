#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "polya/error.hpp"
#include "polya/measure.hpp"
#include "polya/rational.hpp"
#include "polya/rng.hpp"
#include "polya/state_space.hpp"

namespace polya {

// Finite sequence of state indices.
struct Trajectory {
  StateSpacePtr space;
  std::vector<std::size_t> values;

  Trajectory(StateSpacePtr s, std::vector<std::size_t> v)
      : space(std::move(s)), values(std::move(v)) {
    if (!space) throw ValidationError("trajectory: null state space");
    for (std::size_t x : values) {
      if (x >= space->size()) throw ValidationError("trajectory: state out of range");
    }
  }

  static Trajectory empty(StateSpacePtr s) { return Trajectory(std::move(s), {}); }
  std::size_t size() const { return values.size(); }
};

// a_n = n / (n + concentration), the mixing weight the urn form induces.
template <class S>
S mvps_coefficient(const S& concentration, std::size_t n) {
  if (!(concentration > S(0))) {
    throw ValidationError("mvps_coefficient: concentration must be positive");
  }
  if (n == 0) throw ValidationError("mvps_coefficient: n starts at 1");
  const S nn(static_cast<long>(n));
  return nn / (nn + concentration);
}

// Mixing coefficients a_1, a_2, ... for the predictive decomposition
// (1 - a_n) base + (a_n / n) sum of reinforcement rows. Either the closed
// form n / (n + concentration) or an explicit finite list. Every coefficient
// must lie strictly inside (0, 1): at 0 the history is ignored, at 1 the base
// measure drops out, and either endpoint breaks the positivity the
// characterization results lean on.
template <class S>
class CoefficientSequence {
 public:
  static CoefficientSequence closed_form(S concentration) {
    if (!(concentration > S(0))) {
      throw ValidationError("coefficients: concentration must be positive");
    }
    CoefficientSequence c;
    c.concentration_ = std::move(concentration);
    return c;
  }

  static CoefficientSequence from_list(std::vector<S> values) {
    if (values.empty()) throw ValidationError("coefficients: empty list");
    for (const S& a : values) {
      if (!(a > S(0)) || !(a < S(1))) {
        throw ValidationError("coefficients: every a_n must lie strictly inside (0, 1)");
      }
    }
    CoefficientSequence c;
    c.values_ = std::move(values);
    return c;
  }

  S at(std::size_t n) const {
    if (n == 0) throw ValidationError("coefficients: indexed from n = 1");
    if (concentration_) return mvps_coefficient(*concentration_, n);
    if (n > values_.size()) {
      throw HorizonExceededError("coefficients: horizon " + std::to_string(values_.size()) +
                                 " exceeded at n = " + std::to_string(n));
    }
    return values_[n - 1];
  }

  bool is_closed_form() const { return concentration_.has_value(); }
  const std::optional<S>& concentration() const { return concentration_; }

  // Largest usable n for explicit lists; nullopt for the closed form.
  std::optional<std::size_t> horizon() const {
    if (concentration_) return std::nullopt;
    return values_.size();
  }

 private:
  CoefficientSequence() = default;
  std::optional<S> concentration_;
  std::vector<S> values_;
};

// Urn model: concentration > 0, strictly positive probability base measure,
// and a finite reinforcement kernel over the same space. `balanced` records
// whether every reinforcement row is a probability measure.
template <class S>
struct MvpsSpec {
  S concentration;
  Measure<S> base_measure;
  Kernel<S> reinforcement;
  bool balanced;

  MvpsSpec(S concentration_in, Measure<S> base, Kernel<S> reinforcement_in,
           double tol = kDefaultTol)
      : concentration(std::move(concentration_in)),
        base_measure(std::move(base)),
        reinforcement(std::move(reinforcement_in)),
        balanced(false) {
    if (!(concentration > S(0))) {
      throw ValidationError("mvps: concentration must be positive");
    }
    require_same_space(base_measure.space(), reinforcement.space());
    if (!base_measure.is_probability(tol)) {
      throw ValidationError("mvps: base measure must be a probability measure");
    }
    if (!base_measure.strictly_positive()) {
      throw ValidationError("mvps: base measure must be strictly positive");
    }
    balanced = reinforcement.is_probability_kernel(tol);
  }
};

// Scales an equal-row-mass spec to row mass one. The predictive law is
// unchanged: numerator and denominator of the urn ratio pick up the same
// factor.
template <class S>
MvpsSpec<S> rebalance(const MvpsSpec<S>& spec, double tol = kDefaultTol) {
  const auto mass = spec.reinforcement.constant_row_mass(tol);
  if (!mass) throw NotConstantMassError("rebalance: reinforcement row masses differ");
  if (!(*mass > S(0))) throw NotConstantMassError("rebalance: zero row mass");
  if (scalar_traits<S>::eq(*mass, S(1), tol)) return spec;
  std::vector<Measure<S>> rows;
  rows.reserve(spec.reinforcement.size());
  for (std::size_t x = 0; x < spec.reinforcement.size(); ++x) {
    std::vector<S> w = spec.reinforcement.row(x).weights();
    for (S& v : w) v = v / *mass;
    rows.emplace_back(spec.reinforcement.space(), std::move(w));
  }
  return MvpsSpec<S>(spec.concentration / *mass, spec.base_measure,
                     Kernel<S>(spec.reinforcement.space(), std::move(rows)), tol);
}

// Sequence law given by its one-step-ahead conditionals. Three kinds:
//   Mvps            (c * base + sum rows) / (c + sum row masses)
//   Sufficientness  (1 - a_n) base + (a_n / n) sum rows
//   Iid             base, regardless of history
// Histories enter only through their length and accumulated reinforcement
// rows; predictive_from_sums evaluates straight from that summary.
template <class S>
class PredictiveFamily {
 public:
  enum class Kind { Mvps, Sufficientness, Iid };

  static PredictiveFamily mvps(MvpsSpec<S> spec) {
    PredictiveFamily f(Kind::Mvps, spec.base_measure, std::move(spec.reinforcement));
    f.concentration_ = std::move(spec.concentration);
    return f;
  }

  static PredictiveFamily sufficientness(Measure<S> base, Kernel<S> reinforcement,
                                         CoefficientSequence<S> coefficients,
                                         double tol = kDefaultTol) {
    require_same_space(base.space(), reinforcement.space());
    if (!base.is_probability(tol) || !base.strictly_positive()) {
      throw ValidationError("sufficientness: base measure must be a strictly positive probability measure");
    }
    if (!reinforcement.is_probability_kernel(tol)) {
      throw ValidationError("sufficientness: reinforcement rows must be probability measures");
    }
    PredictiveFamily f(Kind::Sufficientness, std::move(base), std::move(reinforcement));
    f.coefficients_ = std::move(coefficients);
    return f;
  }

  static PredictiveFamily iid(Measure<S> base, double tol = kDefaultTol) {
    if (!base.is_probability(tol) || !base.strictly_positive()) {
      throw ValidationError("iid: base measure must be a strictly positive probability measure");
    }
    return PredictiveFamily(Kind::Iid, std::move(base), std::nullopt);
  }

  Kind kind() const { return kind_; }
  const StateSpacePtr& space() const { return base_.space(); }
  const Measure<S>& base_measure() const { return base_; }
  bool has_reinforcement() const { return reinforcement_.has_value(); }

  const Kernel<S>& reinforcement() const {
    if (!reinforcement_) throw ValidationError("family has no reinforcement kernel");
    return *reinforcement_;
  }

  const std::optional<S>& concentration() const { return concentration_; }
  const std::optional<CoefficientSequence<S>>& coefficients() const { return coefficients_; }

  // Predictive after a history summarized by its length, the entrywise sum of
  // the reinforcement rows it accumulated, and the total mass of those rows.
  Measure<S> predictive_from_sums(std::size_t n, std::span<const S> row_sum,
                                  const S& row_mass_sum) const {
    const std::size_t k = base_.size();
    if (kind_ == Kind::Iid || n == 0) return base_;
    std::vector<S> w(k);
    if (kind_ == Kind::Mvps) {
      const S den = *concentration_ + row_mass_sum;
      for (std::size_t j = 0; j < k; ++j) {
        w[j] = (*concentration_ * base_[j] + row_sum[j]) / den;
      }
    } else {
      const S a = coefficients_->at(n);
      const S nn(static_cast<long>(n));
      for (std::size_t j = 0; j < k; ++j) {
        w[j] = (S(1) - a) * base_[j] + a * row_sum[j] / nn;
      }
    }
    return Measure<S>(base_.space(), std::move(w));
  }

  Measure<S> predictive(const Trajectory& history) const;
  S joint_probability(const Trajectory& t) const;
  S joint_probability(std::span<const std::size_t> values) const;

  // Draws n states; a seed fully determines the result. Each step inverts the
  // predictive CDF in state order at a 53-bit uniform. In exact mode the
  // comparison u < cdf is evaluated in rational arithmetic, so the draw has no
  // rounding step at all.
  Trajectory sample(std::size_t n, std::uint64_t seed) const;

 private:
  PredictiveFamily(Kind kind, Measure<S> base, std::optional<Kernel<S>> reinforcement)
      : kind_(kind), base_(std::move(base)), reinforcement_(std::move(reinforcement)) {}

  Kind kind_;
  Measure<S> base_;
  std::optional<Kernel<S>> reinforcement_;
  std::optional<S> concentration_;
  std::optional<CoefficientSequence<S>> coefficients_;
};

// Running history summary for one family: entrywise row sums and total row
// mass. push/pop make depth-first sweeps over histories cheap; in exact mode
// pop undoes push with no residue.
template <class S>
class HistoryAccumulator {
 public:
  explicit HistoryAccumulator(const PredictiveFamily<S>& family)
      : family_(&family), row_sum_(family.space()->size(), S(0)), mass_sum_(0), n_(0) {}

  void push(std::size_t state) {
    if (family_->has_reinforcement()) {
      const Measure<S>& row = family_->reinforcement().row(state);
      for (std::size_t j = 0; j < row_sum_.size(); ++j) row_sum_[j] += row[j];
      mass_sum_ += row.mass();
    }
    ++n_;
  }

  void pop(std::size_t state) {
    if (n_ == 0) throw ValidationError("history accumulator: pop on empty history");
    if (family_->has_reinforcement()) {
      const Measure<S>& row = family_->reinforcement().row(state);
      for (std::size_t j = 0; j < row_sum_.size(); ++j) row_sum_[j] -= row[j];
      mass_sum_ -= row.mass();
    }
    --n_;
  }

  std::size_t length() const { return n_; }

  Measure<S> predictive() const {
    return family_->predictive_from_sums(n_, row_sum_, mass_sum_);
  }

 private:
  const PredictiveFamily<S>* family_;
  std::vector<S> row_sum_;
  S mass_sum_;
  std::size_t n_;
};

// Inverse-CDF draw from a probability measure: smallest state whose cumulative
// weight exceeds the 53-bit uniform.
template <class S>
std::size_t sample_index(const Measure<S>& p, SplitMix64& rng) {
  if constexpr (scalar_traits<S>::exact) {
    const Rat u(Int(rng.bits53()), Int(1) << 53);
    Rat cum(0);
    for (std::size_t j = 0; j + 1 < p.size(); ++j) {
      cum += p[j];
      if (u < cum) return j;
    }
    return p.size() - 1;
  } else {
    const double u = rng.uniform();
    double cum = 0.0;
    for (std::size_t j = 0; j + 1 < p.size(); ++j) {
      cum += p[j];
      if (u < cum) return j;
    }
    return p.size() - 1;
  }
}

template <class S>
Measure<S> PredictiveFamily<S>::predictive(const Trajectory& history) const {
  require_same_space(space(), history.space);
  HistoryAccumulator<S> acc(*this);
  for (std::size_t x : history.values) acc.push(x);
  return acc.predictive();
}

template <class S>
S PredictiveFamily<S>::joint_probability(std::span<const std::size_t> values) const {
  HistoryAccumulator<S> acc(*this);
  S p(1);
  for (std::size_t x : values) {
    if (x >= space()->size()) throw ValidationError("joint_probability: state out of range");
    p *= acc.predictive()[x];
    acc.push(x);
  }
  return p;
}

template <class S>
S PredictiveFamily<S>::joint_probability(const Trajectory& t) const {
  require_same_space(space(), t.space);
  return joint_probability(std::span<const std::size_t>(t.values.data(), t.values.size()));
}

template <class S>
Trajectory PredictiveFamily<S>::sample(std::size_t n, std::uint64_t seed) const {
  SplitMix64 rng(seed);
  HistoryAccumulator<S> acc(*this);
  std::vector<std::size_t> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = sample_index<S>(acc.predictive(), rng);
    out.push_back(j);
    acc.push(j);
  }
  return Trajectory(space(), std::move(out));
}

}  // namespace polya
