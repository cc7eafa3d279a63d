#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "polya/error.hpp"
#include "polya/rational.hpp"
#include "polya/state_space.hpp"

namespace polya {

// Finite nonnegative measure over a labeled state space. Weights are stored in
// state order; the total mass is computed once at construction. Immutable.
template <class S>
class Measure {
 public:
  Measure(StateSpacePtr space, std::vector<S> weights)
      : space_(std::move(space)), w_(std::move(weights)), mass_(0) {
    if (!space_) throw ValidationError("measure: null state space");
    if (w_.size() != space_->size()) {
      throw ValidationError("measure: expected " + std::to_string(space_->size()) +
                            " weights, got " + std::to_string(w_.size()));
    }
    for (const S& w : w_) {
      if (w < S(0)) throw ValidationError("measure: negative weight");
      mass_ += w;
    }
  }

  static Measure uniform(StateSpacePtr space) {
    const auto k = static_cast<long>(space->size());
    std::vector<S> w(space->size(), S(1) / S(k));
    return Measure(std::move(space), std::move(w));
  }

  static Measure dirac(StateSpacePtr space, std::size_t state) {
    if (state >= space->size()) throw ValidationError("dirac: state out of range");
    std::vector<S> w(space->size(), S(0));
    w[state] = S(1);
    return Measure(std::move(space), std::move(w));
  }

  const StateSpacePtr& space() const { return space_; }
  std::size_t size() const { return w_.size(); }
  const S& operator[](std::size_t state) const { return w_[state]; }
  const std::vector<S>& weights() const { return w_; }
  const S& mass() const { return mass_; }

  S mass_on(std::span<const std::size_t> states) const {
    S total(0);
    for (std::size_t j : states) total += w_.at(j);
    return total;
  }

  bool is_probability(double tol = kDefaultTol) const {
    return scalar_traits<S>::eq(mass_, S(1), tol);
  }

  bool strictly_positive() const {
    for (const S& w : w_) {
      if (!(w > S(0))) return false;
    }
    return true;
  }

  bool equals(const Measure& other, double tol = kDefaultTol) const {
    if (!(*space_ == *other.space_)) return false;
    for (std::size_t j = 0; j < w_.size(); ++j) {
      if (!scalar_traits<S>::eq(w_[j], other.w_[j], tol)) return false;
    }
    return true;
  }

 private:
  StateSpacePtr space_;
  std::vector<S> w_;
  S mass_;
};

// One measure per state, all over the same space. Rows need not be
// probabilities; is_probability_kernel() reports whether they all are.
template <class S>
class Kernel {
 public:
  Kernel(StateSpacePtr space, std::vector<Measure<S>> rows)
      : space_(std::move(space)), rows_(std::move(rows)) {
    if (!space_) throw ValidationError("kernel: null state space");
    if (rows_.size() != space_->size()) {
      throw ValidationError("kernel: one row per state required");
    }
    for (const auto& row : rows_) require_same_space(space_, row.space());
  }

  static Kernel identity(StateSpacePtr space) {
    std::vector<Measure<S>> rows;
    rows.reserve(space->size());
    for (std::size_t j = 0; j < space->size(); ++j) {
      rows.push_back(Measure<S>::dirac(space, j));
    }
    return Kernel(std::move(space), std::move(rows));
  }

  // Every row equal to the given measure.
  static Kernel constant(const Measure<S>& row) {
    std::vector<Measure<S>> rows(row.space()->size(), row);
    return Kernel(row.space(), std::move(rows));
  }

  const StateSpacePtr& space() const { return space_; }
  std::size_t size() const { return rows_.size(); }
  const Measure<S>& row(std::size_t state) const { return rows_.at(state); }
  const S& row_mass(std::size_t state) const { return rows_.at(state).mass(); }

  bool is_probability_kernel(double tol = kDefaultTol) const {
    for (const auto& row : rows_) {
      if (!row.is_probability(tol)) return false;
    }
    return true;
  }

  // Common row mass if all rows agree on it, nullopt otherwise.
  std::optional<S> constant_row_mass(double tol = kDefaultTol) const {
    const S& first = rows_.front().mass();
    for (const auto& row : rows_) {
      if (!scalar_traits<S>::eq(row.mass(), first, tol)) return std::nullopt;
    }
    return first;
  }

  bool rows_all_equal(const Measure<S>& m, double tol = kDefaultTol) const {
    for (const auto& row : rows_) {
      if (!row.equals(m, tol)) return false;
    }
    return true;
  }

  bool equals(const Kernel& other, double tol = kDefaultTol) const {
    if (rows_.size() != other.rows_.size()) return false;
    for (std::size_t j = 0; j < rows_.size(); ++j) {
      if (!rows_[j].equals(other.rows_[j], tol)) return false;
    }
    return true;
  }

 private:
  StateSpacePtr space_;
  std::vector<Measure<S>> rows_;
};

template <class S>
Measure<S> normalize(const Measure<S>& m) {
  if (!(m.mass() > S(0))) throw ZeroMassError("normalize: zero total mass");
  std::vector<S> w(m.size());
  for (std::size_t j = 0; j < m.size(); ++j) w[j] = m[j] / m.mass();
  return Measure<S>(m.space(), std::move(w));
}

// Restriction of a probability measure to a set of states, renormalized by the
// mass the set carries. States outside the set get weight zero.
template <class S>
Measure<S> condition(const Measure<S>& nu, std::span<const std::size_t> states,
                     double tol = kDefaultTol) {
  if (!nu.is_probability(tol)) {
    throw ValidationError("condition: input must be a probability measure");
  }
  if (states.empty()) throw ValidationError("condition: empty state set");
  std::vector<bool> member(nu.size(), false);
  for (std::size_t j : states) {
    if (j >= nu.size()) throw ValidationError("condition: state out of range");
    if (member[j]) throw ValidationError("condition: duplicate state in set");
    member[j] = true;
  }
  const S block_mass = nu.mass_on(states);
  if (!(block_mass > S(0))) {
    throw ZeroMassBlockError("condition: the set carries no mass");
  }
  std::vector<S> w(nu.size(), S(0));
  for (std::size_t j = 0; j < nu.size(); ++j) {
    if (member[j]) w[j] = nu[j] / block_mass;
  }
  return Measure<S>(nu.space(), std::move(w));
}

// Convex combination (1 - a) p + a q of two probability measures.
template <class S>
Measure<S> mix(const S& a, const Measure<S>& p, const Measure<S>& q, double tol = kDefaultTol) {
  require_same_space(p.space(), q.space());
  if (a < S(0) || a > S(1)) throw ValidationError("mix: weight must lie in [0, 1]");
  if (!p.is_probability(tol) || !q.is_probability(tol)) {
    throw ValidationError("mix: both inputs must be probability measures");
  }
  std::vector<S> w(p.size());
  for (std::size_t j = 0; j < p.size(); ++j) {
    w[j] = (S(1) - a) * p[j] + a * q[j];
  }
  return Measure<S>(p.space(), std::move(w));
}

// Left action (mu K)(z) = sum_y mu({y}) K_y({z}).
template <class S>
Measure<S> kernel_apply(const Kernel<S>& kernel, const Measure<S>& mu, double tol = kDefaultTol) {
  require_same_space(kernel.space(), mu.space());
  if (!kernel.is_probability_kernel(tol)) {
    throw ValidationError("kernel_apply: rows must be probability measures");
  }
  if (!mu.is_probability(tol)) {
    throw ValidationError("kernel_apply: input must be a probability measure");
  }
  std::vector<S> w(mu.size(), S(0));
  for (std::size_t y = 0; y < mu.size(); ++y) {
    if (!(mu[y] > S(0))) continue;
    const Measure<S>& row = kernel.row(y);
    for (std::size_t z = 0; z < mu.size(); ++z) {
      w[z] += mu[y] * row[z];
    }
  }
  return Measure<S>(mu.space(), std::move(w));
}

template <class S>
S total_variation(const Measure<S>& p, const Measure<S>& q, double tol = kDefaultTol) {
  require_same_space(p.space(), q.space());
  if (!p.is_probability(tol) || !q.is_probability(tol)) {
    throw ValidationError("total_variation: both inputs must be probability measures");
  }
  S sum(0);
  for (std::size_t j = 0; j < p.size(); ++j) {
    sum += scalar_traits<S>::abs(p[j] - q[j]);
  }
  return sum / S(2);
}

}  // namespace polya
