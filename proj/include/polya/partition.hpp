#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "polya/measure.hpp"
#include "polya/rational.hpp"
#include "polya/state_space.hpp"

namespace polya {

// Set partition of a state space into nonempty blocks. Stored in
// restricted-growth canonical form: block 0 contains state 0, and each block
// index first appears exactly one past the largest index seen before it.
// Arbitrary labelings are canonicalized at construction.
class Partition {
 public:
  Partition(StateSpacePtr space, std::vector<std::size_t> block_of);

  static Partition trivial(StateSpacePtr space);   // one block
  static Partition discrete(StateSpacePtr space);  // singletons
  static Partition from_blocks(StateSpacePtr space,
                               const std::vector<std::vector<std::string>>& label_blocks);

  const StateSpacePtr& space() const { return space_; }
  std::size_t size() const { return block_of_.size(); }
  std::size_t num_blocks() const { return num_blocks_; }
  std::size_t block_of(std::size_t state) const { return block_of_.at(state); }
  const std::vector<std::size_t>& assignment() const { return block_of_; }

  // Members of each block in ascending state order.
  std::vector<std::vector<std::size_t>> members() const;

  bool operator==(const Partition& other) const {
    return *space_ == *other.space_ && block_of_ == other.block_of_;
  }

  // "{x1,x2}{x3}"
  std::string to_string() const;

 private:
  StateSpacePtr space_;
  std::vector<std::size_t> block_of_;
  std::size_t num_blocks_ = 0;
};

// Number of set partitions of k labeled elements, exact. k in [1, 20].
Int bell_number(int k);

// Visits the canonical assignment of every partition of {0..k-1} in
// lexicographic order. k in [1, 12].
void for_each_partition(std::size_t k,
                        const std::function<void(std::span<const std::size_t>)>& visit);

std::vector<Partition> enumerate_partitions(const StateSpacePtr& space);

// Kernel whose row at x is nu conditioned on the block containing x. Requires
// nu to put positive mass on every block.
template <class S>
Kernel<S> conditional_kernel(const Measure<S>& nu, const Partition& partition,
                             double tol = kDefaultTol) {
  require_same_space(nu.space(), partition.space());
  const auto blocks = partition.members();
  std::vector<Measure<S>> block_rows;
  block_rows.reserve(blocks.size());
  for (const auto& block : blocks) {
    block_rows.push_back(condition<S>(nu, block, tol));
  }
  std::vector<Measure<S>> rows;
  rows.reserve(nu.size());
  for (std::size_t x = 0; x < nu.size(); ++x) {
    rows.push_back(block_rows[partition.block_of(x)]);
  }
  return Kernel<S>(nu.space(), std::move(rows));
}

// Inverse of conditional_kernel: groups equal rows into blocks and accepts the
// grouping only if rebuilding the kernel from it reproduces every entry.
// Float mode groups rows by tolerance, so near-ties may merge; the round-trip
// check still decides acceptance. Requires strictly positive nu.
template <class S>
std::optional<Partition> recover_partition(const Measure<S>& nu, const Kernel<S>& kernel,
                                           double tol = kDefaultTol) {
  require_same_space(nu.space(), kernel.space());
  if (!nu.is_probability(tol) || !nu.strictly_positive()) {
    throw ValidationError("recover_partition: base measure must be a strictly positive probability measure");
  }
  const std::size_t k = nu.size();
  std::vector<std::size_t> block_of(k, 0);
  std::vector<std::size_t> reps;
  for (std::size_t x = 0; x < k; ++x) {
    bool placed = false;
    for (std::size_t b = 0; b < reps.size(); ++b) {
      if (kernel.row(x).equals(kernel.row(reps[b]), tol)) {
        block_of[x] = b;
        placed = true;
        break;
      }
    }
    if (!placed) {
      block_of[x] = reps.size();
      reps.push_back(x);
    }
  }
  Partition candidate(nu.space(), std::move(block_of));
  const Kernel<S> rebuilt = conditional_kernel<S>(nu, candidate, tol);
  if (!rebuilt.equals(kernel, tol)) return std::nullopt;
  return candidate;
}

}  // namespace polya
