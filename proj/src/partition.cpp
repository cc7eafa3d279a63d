#include "polya/partition.hpp"

#include <algorithm>

#include "polya/error.hpp"

namespace polya {

Partition::Partition(StateSpacePtr space, std::vector<std::size_t> block_of)
    : space_(std::move(space)), block_of_(std::move(block_of)) {
  if (!space_) throw ValidationError("partition: null state space");
  if (block_of_.size() != space_->size()) {
    throw ValidationError("partition: one block index per state required");
  }
  // Canonicalize: relabel blocks by order of first appearance.
  std::vector<std::size_t> relabel;
  std::vector<std::size_t> seen_as(block_of_.size(), SIZE_MAX);
  for (std::size_t& b : block_of_) {
    if (b >= block_of_.size()) throw ValidationError("partition: block index out of range");
    if (seen_as[b] == SIZE_MAX) {
      seen_as[b] = relabel.size();
      relabel.push_back(b);
    }
    b = seen_as[b];
  }
  num_blocks_ = relabel.size();
}

Partition Partition::trivial(StateSpacePtr space) {
  std::vector<std::size_t> all_zero(space->size(), 0);
  return Partition(std::move(space), std::move(all_zero));
}

Partition Partition::discrete(StateSpacePtr space) {
  std::vector<std::size_t> each_own(space->size());
  for (std::size_t j = 0; j < each_own.size(); ++j) each_own[j] = j;
  return Partition(std::move(space), std::move(each_own));
}

Partition Partition::from_blocks(StateSpacePtr space,
                                 const std::vector<std::vector<std::string>>& label_blocks) {
  std::vector<std::size_t> block_of(space->size(), SIZE_MAX);
  for (std::size_t b = 0; b < label_blocks.size(); ++b) {
    if (label_blocks[b].empty()) throw ValidationError("partition: empty block");
    for (const auto& label : label_blocks[b]) {
      const std::size_t j = space->index_of(label);
      if (block_of[j] != SIZE_MAX) {
        throw ValidationError("partition: state '" + label + "' listed twice");
      }
      block_of[j] = b;
    }
  }
  for (std::size_t j = 0; j < block_of.size(); ++j) {
    if (block_of[j] == SIZE_MAX) {
      throw ValidationError("partition: state '" + space->label(j) + "' not covered");
    }
  }
  return Partition(std::move(space), std::move(block_of));
}

std::vector<std::vector<std::size_t>> Partition::members() const {
  std::vector<std::vector<std::size_t>> out(num_blocks_);
  for (std::size_t j = 0; j < block_of_.size(); ++j) {
    out[block_of_[j]].push_back(j);
  }
  return out;
}

std::string Partition::to_string() const {
  std::string out;
  for (const auto& block : members()) {
    out += "{";
    for (std::size_t i = 0; i < block.size(); ++i) {
      if (i) out += ",";
      out += space_->label(block[i]);
    }
    out += "}";
  }
  return out;
}

Int bell_number(int k) {
  if (k < 1 || k > 20) throw OutOfRangeError("bell_number: k must lie in [1, 20]");
  // B_k = sum_j (1/j!) sum_i (-1)^(j-i) C(j,i) i^k, exact integer arithmetic;
  // each inner sum is j! times the count of surjections-by-j parts divided out.
  Int total = 0;
  Int j_factorial = 1;
  for (int j = 0; j <= k; ++j) {
    if (j > 0) j_factorial *= j;
    Int inner = 0;
    Int binom = 1;  // C(j, i), updated incrementally over i
    for (int i = 0; i <= j; ++i) {
      if (i > 0) binom = binom * (j - i + 1) / i;
      const Int term = binom * boost::multiprecision::pow(Int(i), static_cast<unsigned>(k));
      if ((j - i) % 2 == 0) {
        inner += term;
      } else {
        inner -= term;
      }
    }
    if (inner % j_factorial != 0) {
      throw Error("bell_number: internal divisibility failure");
    }
    total += inner / j_factorial;
  }
  return total;
}

namespace {

void visit_assignments(std::vector<std::size_t>& a, std::size_t pos, std::size_t used,
                       const std::function<void(std::span<const std::size_t>)>& visit) {
  if (pos == a.size()) {
    visit(std::span<const std::size_t>(a.data(), a.size()));
    return;
  }
  for (std::size_t b = 0; b <= used; ++b) {
    a[pos] = b;
    visit_assignments(a, pos + 1, std::max(used, b + 1), visit);
  }
}

}  // namespace

void for_each_partition(std::size_t k,
                        const std::function<void(std::span<const std::size_t>)>& visit) {
  if (k < 1 || k > 12) throw OutOfRangeError("for_each_partition: k must lie in [1, 12]");
  std::vector<std::size_t> a(k, 0);
  // First position is pinned to block 0; the recursion keeps the
  // restricted-growth property, which makes the output lexicographic.
  visit_assignments(a, 1, 1, visit);
}

std::vector<Partition> enumerate_partitions(const StateSpacePtr& space) {
  std::vector<Partition> out;
  for_each_partition(space->size(), [&](std::span<const std::size_t> a) {
    out.emplace_back(space, std::vector<std::size_t>(a.begin(), a.end()));
  });
  return out;
}

}  // namespace polya
