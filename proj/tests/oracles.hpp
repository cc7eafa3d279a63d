#pragma once

// Hand-rolled reference implementations, kept deliberately independent of the
// library code paths they are used to check.

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "polya/partition.hpp"
#include "polya/rational.hpp"

namespace oracles {

// Bell numbers via the Bell triangle, nothing shared with bell_number().
inline polya::Int bell_triangle(std::size_t k) {
  std::vector<polya::Int> row{1};
  for (std::size_t i = 1; i < k; ++i) {
    std::vector<polya::Int> next{row.back()};
    for (const auto& v : row) next.push_back(next.back() + v);
    row = std::move(next);
  }
  return row.back();
}

// Blackwell-MacQueen joint law: each step multiplies
// (theta nu(x_i) + #previous hits of x_i) / (theta + i).
inline polya::Rat dp_joint(const polya::Rat& theta, std::span<const polya::Rat> nu,
                           std::span<const std::size_t> traj) {
  polya::Rat p(1);
  std::vector<std::size_t> hits(nu.size(), 0);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    p *= (theta * nu[traj[i]] + polya::Rat(hits[traj[i]])) / (theta + polya::Rat(i));
    ++hits[traj[i]];
  }
  return p;
}

// Closed form for the partition model: within-block labels are independent
// draws from nu conditioned on the block, and the block sequence follows a
// Polya urn over blocks with starting weights theta nu(D_l).
inline polya::Rat partition_joint(const polya::Rat& theta, std::span<const polya::Rat> nu,
                                  const polya::Partition& part,
                                  std::span<const std::size_t> traj) {
  std::vector<polya::Rat> block_mass(part.num_blocks(), polya::Rat(0));
  for (std::size_t x = 0; x < nu.size(); ++x) block_mass[part.block_of(x)] += nu[x];

  polya::Rat p(1);
  std::vector<std::size_t> hits(part.num_blocks(), 0);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const std::size_t b = part.block_of(traj[i]);
    p *= nu[traj[i]] / block_mass[b];
    p *= (theta * block_mass[b] + polya::Rat(hits[b])) / (theta + polya::Rat(i));
    ++hits[b];
  }
  return p;
}

// All trajectories of a given length over k states, lexicographic.
inline std::vector<std::vector<std::size_t>> all_words(std::size_t k, std::size_t len) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> word(len, 0);
  while (true) {
    out.push_back(word);
    std::size_t pos = len;
    while (pos > 0 && word[pos - 1] == k - 1) word[--pos] = 0;
    if (pos == 0) break;
    ++word[pos - 1];
  }
  return out;
}

}  // namespace oracles
