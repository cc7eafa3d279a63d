#include "polya/state_space.hpp"

#include <unordered_set>

#include "polya/error.hpp"

namespace polya {

StateSpace::StateSpace(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw ValidationError("state space: at least one state required");
  std::unordered_set<std::string> seen;
  for (const auto& l : labels_) {
    if (l.empty()) throw ValidationError("state space: empty label");
    if (!seen.insert(l).second) throw ValidationError("state space: duplicate label '" + l + "'");
  }
}

std::shared_ptr<const StateSpace> StateSpace::make(std::vector<std::string> labels) {
  return std::make_shared<const StateSpace>(std::move(labels));
}

std::shared_ptr<const StateSpace> StateSpace::indexed(std::size_t k) {
  std::vector<std::string> labels;
  labels.reserve(k);
  for (std::size_t j = 0; j < k; ++j) labels.push_back("x" + std::to_string(j + 1));
  return make(std::move(labels));
}

std::size_t StateSpace::index_of(const std::string& label) const {
  for (std::size_t j = 0; j < labels_.size(); ++j) {
    if (labels_[j] == label) return j;
  }
  throw ValidationError("state space: unknown label '" + label + "'");
}

void require_same_space(const StateSpacePtr& a, const StateSpacePtr& b) {
  if (!a || !b) throw ValidationError("null state space");
  if (a == b) return;
  if (!(*a == *b)) throw ValidationError("state spaces differ");
}

}  // namespace polya
