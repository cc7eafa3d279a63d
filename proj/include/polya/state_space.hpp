#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

namespace polya {

// Ordered set of distinct state labels. States are addressed by index
// everywhere; labels exist for presentation and file formats.
class StateSpace {
 public:
  explicit StateSpace(std::vector<std::string> labels);

  static std::shared_ptr<const StateSpace> make(std::vector<std::string> labels);
  // Synthetic labels "x1".."xk".
  static std::shared_ptr<const StateSpace> indexed(std::size_t k);

  std::size_t size() const { return labels_.size(); }
  const std::string& label(std::size_t j) const { return labels_.at(j); }
  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t index_of(const std::string& label) const;

  bool operator==(const StateSpace& other) const { return labels_ == other.labels_; }

 private:
  std::vector<std::string> labels_;
};

using StateSpacePtr = std::shared_ptr<const StateSpace>;

// Same object or equal label sequences; throws ValidationError otherwise.
void require_same_space(const StateSpacePtr& a, const StateSpacePtr& b);

}  // namespace polya
