#pragma once

#include <cstddef>
#include <vector>

#include "banditlab/errors.hpp"
#include "banditlab/model.hpp"

namespace banditlab {

/// Per-arm pull counts N_t(a) and empirical means.
class ArmStatistics {
 public:
  explicit ArmStatistics(std::size_t num_arms = 0) : counts_(num_arms, 0), sums_(num_arms, 0.0) {}

  void record(ActionId a, double reward) {
    if (a >= counts_.size()) throw LookupError("unknown action id " + std::to_string(a));
    ++counts_[a];
    sums_[a] += reward;
    ++total_;
  }

  std::size_t num_arms() const { return counts_.size(); }
  std::size_t count(ActionId a) const { return counts_.at(a); }
  double sum(ActionId a) const { return sums_.at(a); }
  /// Zero for an unsampled arm.
  double mean(ActionId a) const { return counts_.at(a) == 0 ? 0.0 : sums_[a] / static_cast<double>(counts_[a]); }
  std::size_t total() const { return total_; }

 private:
  std::vector<std::size_t> counts_;
  std::vector<double> sums_;
  std::size_t total_ = 0;
};

}  // namespace banditlab
