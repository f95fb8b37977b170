#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

#include <Eigen/Core>

namespace banditlab {

/// SplitMix64 finalizer; used to derive independent substream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Counter-based seed derivation: the seed of a substream depends only on the
/// parent seed and the path of tags, never on execution order.
inline std::uint64_t derive_seed(std::uint64_t parent,
                                 std::initializer_list<std::uint64_t> tags) noexcept {
  std::uint64_t s = splitmix64(parent);
  for (std::uint64_t tag : tags) s = splitmix64(s ^ splitmix64(tag + 0x632BE59BD9B4E019ULL));
  return s;
}

/// Substream tags used by the simulation harness.
namespace stream {
inline constexpr std::uint64_t kTruth = 1;
inline constexpr std::uint64_t kActionSets = 2;
inline constexpr std::uint64_t kNoise = 3;
inline constexpr std::uint64_t kAgent = 4;
inline constexpr std::uint64_t kFeatures = 5;
inline constexpr std::uint64_t kFixedFeatures = 6;
inline constexpr std::uint64_t kTuning = 7;
inline constexpr std::uint64_t kAudit = 8;
}  // namespace stream

class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  double uniform() { return unit_(engine_); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit_(engine_); }
  double normal() { return normal_(engine_); }

  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }

  Eigen::VectorXd normal_vector(Eigen::Index n) {
    Eigen::VectorXd z(n);
    for (Eigen::Index i = 0; i < n; ++i) z[i] = normal();
    return z;
  }

  /// Inverse-CDF categorical draw; weights need not be normalized.
  std::size_t categorical(const Eigen::VectorXd& weights) {
    const double total = weights.sum();
    const double u = uniform() * total;
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
      if (weights[i] <= 0.0) continue;
      acc += weights[i];
      last_positive = static_cast<std::size_t>(i);
      if (u < acc) return last_positive;
    }
    return last_positive;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace banditlab
