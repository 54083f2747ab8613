#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "error.hpp"

namespace shom {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based stream keyed by (seed, stream index). Every frame gets its
/// own stream, so results do not depend on how frames are split over threads.
class StreamRng {
 public:
  using result_type = std::uint64_t;

  StreamRng(std::uint64_t seed, std::uint64_t stream) noexcept
      : state_(mix64(seed ^ mix64(stream + 0x9e3779b97f4a7c15ULL))) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n) noexcept {
    return std::min(n - 1, static_cast<std::size_t>(uniform() * static_cast<double>(n)));
  }

 private:
  std::uint64_t state_;
};

/// Inverse-CDF sampler for a small count distribution tabulated once.
class CountSampler {
 public:
  static CountSampler binomial(std::uint64_t trials, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("binomial probability outside [0, 1]");
    CountSampler s;
    if (p == 0.0 || trials == 0) {
      s.cdf_ = {1.0};
      return s;
    }
    if (p == 1.0) {
      s.cdf_.assign(trials + 1, 0.0);
      s.cdf_.back() = 1.0;
      return s;
    }
    double pmf = std::exp(static_cast<double>(trials) * std::log1p(-p));
    const double ratio = p / (1.0 - p);
    double acc = 0.0;
    for (std::uint64_t k = 0; k <= trials; ++k) {
      acc += pmf;
      s.cdf_.push_back(acc);
      if (acc >= 1.0 - 1e-16 && static_cast<double>(k) > p * static_cast<double>(trials)) break;
      pmf *= static_cast<double>(trials - k) / static_cast<double>(k + 1) * ratio;
    }
    return s;
  }

  static CountSampler poisson(double mean) {
    if (!(mean >= 0.0) || mean > 1e3) throw InvalidArgument("Poisson mean must lie in [0, 1000]");
    CountSampler s;
    if (mean == 0.0) {
      s.cdf_ = {1.0};
      return s;
    }
    double pmf = std::exp(-mean);
    double acc = 0.0;
    for (std::uint64_t k = 0;; ++k) {
      acc += pmf;
      s.cdf_.push_back(acc);
      if ((acc >= 1.0 - 1e-16 && static_cast<double>(k) > mean) || k > 100000) break;
      pmf *= mean / static_cast<double>(k + 1);
    }
    return s;
  }

  std::uint64_t sample(double u) const noexcept {
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) return cdf_.size() - 1;
    return static_cast<std::uint64_t>(it - cdf_.begin());
  }

  template <typename Rng>
  std::uint64_t operator()(Rng& rng) const noexcept {
    return sample(rng.uniform());
  }

  bool always_zero() const noexcept { return cdf_.size() == 1; }

 private:
  std::vector<double> cdf_;
};

/// Walker/Vose alias table: O(1) draws from a fixed discrete distribution.
class AliasTable {
 public:
  AliasTable() = default;

  explicit AliasTable(std::span<const double> weights) {
    const std::size_t n = weights.size();
    if (n == 0) throw InvalidArgument("alias table needs at least one weight");
    double total = 0.0;
    for (double w : weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidArgument("alias weights must be finite and >= 0");
      total += w;
    }
    if (!(total > 0.0)) throw InvalidArgument("alias weights sum to zero");

    prob_.assign(n, 1.0);
    alias_.resize(n);
    std::vector<double> scaled(n);
    std::vector<std::size_t> small, large;
    for (std::size_t i = 0; i < n; ++i) {
      alias_[i] = i;
      scaled[i] = weights[i] * static_cast<double>(n) / total;
      (scaled[i] < 1.0 ? small : large).push_back(i);
    }
    while (!small.empty() && !large.empty()) {
      const std::size_t s = small.back();
      small.pop_back();
      const std::size_t l = large.back();
      prob_[s] = scaled[s];
      alias_[s] = l;
      scaled[l] -= 1.0 - scaled[s];
      if (scaled[l] < 1.0) {
        large.pop_back();
        small.push_back(l);
      }
    }
    // Leftovers are 1 up to rounding.
    for (std::size_t i : small) prob_[i] = 1.0;
    for (std::size_t i : large) prob_[i] = 1.0;
  }

  std::size_t size() const noexcept { return prob_.size(); }

  template <typename Rng>
  std::size_t operator()(Rng& rng) const noexcept {
    const std::size_t column = rng.index(prob_.size());
    return rng.uniform() < prob_[column] ? column : alias_[column];
  }

 private:
  std::vector<double> prob_;
  std::vector<std::size_t> alias_;
};

}  // namespace shom
