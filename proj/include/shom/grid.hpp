#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "constants.hpp"
#include "error.hpp"

namespace shom {

/// Uniform grid of spectrometer bins. Stored in meters; the nm accessors are
/// the public-facing convention.
class WavelengthGrid {
 public:
  WavelengthGrid(double start_m, double step_m, std::size_t n_bins)
      : start_(start_m), step_(step_m), n_(n_bins) {
    if (!(step_m > 0.0) || !std::isfinite(step_m))
      throw InvalidArgument("wavelength grid step must be positive");
    if (n_bins < 2) throw InvalidArgument("wavelength grid needs at least 2 bins");
    if (!(start_m > 0.0)) throw InvalidArgument("wavelength grid start must be positive");
  }

  /// Grid whose first and last bin centers are `first_nm` and `last_nm`.
  static WavelengthGrid spanning_nm(double first_nm, double last_nm, std::size_t n_bins) {
    if (n_bins < 2) throw InvalidArgument("wavelength grid needs at least 2 bins");
    return {first_nm * units::nm, (last_nm - first_nm) / static_cast<double>(n_bins - 1) * units::nm,
            n_bins};
  }

  /// 140 bins over 790-803 nm, one per camera pixel column.
  static WavelengthGrid camera_default() { return spanning_nm(790.0, 803.0, 140); }

  double start() const noexcept { return start_; }
  double step() const noexcept { return step_; }
  std::size_t size() const noexcept { return n_; }

  double center(std::size_t i) const noexcept { return start_ + static_cast<double>(i) * step_; }
  double center_nm(std::size_t i) const noexcept { return center(i) / units::nm; }
  double step_nm() const noexcept { return step_ / units::nm; }
  double last() const noexcept { return center(n_ - 1); }

  std::vector<double> centers() const {
    std::vector<double> out(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = center(i);
    return out;
  }

  /// Index of the bin whose center is closest to `lambda_m`, clamped to the grid.
  std::size_t nearest_bin(double lambda_m) const noexcept {
    const double k = std::round((lambda_m - start_) / step_);
    if (k <= 0.0) return 0;
    if (k >= static_cast<double>(n_ - 1)) return n_ - 1;
    return static_cast<std::size_t>(k);
  }

  /// Grid with `factor` sub-bins per bin; sub-bin centers tile each parent bin.
  WavelengthGrid refined(std::size_t factor) const {
    if (factor == 0) throw InvalidArgument("refinement factor must be >= 1");
    const double sub = step_ / static_cast<double>(factor);
    const double first = start_ - 0.5 * step_ + 0.5 * sub;
    return {first, sub, n_ * factor};
  }

  bool operator==(const WavelengthGrid&) const = default;

 private:
  double start_;
  double step_;
  std::size_t n_;
};

inline bool same_grid(const WavelengthGrid& a, const WavelengthGrid& b, double rel_tol = 1e-12) {
  return a.size() == b.size() && std::abs(a.start() - b.start()) <= rel_tol * a.start() &&
         std::abs(a.step() - b.step()) <= rel_tol * a.step();
}

}  // namespace shom
