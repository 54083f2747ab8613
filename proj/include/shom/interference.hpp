#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string_view>
#include <vector>

#include "error.hpp"
#include "grid.hpp"
#include "matrix.hpp"
#include "parallel.hpp"
#include "spectra.hpp"
#include "vapor.hpp"

namespace shom {

enum class MapKind { probability, covariance, raw, accidental, variance };

inline std::string_view to_string(MapKind kind) {
  switch (kind) {
    case MapKind::probability: return "probability";
    case MapKind::covariance: return "covariance";
    case MapKind::raw: return "raw";
    case MapKind::accidental: return "accidental";
    case MapKind::variance: return "variance";
  }
  return "unknown";
}

inline std::optional<MapKind> map_kind_from_string(std::string_view s) {
  for (MapKind k : {MapKind::probability, MapKind::covariance, MapKind::raw, MapKind::accidental,
                    MapKind::variance})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

/// Real matrix over (lambda_plus, lambda_minus). For kind == probability the
/// values are densities per nm^2; for the frame estimators they are per-frame
/// expectations per bin pair.
struct CoincidenceMap {
  WavelengthGrid grid_p;
  WavelengthGrid grid_m;
  Matrix<double> values;
  MapKind kind = MapKind::probability;
  std::uint64_t n_frames = 0;  // frames behind an estimate; 0 for theory maps

  double bin_area_nm2() const noexcept { return grid_p.step_nm() * grid_m.step_nm(); }

  double sum() const {
    double s = 0.0;
    for (double v : values.flat()) s += v;
    return s;
  }

  /// Integrated probability, sum of values times bin area.
  double total_probability() const { return sum() * bin_area_nm2(); }
};

/// Fringe contrast and the residual idler delay left after compensation.
struct InterferenceSettings {
  double visibility = 1.0;
  double residual_delay = 0.0;  // s

  InterferenceSettings() = default;
  InterferenceSettings(double v, double delay_s = 0.0) : visibility(v), residual_delay(delay_s) {
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("visibility must lie in [0, 1]");
  }
};

namespace detail {

inline void require_square(const JointSpectralAmplitude& jsa) {
  if (!jsa.square()) throw GridMismatch("two-photon interference needs identical signal and idler grids");
}

inline CoincidenceMap empty_map_like(const JointSpectralAmplitude& jsa) {
  return {jsa.grid_s, jsa.grid_i, Matrix<double>(jsa.grid_s.size(), jsa.grid_i.size()),
          MapKind::probability, 0};
}

template <typename Combine>
CoincidenceMap exchange_map(const JointSpectralAmplitude& jsa, Combine combine) {
  require_square(jsa);
  CoincidenceMap out = empty_map_like(jsa);
  const auto& psi = jsa.amplitude;
  const std::size_t n = psi.rows();
  parallel_for(n, [&](std::size_t a) {
    for (std::size_t b = 0; b < n; ++b) out.values(a, b) = 0.25 * std::norm(combine(psi(a, b), psi(b, a)));
  });
  return out;
}

/// Total signal-side phase: Lorentzian phase plus the linear term of a residual delay.
inline std::vector<double> total_signal_phase(const WavelengthGrid& grid, const DispersionModel& model,
                                              double residual_delay) {
  std::vector<double> phase(grid.size());
  for (std::size_t a = 0; a < grid.size(); ++a) {
    const double lambda = grid.center(a);
    phase[a] = spectral_phase(model, lambda) + angular_frequency(lambda) * residual_delay;
  }
  return phase;
}

inline void require_real_symmetric(const JointSpectralAmplitude& jsa) {
  require_square(jsa);
  double scale = 0.0;
  for (const Complex& v : jsa.amplitude.flat()) scale = std::max(scale, std::abs(v));
  const double tol = 1e-12 * scale;
  const auto& m = jsa.amplitude;
  for (std::size_t a = 0; a < m.rows(); ++a)
    for (std::size_t b = 0; b < m.cols(); ++b) {
      if (std::abs(m(a, b).imag()) > tol)
        throw NonRealAmplitude("cosine form needs a real amplitude without applied phase");
      if (std::abs(m(a, b).real() - m(b, a).real()) > tol)
        throw InvalidArgument("cosine form needs an exchange-symmetric amplitude");
    }
}

/// 0.5 (1 + sign V cos(phi_a - phi_b)) |Psi|^2.
inline CoincidenceMap cosine_map(const JointSpectralAmplitude& jsa, const DispersionModel& model,
                                 const InterferenceSettings& settings, double sign) {
  require_real_symmetric(jsa);
  const auto phase = total_signal_phase(jsa.grid_s, model, settings.residual_delay);
  CoincidenceMap out = empty_map_like(jsa);
  const std::size_t n = phase.size();
  parallel_for(n, [&](std::size_t a) {
    for (std::size_t b = 0; b < n; ++b) {
      const double fringe = 1.0 + sign * settings.visibility * std::cos(phase[a] - phase[b]);
      out.values(a, b) = 0.5 * fringe * std::norm(jsa.amplitude(a, b));
    }
  });
  return out;
}

}  // namespace detail

/// Cross-port coincidence density 1/4 |Psi(+,-) - Psi(-,+)|^2.
inline CoincidenceMap coincidence_probability(const JointSpectralAmplitude& jsa) {
  return detail::exchange_map(jsa, [](Complex x, Complex y) { return x - y; });
}

/// Same-port density 1/4 |Psi(a,b) + Psi(b,a)|^2 over ordered bin pairs; each
/// port collects half of its integral.
inline CoincidenceMap bunching_probability(const JointSpectralAmplitude& jsa) {
  return detail::exchange_map(jsa, [](Complex x, Complex y) { return x + y; });
}

/// Fringe form 1/2 [1 - V cos(phi_s(+) - phi_s(-))] |Psi(+,-)|^2 for a real symmetric Psi.
inline CoincidenceMap coincidence_probability_cosine(const JointSpectralAmplitude& jsa_unphased,
                                                     const DispersionModel& model,
                                                     const InterferenceSettings& settings = {}) {
  return detail::cosine_map(jsa_unphased, model, settings, -1.0);
}

/// Bunching counterpart of coincidence_probability_cosine.
inline CoincidenceMap bunching_probability_cosine(const JointSpectralAmplitude& jsa_unphased,
                                                  const DispersionModel& model,
                                                  const InterferenceSettings& settings = {}) {
  return detail::cosine_map(jsa_unphased, model, settings, +1.0);
}

namespace detail {

inline std::size_t reflect(long j, std::size_t n) {
  const long len = static_cast<long>(n);
  while (j < 0 || j >= len) j = j < 0 ? -j - 1 : 2 * len - 1 - j;
  return static_cast<std::size_t>(j);
}

}  // namespace detail

/// Boxcar blur over `kernel_width` bins along both axes. Mass leaving the
/// grid is mirrored back (half-sample reflection), so the total is conserved.
inline CoincidenceMap pixel_average(const CoincidenceMap& map, std::size_t kernel_width) {
  if (kernel_width == 0 || kernel_width % 2 == 0)
    throw InvalidArgument("kernel width must be odd and >= 1");
  if (kernel_width == 1) return map;
  const long half = static_cast<long>(kernel_width / 2);
  const double w = 1.0 / static_cast<double>(kernel_width);
  const std::size_t rows = map.values.rows(), cols = map.values.cols();

  Matrix<double> tmp(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      for (long k = -half; k <= half; ++k)
        tmp(r, detail::reflect(static_cast<long>(c) + k, cols)) += w * map.values(r, c);

  CoincidenceMap out = map;
  out.values = Matrix<double>(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (long k = -half; k <= half; ++k) {
      const std::size_t dst = detail::reflect(static_cast<long>(r) + k, rows);
      for (std::size_t c = 0; c < cols; ++c) out.values(dst, c) += w * tmp(r, c);
    }
  return out;
}

/// Pair of maps integrated over each spectrometer bin: the fringe map and
/// its phase-averaged reference 1/2 |Psi|^2.
struct ResolvedMaps {
  CoincidenceMap coincidence;
  CoincidenceMap reference;
};

/// Coincidence density averaged over `oversample` x `oversample` sub-samples
/// per bin, modeling a spectrometer pixel that integrates over its width.
/// `intensity(ls, li)` is the (unnormalized, exchange-symmetric) joint
/// intensity; the result is normalized so the bin-averaged intensity
/// integrates to 1 on `grid`.
template <typename Intensity>
ResolvedMaps resolved_coincidence_probability(Intensity&& intensity, const WavelengthGrid& grid,
                                              const DispersionModel& model,
                                              const InterferenceSettings& settings,
                                              std::size_t oversample) {
  if (oversample == 0) throw InvalidArgument("oversample must be >= 1");
  const WavelengthGrid fine = grid.refined(oversample);
  const auto phase = detail::total_signal_phase(fine, model, settings.residual_delay);
  const auto lambdas = fine.centers();
  const std::size_t n = grid.size();
  Matrix<double> coinc(n, n), ref(n, n);
  parallel_for(n, [&](std::size_t a) {
    for (std::size_t b = 0; b < n; ++b) {
      double pc = 0.0, avg = 0.0;
      for (std::size_t i = a * oversample; i < (a + 1) * oversample; ++i)
        for (std::size_t j = b * oversample; j < (b + 1) * oversample; ++j) {
          const double jsi = intensity(lambdas[i], lambdas[j]);
          pc += 0.5 * (1.0 - settings.visibility * std::cos(phase[i] - phase[j])) * jsi;
          avg += 0.5 * jsi;
        }
      coinc(a, b) = pc;
      ref(a, b) = avg;
    }
  }, 1);
  double total = 0.0;
  for (double v : ref.flat()) total += 2.0 * v;
  const double scale = 1.0 / (total * grid.step_nm() * grid.step_nm());
  for (double& v : coinc.flat()) v *= scale;
  for (double& v : ref.flat()) v *= scale;
  return {{grid, grid, std::move(coinc), MapKind::probability, 0},
          {grid, grid, std::move(ref), MapKind::probability, 0}};
}

/// Single-photon spectra reaching the + and - ports, densities per nm.
struct PortMarginals {
  std::vector<double> plus;
  std::vector<double> minus;
};

/// Port spectra implied by a coincidence/bunching map pair.
inline PortMarginals port_marginals(const CoincidenceMap& coincidence, const CoincidenceMap& bunching) {
  const std::size_t rows = coincidence.values.rows(), cols = coincidence.values.cols();
  PortMarginals m{std::vector<double>(rows, 0.0), std::vector<double>(cols, 0.0)};
  for (std::size_t a = 0; a < rows; ++a)
    for (std::size_t b = 0; b < cols; ++b) {
      const double v = coincidence.values(a, b) + bunching.values(a, b);
      m.plus[a] += v * coincidence.grid_m.step_nm();
      m.minus[b] += v * coincidence.grid_p.step_nm();
    }
  return m;
}

/// Port spectra of a balanced beamsplitter: half of each photon's marginal per port.
inline PortMarginals port_marginals(const JointSpectralAmplitude& jsa) {
  detail::require_square(jsa);
  const auto s = signal_marginal(jsa);
  const auto i = idler_marginal(jsa);
  PortMarginals m{std::vector<double>(s.size()), {}};
  for (std::size_t k = 0; k < s.size(); ++k) m.plus[k] = 0.5 * (s[k] + i[k]);
  m.minus = m.plus;
  return m;
}

/// Position of the resonance cross: the row where the fringe map sits
/// closest to its phase-averaged reference, scored as
/// D(a) = sum_b |P(a,b) - ref(a,b)| / sum_b ref(a,b), smoothed over `window` rows.
struct CrossLocation {
  std::size_t index;
  double lambda_nm;
  std::vector<double> profile;  // smoothed D per row
};

inline CrossLocation locate_resonance_cross(const CoincidenceMap& map, const CoincidenceMap& reference,
                                            std::size_t window = 5) {
  if (window == 0 || window % 2 == 0) throw InvalidArgument("window must be odd");
  const std::size_t rows = map.values.rows();
  std::vector<double> d(rows, 0.0);
  for (std::size_t a = 0; a < rows; ++a) {
    double num = 0.0, den = 0.0;
    for (std::size_t b = 0; b < map.values.cols(); ++b) {
      num += std::abs(map.values(a, b) - reference.values(a, b));
      den += reference.values(a, b);
    }
    d[a] = den > 0.0 ? num / den : 1.0;
  }
  const std::size_t half = window / 2;
  std::vector<double> smooth(rows, 0.0);
  for (std::size_t a = 0; a < rows; ++a) {
    double s = 0.0;
    for (long k = -static_cast<long>(half); k <= static_cast<long>(half); ++k)
      s += d[detail::reflect(static_cast<long>(a) + k, rows)];
    smooth[a] = s / static_cast<double>(window);
  }
  std::size_t best = 0;
  for (std::size_t a = 1; a < rows; ++a)
    if (smooth[a] < smooth[best]) best = a;
  return {best, map.grid_p.center_nm(best), std::move(smooth)};
}

}  // namespace shom
