#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "error.hpp"
#include "grid.hpp"
#include "matrix.hpp"
#include "vapor.hpp"

namespace shom {

using Complex = std::complex<double>;

/// Two-photon amplitude Psi(lambda_s, lambda_i) sampled at bin centers.
/// Rows index the signal grid, columns the idler grid. The amplitude is a
/// density in nm^-1, so sum |Psi|^2 * (step_s_nm * step_i_nm) == 1.
struct JointSpectralAmplitude {
  WavelengthGrid grid_s;
  WavelengthGrid grid_i;
  Matrix<Complex> amplitude;

  double bin_area_nm2() const noexcept { return grid_s.step_nm() * grid_i.step_nm(); }

  double norm() const {
    double sum = 0.0;
    for (const Complex& v : amplitude.flat()) sum += std::norm(v);
    return sum * bin_area_nm2();
  }

  bool square() const { return grid_s == grid_i; }
};

/// Degenerate bivariate Gaussian pair source. The marginal *intensity* of each
/// photon has the given FWHM; `correlation` is the Pearson coefficient between
/// signal and idler wavelengths in the joint intensity.
struct GaussianSource {
  double center;         // m
  double marginal_fwhm;  // m
  double correlation;

  GaussianSource(double center_m, double fwhm_m, double rho)
      : center(center_m), marginal_fwhm(fwhm_m), correlation(rho) {
    if (!(fwhm_m > 0.0)) throw InvalidArgument("marginal FWHM must be positive");
    if (!(rho > -1.0 && rho < 1.0)) throw InvalidArgument("correlation must lie in (-1, 1)");
  }

  double sigma() const noexcept { return marginal_fwhm / (2.0 * std::sqrt(2.0 * std::numbers::ln2)); }

  /// Unnormalized joint intensity |Psi|^2. Exactly symmetric in its arguments.
  double intensity(double lambda_s, double lambda_i) const noexcept {
    const double s = sigma() / units::nm;
    const double u = (lambda_s - center) / units::nm;
    const double v = (lambda_i - center) / units::nm;
    const double q = (u * u + v * v - 2.0 * correlation * (u * v)) /
                     (2.0 * s * s * (1.0 - correlation * correlation));
    return std::exp(-q);
  }
};

/// Require the half-maximum points of the marginal inside `grid`.
inline void check_coverage(const GaussianSource& source, const WavelengthGrid& grid) {
  const double half = 0.5 * source.marginal_fwhm;
  if (grid.start() > source.center - half || grid.last() < source.center + half)
    throw GridTooNarrow("grid does not cover the source FWHM around its center");
}

inline JointSpectralAmplitude gaussian_jsa(const GaussianSource& source, const WavelengthGrid& grid_s,
                                           const WavelengthGrid& grid_i) {
  check_coverage(source, grid_s);
  check_coverage(source, grid_i);
  JointSpectralAmplitude jsa{grid_s, grid_i, Matrix<Complex>(grid_s.size(), grid_i.size())};
  const bool symmetric = grid_s == grid_i;
  for (std::size_t a = 0; a < grid_s.size(); ++a) {
    for (std::size_t b = symmetric ? a : 0; b < grid_i.size(); ++b) {
      const double amp = std::sqrt(source.intensity(grid_s.center(a), grid_i.center(b)));
      jsa.amplitude(a, b) = amp;
      if (symmetric) jsa.amplitude(b, a) = amp;
    }
  }
  const double norm = jsa.norm();
  if (!(norm > 0.0)) throw GridTooNarrow("source has no support on the grid");
  const double scale = 1.0 / std::sqrt(norm);
  for (Complex& v : jsa.amplitude.flat()) v *= scale;
  return jsa;
}

inline JointSpectralAmplitude gaussian_jsa(const GaussianSource& source, const WavelengthGrid& grid) {
  return gaussian_jsa(source, grid, grid);
}

enum class PhaseMode {
  phase_only,     // exp(i phi_s(lambda_s)), no attenuation
  full_transfer,  // complex transfer factor at omega = 2 pi c / lambda
};

/// Signal-photon factor for each bin of the signal grid.
inline std::vector<Complex> signal_factors(const WavelengthGrid& grid, const DispersionModel& model,
                                           PhaseMode mode = PhaseMode::phase_only) {
  std::vector<Complex> out(grid.size());
  for (std::size_t a = 0; a < grid.size(); ++a) {
    const double lambda = grid.center(a);
    out[a] = mode == PhaseMode::phase_only ? std::polar(1.0, spectral_phase(model, lambda))
                                           : transfer_function(model, angular_frequency(lambda));
  }
  return out;
}

inline JointSpectralAmplitude scale_signal_rows(JointSpectralAmplitude jsa,
                                                const std::vector<Complex>& factors) {
  for (std::size_t a = 0; a < jsa.grid_s.size(); ++a)
    for (Complex& v : jsa.amplitude.row(a)) v *= factors[a];
  return jsa;
}

/// Psi(s, i) -> Psi(s, i) exp[i phi_s(lambda_s)].
inline JointSpectralAmplitude apply_signal_phase(JointSpectralAmplitude jsa,
                                                 const DispersionModel& model,
                                                 PhaseMode mode = PhaseMode::phase_only) {
  auto factors = signal_factors(jsa.grid_s, model, mode);
  return scale_signal_rows(std::move(jsa), factors);
}

/// Inverse of apply_signal_phase in phase-only mode.
inline JointSpectralAmplitude remove_signal_phase(JointSpectralAmplitude jsa,
                                                  const DispersionModel& model) {
  auto factors = signal_factors(jsa.grid_s, model);
  for (Complex& f : factors) f = std::conj(f);
  return scale_signal_rows(std::move(jsa), factors);
}

/// Marginal intensity of the signal photon (density per nm).
inline std::vector<double> signal_marginal(const JointSpectralAmplitude& jsa) {
  std::vector<double> out(jsa.grid_s.size(), 0.0);
  for (std::size_t a = 0; a < out.size(); ++a) {
    for (const Complex& v : jsa.amplitude.row(a)) out[a] += std::norm(v);
    out[a] *= jsa.grid_i.step_nm();
  }
  return out;
}

inline std::vector<double> idler_marginal(const JointSpectralAmplitude& jsa) {
  std::vector<double> out(jsa.grid_i.size(), 0.0);
  for (std::size_t a = 0; a < jsa.grid_s.size(); ++a) {
    const auto row = jsa.amplitude.row(a);
    for (std::size_t b = 0; b < out.size(); ++b) out[b] += std::norm(row[b]);
  }
  for (double& v : out) v *= jsa.grid_s.step_nm();
  return out;
}

/// True when every element has zero imaginary part and Psi(a,b) == Psi(b,a) within `tol`.
inline bool is_real_symmetric(const JointSpectralAmplitude& jsa, double tol = 0.0) {
  if (!jsa.square()) return false;
  const auto& m = jsa.amplitude;
  for (std::size_t a = 0; a < m.rows(); ++a)
    for (std::size_t b = 0; b < m.cols(); ++b) {
      if (std::abs(m(a, b).imag()) > tol) return false;
      if (std::abs(m(a, b) - m(b, a)) > tol) return false;
    }
  return true;
}

}  // namespace shom
