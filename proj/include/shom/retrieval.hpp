#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "error.hpp"
#include "interference.hpp"
#include "parallel.hpp"
#include "spectra.hpp"
#include "vapor.hpp"

namespace shom {

/// Parameters of the fringe-form forward model.
struct ModelParams {
  double od = 0.0;
  double visibility = 1.0;
  double delay_fs = 0.0;  // residual idler delay

  bool operator==(const ModelParams&) const = default;
};

/// Fixed resonance shape: lifetime from the measured temperature, line center.
struct Resonance {
  double tau;
  double lambda0 = RbProperties::lambda_d1;
};

struct Bounds {
  double lo;
  double hi;

  double clamp(double v) const { return std::clamp(v, lo, hi); }
  bool operator==(const Bounds&) const = default;
};

struct FitConfig {
  double init_od = 100.0;
  double init_visibility = 0.9;
  double init_delay_fs = 0.0;
  Bounds od{0.0, 1e5};
  Bounds visibility{0.0, 1.0};
  Bounds delay_fs{-500.0, 500.0};
  bool fit_visibility = true;
  bool fit_delay = true;
  int max_iterations = 200;
  double tolerance = 1e-10;  // relative cost decrease
  double gradient_tolerance = 1e-6;
  std::size_t mask_radius = 2;  // bins within this many widths of the resonance are excluded
  std::size_t kernel_width = 1;
  // Multi-start: log ladder of n_starts ODs over [ladder_min, ladder_max], plus
  // the scan_minima deepest local minima of a scan_points-point log scan.
  std::size_t n_starts = 11;
  double ladder_min = 1.0;
  double ladder_max = 1e5;
  std::size_t scan_points = 2000;
  std::size_t scan_minima = 5;

  bool operator==(const FitConfig&) const = default;
};

struct FitResult {
  double od_hat = 0.0;
  double visibility_hat = 0.0;
  double delay_fs_hat = 0.0;
  double cost = 0.0;
  std::array<double, 3> param_sigma{};  // od, visibility, delay_fs; 0 when held fixed
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();
  double od_visibility_correlation = 0.0;
  int iterations = 0;
  bool converged = false;
  std::size_t starts = 0;

  ModelParams params() const { return {od_hat, visibility_hat, delay_fs_hat}; }
};

/// Bins kept by the fit: a bin is dropped when its center lies within
/// `radius` bin widths of the resonance on either axis. Radius 0 keeps all.
inline Matrix<unsigned char> fit_mask(const WavelengthGrid& gp, const WavelengthGrid& gm, double lambda0,
                                      std::size_t radius) {
  Matrix<unsigned char> keep(gp.size(), gm.size(), 1);
  const auto near = [&](const WavelengthGrid& g, std::size_t i) {
    return std::abs(g.center(i) - lambda0) < static_cast<double>(radius) * g.step();
  };
  for (std::size_t a = 0; a < gp.size(); ++a)
    for (std::size_t b = 0; b < gm.size(); ++b)
      if (near(gp, a) || near(gm, b)) keep(a, b) = 0;
  return keep;
}

/// Least-squares problem: normalized data map against the normalized fringe
/// model 1/2 [1 - V cos(OD dg + delay dw)] |Psi|^2, blurred by kernel_width.
class FitProblem {
 public:
  static constexpr int kParams = 3;

  FitProblem(const CoincidenceMap& data, const JointSpectralAmplitude& jsa_unphased, Resonance resonance,
             const FitConfig& config, const CoincidenceMap* variance = nullptr)
      : grid_(jsa_unphased.grid_s), n_(jsa_unphased.grid_s.size()), kernel_(config.kernel_width) {
    if (data.kind != MapKind::covariance && data.kind != MapKind::probability)
      throw InvalidArgument("fit accepts covariance or probability maps");
    if (!jsa_unphased.square() || !same_grid(data.grid_p, grid_) || !same_grid(data.grid_m, grid_))
      throw GridMismatch("data map and amplitude grids differ");
    if (kernel_ == 0 || kernel_ % 2 == 0) throw InvalidArgument("kernel width must be odd");
    if (variance && (variance->values.rows() != n_ || variance->values.cols() != n_))
      throw GridMismatch("variance map shape differs from data");

    const DispersionModel shape(1.0, resonance.tau, resonance.lambda0);
    std::vector<double> g(n_), w(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      g[i] = lorentzian_phase(1.0, reduced_detuning(shape, grid_.center(i)));
      w[i] = angular_frequency(grid_.center(i)) * units::fs;
    }
    jsi_.resize(n_ * n_);
    dg_.resize(n_ * n_);
    dw_.resize(n_ * n_);
    for (std::size_t a = 0; a < n_; ++a)
      for (std::size_t b = 0; b < n_; ++b) {
        const std::size_t k = a * n_ + b;
        jsi_[k] = std::norm(jsa_unphased.amplitude(a, b));
        dg_[k] = g[a] - g[b];
        dw_[k] = w[a] - w[b];
      }

    const auto keep = fit_mask(grid_, grid_, resonance.lambda0, config.mask_radius);
    double sum = 0.0;
    bool any_nonzero = false;
    for (std::size_t k = 0; k < n_ * n_; ++k)
      if (keep.flat()[k]) {
        used_.push_back(k);
        sum += data.values.flat()[k];
        any_nonzero = any_nonzero || data.values.flat()[k] != 0.0;
      }
    if (used_.empty()) throw DegenerateMap("mask removes every bin");
    if (!any_nonzero) throw DegenerateMap("data map is zero on all unmasked bins");
    if (!(sum > 0.0)) throw DegenerateMap("data map has non-positive total on unmasked bins");

    data_.resize(used_.size());
    weight_.assign(used_.size(), 1.0);
    for (std::size_t u = 0; u < used_.size(); ++u) {
      const std::size_t k = used_[u];
      data_[u] = data.values.flat()[k] / sum;
      if (variance && data.kind == MapKind::covariance) {
        const double var = variance->values.flat()[k];
        if (!(var > 0.0)) throw InvalidArgument("variance map must be positive");
        weight_[u] = sum / std::sqrt(var);
      }
    }
    if (!variance || data.kind != MapKind::covariance) {
      // Uniform weights on the normalized map, scaled to O(1) residuals.
      double mean = 0.0;
      for (double d : data_) mean += std::abs(d);
      mean /= static_cast<double>(data_.size());
      for (double& wt : weight_) wt = 1.0 / mean;
    }
  }

  std::size_t n_residuals() const noexcept { return used_.size(); }

  /// Squared norm of the weighted, normalized data.
  double data_norm2() const noexcept {
    double s = 0.0;
    for (std::size_t u = 0; u < data_.size(); ++u) s += weight_[u] * weight_[u] * data_[u] * data_[u];
    return s;
  }

  /// Unnormalized model and its derivatives on the full grid.
  struct Evaluation {
    std::vector<double> model;
    std::array<std::vector<double>, kParams> d;
  };

  Evaluation evaluate_full(const ModelParams& p, bool with_derivatives) const {
    Evaluation e;
    const std::size_t nn = n_ * n_;
    e.model.resize(nn);
    if (with_derivatives)
      for (auto& v : e.d) v.resize(nn);
    for (std::size_t k = 0; k < nn; ++k) {
      const double phase = p.od * dg_[k] + p.delay_fs * dw_[k];
      const double c = std::cos(phase);
      e.model[k] = 0.5 * (1.0 - p.visibility * c) * jsi_[k];
      if (with_derivatives) {
        const double s = 0.5 * p.visibility * std::sin(phase) * jsi_[k];
        e.d[0][k] = s * dg_[k];
        e.d[1][k] = -0.5 * c * jsi_[k];
        e.d[2][k] = s * dw_[k];
      }
    }
    if (kernel_ > 1) {
      blur(e.model);
      if (with_derivatives)
        for (auto& v : e.d) blur(v);
    }
    return e;
  }

  /// Model map normalized to unit sum over the unmasked bins.
  CoincidenceMap model_map(const ModelParams& p) const {
    const Evaluation e = evaluate_full(p, false);
    double sum = 0.0;
    for (std::size_t k : used_) sum += e.model[k];
    CoincidenceMap out{grid_, grid_, Matrix<double>(n_, n_), MapKind::probability, 0};
    if (sum > 0.0)
      for (std::size_t k = 0; k < e.model.size(); ++k) out.values.flat()[k] = e.model[k] / sum;
    return out;
  }

  /// Weighted residuals r and Jacobian dr/dp (rows: residuals, cols: od, V, delay_fs).
  /// Returns false when the model vanishes on the unmasked bins.
  bool residuals(const ModelParams& p, Eigen::VectorXd& r, Eigen::MatrixXd* jac) const {
    const Evaluation e = evaluate_full(p, jac != nullptr);
    double sum = 0.0;
    std::array<double, kParams> dsum{};
    for (std::size_t k : used_) {
      sum += e.model[k];
      if (jac)
        for (int j = 0; j < kParams; ++j) dsum[j] += e.d[j][k];
    }
    if (!(sum > 0.0) || !std::isfinite(sum)) return false;
    const std::size_t m = used_.size();
    r.resize(static_cast<Eigen::Index>(m));
    if (jac) jac->resize(static_cast<Eigen::Index>(m), kParams);
    const double inv = 1.0 / sum;
    for (std::size_t u = 0; u < m; ++u) {
      const std::size_t k = used_[u];
      const double model = e.model[k] * inv;
      r[static_cast<Eigen::Index>(u)] = weight_[u] * (data_[u] - model);
      if (jac)
        for (int j = 0; j < kParams; ++j)
          (*jac)(static_cast<Eigen::Index>(u), j) = -weight_[u] * (e.d[j][k] * inv - model * dsum[j] * inv);
    }
    return true;
  }

  /// Sum of squared weighted residuals; +inf when the model is degenerate.
  double cost(const ModelParams& p) const {
    Eigen::VectorXd r;
    if (!residuals(p, r, nullptr)) return std::numeric_limits<double>::infinity();
    return r.squaredNorm();
  }

  /// Analytic gradient of cost(): 2 J^T r.
  std::array<double, kParams> gradient(const ModelParams& p) const {
    Eigen::VectorXd r;
    Eigen::MatrixXd jac;
    if (!residuals(p, r, &jac)) throw DegenerateMap("model vanishes at this point");
    const Eigen::Vector3d g = 2.0 * jac.transpose() * r;
    return {g[0], g[1], g[2]};
  }

 private:
  void blur(std::vector<double>& values) const {
    CoincidenceMap tmp{grid_, grid_, Matrix<double>(n_, n_), MapKind::probability, 0};
    std::copy(values.begin(), values.end(), tmp.values.flat().begin());
    const CoincidenceMap out = pixel_average(tmp, kernel_);
    std::copy(out.values.flat().begin(), out.values.flat().end(), values.begin());
  }

  WavelengthGrid grid_;
  std::size_t n_;
  std::size_t kernel_;
  std::vector<double> jsi_, dg_, dw_;
  std::vector<std::size_t> used_;
  std::vector<double> data_, weight_;
};

namespace detail {

inline std::array<double, 3> to_array(const ModelParams& p) { return {p.od, p.visibility, p.delay_fs}; }
inline ModelParams from_array(const std::array<double, 3>& v) { return {v[0], v[1], v[2]}; }

struct LocalFit {
  ModelParams params;
  double cost = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
};

/// Projected Levenberg-Marquardt with Marquardt diagonal scaling and box bounds.
inline LocalFit levenberg_marquardt(const FitProblem& problem, ModelParams start, const FitConfig& config) {
  const std::array<Bounds, 3> bounds{config.od, config.visibility, config.delay_fs};
  const std::array<bool, 3> active{true, config.fit_visibility, config.fit_delay};
  auto x = to_array(start);
  for (int j = 0; j < 3; ++j) x[j] = bounds[j].clamp(x[j]);

  LocalFit out;
  Eigen::VectorXd r;
  Eigen::MatrixXd jac;
  if (!problem.residuals(from_array(x), r, &jac)) return out;
  double cost = r.squaredNorm();
  double lambda = 1e-3;
  // Residuals at rounding level: an exact fit, where the gradient direction is noise.
  const double exact_fit = 1e-24 * problem.data_norm2();

  for (int it = 1; it <= config.max_iterations; ++it) {
    out.iterations = it;
    const Eigen::Vector3d grad = jac.transpose() * r;
    const Eigen::Matrix3d normal = jac.transpose() * jac;
    const double rnorm = std::sqrt(cost);

    std::vector<int> free;
    double cosine = 0.0;
    for (int j = 0; j < 3; ++j) {
      if (!active[j]) continue;
      const bool at_lo = x[j] <= bounds[j].lo && grad[j] > 0.0;
      const bool at_hi = x[j] >= bounds[j].hi && grad[j] < 0.0;
      if (at_lo || at_hi) continue;
      free.push_back(j);
      const double cn = std::sqrt(normal(j, j));
      if (cn > 0.0 && rnorm > 0.0) cosine = std::max(cosine, std::abs(grad[j]) / (cn * rnorm));
    }
    if (free.empty() || cosine <= config.gradient_tolerance || cost <= exact_fit) {
      out.converged = true;
      break;
    }

    const auto nf = static_cast<Eigen::Index>(free.size());
    bool accepted = false;
    while (!accepted) {
      Eigen::MatrixXd h(nf, nf);
      Eigen::VectorXd rhs(nf);
      for (Eigen::Index i = 0; i < nf; ++i) {
        rhs[i] = -grad[free[i]];
        for (Eigen::Index k = 0; k < nf; ++k) h(i, k) = normal(free[i], free[k]);
        h(i, i) += lambda * std::max(normal(free[i], free[i]), 1e-300);
      }
      const Eigen::VectorXd step = h.ldlt().solve(rhs);
      auto trial = x;
      for (Eigen::Index i = 0; i < nf; ++i) trial[free[i]] = bounds[free[i]].clamp(x[free[i]] + step[i]);

      Eigen::VectorXd r_new;
      Eigen::MatrixXd jac_new;
      const bool ok = step.allFinite() && trial != x && problem.residuals(from_array(trial), r_new, &jac_new);
      const double cost_new = ok ? r_new.squaredNorm() : std::numeric_limits<double>::infinity();
      if (cost_new < cost) {
        const double rel = (cost - cost_new) / cost;
        x = trial;
        r = std::move(r_new);
        jac = std::move(jac_new);
        cost = cost_new;
        lambda = std::max(lambda / 3.0, 1e-12);
        accepted = true;
        if (rel < config.tolerance && cosine <= 1e-3) {
          out.converged = true;
          break;
        }
      } else {
        lambda *= 4.0;
        if (lambda > 1e16) {
          // No descent left at working precision.
          out.converged = cosine <= 1e-3 || cost <= exact_fit;
          break;
        }
      }
    }
    if (out.converged || !accepted) break;
  }
  out.params = from_array(x);
  out.cost = cost;
  return out;
}

inline std::vector<double> log_space(double lo, double hi, std::size_t n) {
  std::vector<double> v;
  if (n == 0) return v;
  if (n == 1) return {lo};
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i)
    v.push_back(std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1)));
  return v;
}

}  // namespace detail

namespace detail {

inline FitResult fit_weighted(const CoincidenceMap& map, const JointSpectralAmplitude& jsa_unphased,
                              Resonance resonance, const FitConfig& config, const CoincidenceMap* variance) {
  if (!(config.tolerance > 0.0)) throw InvalidArgument("fit tolerance must be positive");
  if (config.od.lo > config.od.hi || config.visibility.lo > config.visibility.hi ||
      config.delay_fs.lo > config.delay_fs.hi)
    throw InvalidArgument("inverted parameter bounds");
  const FitProblem problem(map, jsa_unphased, resonance, config, variance);

  const double lo = std::max(config.ladder_min, std::max(config.od.lo, 1e-6));
  const double hi = std::min(config.ladder_max, config.od.hi);
  std::vector<double> starts{config.od.clamp(config.init_od)};
  if (hi > lo) {
    for (double od : detail::log_space(lo, hi, config.n_starts)) starts.push_back(od);

    const auto scan = detail::log_space(lo, hi, config.scan_points);
    std::vector<double> scan_cost(scan.size());
    parallel_for(scan.size(), [&](std::size_t i) {
      scan_cost[i] = problem.cost({scan[i], config.visibility.clamp(config.init_visibility),
                                   config.delay_fs.clamp(config.init_delay_fs)});
    });
    std::vector<std::size_t> minima;
    for (std::size_t i = 0; i < scan.size(); ++i) {
      const bool left = i == 0 || scan_cost[i] <= scan_cost[i - 1];
      const bool right = i + 1 == scan.size() || scan_cost[i] <= scan_cost[i + 1];
      if (left && right && std::isfinite(scan_cost[i])) minima.push_back(i);
    }
    std::stable_sort(minima.begin(), minima.end(),
                     [&](std::size_t a, std::size_t b) { return scan_cost[a] < scan_cost[b]; });
    for (std::size_t i = 0; i < std::min(config.scan_minima, minima.size()); ++i) starts.push_back(scan[minima[i]]);
  }

  std::vector<detail::LocalFit> local(starts.size());
  parallel_for(starts.size(), [&](std::size_t i) {
    local[i] = detail::levenberg_marquardt(
        problem, {starts[i], config.init_visibility, config.init_delay_fs}, config);
  }, 1);
  std::size_t best = 0;
  for (std::size_t i = 1; i < local.size(); ++i)
    if (local[i].cost < local[best].cost) best = i;
  const detail::LocalFit& win = local[best];
  if (!std::isfinite(win.cost)) throw DegenerateMap("model degenerate at every start");

  FitResult result;
  result.od_hat = win.params.od;
  result.visibility_hat = win.params.visibility;
  result.delay_fs_hat = win.params.delay_fs;
  result.cost = win.cost;
  result.iterations = win.iterations;
  result.converged = win.converged;
  result.starts = starts.size();

  // Covariance s^2 (J^T J)^-1 over the fitted parameters.
  Eigen::VectorXd r;
  Eigen::MatrixXd jac;
  if (problem.residuals(win.params, r, &jac)) {
    const std::array<bool, 3> active{true, config.fit_visibility, config.fit_delay};
    std::vector<int> idx;
    for (int j = 0; j < 3; ++j)
      if (active[j]) idx.push_back(j);
    const auto nf = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd normal(nf, nf);
    for (Eigen::Index i = 0; i < nf; ++i)
      for (Eigen::Index k = 0; k < nf; ++k) normal(i, k) = jac.col(idx[i]).dot(jac.col(idx[k]));
    const double dof = static_cast<double>(problem.n_residuals()) - static_cast<double>(nf);
    const double s2 = dof > 0.0 ? win.cost / dof : 0.0;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(normal);
    if (lu.isInvertible()) {
      const Eigen::MatrixXd cov = s2 * lu.inverse();
      for (Eigen::Index i = 0; i < nf; ++i)
        for (Eigen::Index k = 0; k < nf; ++k) result.covariance(idx[i], idx[k]) = cov(i, k);
      for (int j = 0; j < 3; ++j) result.param_sigma[j] = std::sqrt(std::max(result.covariance(j, j), 0.0));
      if (result.param_sigma[0] > 0.0 && result.param_sigma[1] > 0.0)
        result.od_visibility_correlation =
            result.covariance(0, 1) / (result.param_sigma[0] * result.param_sigma[1]);
    }
  }
  return result;
}

}  // namespace detail

/// Normalized model map for the given parameters (unit sum on unmasked bins).
inline CoincidenceMap forward_model(const ModelParams& params, const JointSpectralAmplitude& jsa_unphased,
                                    Resonance resonance, std::size_t kernel_width = 1,
                                    std::size_t mask_radius = 0) {
  FitConfig cfg;
  cfg.kernel_width = kernel_width;
  cfg.mask_radius = mask_radius;
  // The problem needs some data to normalize against; the reference JSI serves.
  CoincidenceMap ref{jsa_unphased.grid_s, jsa_unphased.grid_i,
                     Matrix<double>(jsa_unphased.grid_s.size(), jsa_unphased.grid_i.size(), 1.0),
                     MapKind::probability, 0};
  return FitProblem(ref, jsa_unphased, resonance, cfg).model_map(params);
}

/// Expected per-bin variance of a covariance estimate, up to the common 1/N
/// factor: a bin clicks in coincidence with probability R = A + C per frame.
inline CoincidenceMap coincidence_variance(const CoincidenceMap& accidental, const CoincidenceMap& expected_covariance) {
  CoincidenceMap out = accidental;
  out.kind = MapKind::variance;
  double peak = 0.0;
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    const double r = accidental.values.flat()[k] + std::max(expected_covariance.values.flat()[k], 0.0);
    out.values.flat()[k] = r * (1.0 - r);
    peak = std::max(peak, out.values.flat()[k]);
  }
  if (!(peak > 0.0)) throw DegenerateMap("accidental map is zero everywhere");
  for (double& v : out.values.flat()) v = std::max(v, 1e-12 * peak);
  return out;
}

/// Multi-start bounded least-squares fit of OD, visibility and residual delay.
/// Without `accidental` the normalized map is fitted with uniform weights.
/// With it (covariance maps), the fit is repeated with weights from the
/// expected variance at the first solution, so no bin is weighted by its own
/// fluctuation. A result with converged == false is the best iterate found.
inline FitResult fit(const CoincidenceMap& map, const JointSpectralAmplitude& jsa_unphased, Resonance resonance,
                     const FitConfig& config, const CoincidenceMap* accidental = nullptr) {
  const FitResult first = detail::fit_weighted(map, jsa_unphased, resonance, config, nullptr);
  if (!accidental || map.kind != MapKind::covariance) return first;
  if (!same_grid(accidental->grid_p, map.grid_p) || !same_grid(accidental->grid_m, map.grid_m))
    throw GridMismatch("accidental map grid differs from the data map");

  // Expected covariance: the first-pass model scaled to the data's unmasked sum.
  const CoincidenceMap shape = forward_model(first.params(), jsa_unphased, resonance, config.kernel_width,
                                             config.mask_radius);
  const auto keep = fit_mask(map.grid_p, map.grid_m, resonance.lambda0, config.mask_radius);
  double data_sum = 0.0;
  for (std::size_t k = 0; k < keep.size(); ++k)
    if (keep.flat()[k]) data_sum += map.values.flat()[k];
  CoincidenceMap expected = shape;
  for (double& v : expected.values.flat()) v *= data_sum;
  const CoincidenceMap variance = coincidence_variance(*accidental, expected);

  FitConfig second = config;
  second.init_od = first.od_hat;
  second.init_visibility = first.visibility_hat;
  second.init_delay_fs = first.delay_fs_hat;
  FitResult result = detail::fit_weighted(map, jsa_unphased, resonance, second, &variance);
  result.iterations += first.iterations;
  result.starts += first.starts;
  return result;
}

/// phi_s(+) - phi_s(-) over the grid pair.
inline Matrix<double> phase_difference_map(double od, double tau, double lambda0, const WavelengthGrid& grid_p,
                                           const WavelengthGrid& grid_m) {
  const DispersionModel model(od, tau, lambda0);
  Matrix<double> out(grid_p.size(), grid_m.size());
  std::vector<double> pm(grid_m.size());
  for (std::size_t b = 0; b < grid_m.size(); ++b) pm[b] = spectral_phase(model, grid_m.center(b));
  for (std::size_t a = 0; a < grid_p.size(); ++a) {
    const double pa = spectral_phase(model, grid_p.center(a));
    for (std::size_t b = 0; b < grid_m.size(); ++b) out(a, b) = pa - pm[b];
  }
  return out;
}

/// phi_s(lambda) wrapped into [0, 2 pi), one value per bin.
inline std::vector<double> phase_mod_2pi(const DispersionModel& model, const WavelengthGrid& grid) {
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double p = std::fmod(spectral_phase(model, grid.center(i)), 2.0 * std::numbers::pi);
    out[i] = p < 0.0 ? p + 2.0 * std::numbers::pi : p;
  }
  return out;
}

/// Values m(k, n-1-k) along the anti-diagonal of a square matrix.
inline std::vector<double> antidiagonal(const Matrix<double>& m) {
  std::vector<double> out(m.rows());
  for (std::size_t k = 0; k < m.rows(); ++k) out[k] = m(k, m.cols() - 1 - k);
  return out;
}

/// Number of 2 pi n levels crossed by consecutive samples of a phase profile,
/// i.e. the dark fringes 1 - cos(phase) passes through.
inline std::size_t count_fringes(const std::vector<double>& phase) {
  std::size_t count = 0;
  for (std::size_t k = 1; k < phase.size(); ++k) {
    const double a = std::floor(phase[k - 1] / (2.0 * std::numbers::pi));
    const double b = std::floor(phase[k] / (2.0 * std::numbers::pi));
    count += static_cast<std::size_t>(std::abs(b - a));
  }
  return count;
}

}  // namespace shom
