#pragma once

#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>

#include "config.hpp"
#include "detector.hpp"
#include "frame_io.hpp"
#include "interference.hpp"
#include "matrix_io.hpp"
#include "report.hpp"
#include "retrieval.hpp"
#include "spectra.hpp"
#include "vapor.hpp"

namespace shom {

namespace fs = std::filesystem;

/// Theory products for one configuration.
struct TheoryOutput {
  DispersionModel model;
  CoincidenceMap ideal;      // bin-center coincidence density
  CoincidenceMap resolved;   // averaged over each spectrometer pixel
  CoincidenceMap reference;  // pixel-averaged 1/2 |Psi|^2, no interference
  Matrix<double> phase_difference;
  std::vector<double> phase_mod_2pi;
};

/// Phase-free amplitude of the configured source on `grid`.
inline JointSpectralAmplitude source_amplitude(const ExperimentConfig& config, const WavelengthGrid& grid) {
  return gaussian_jsa(config.source(), grid);
}

inline PairSource configured_pair_source(const ExperimentConfig& config, const JointSpectralAmplitude& jsa) {
  const DispersionModel model = config.dispersion();
  if (config.apply_absorption) {
    if (config.visibility != 1.0 || config.residual_delay_fs != 0.0)
      throw ConfigError("apply_absorption requires visibility = 1 and residual_delay = 0");
    return pair_source(apply_signal_phase(jsa, model, PhaseMode::full_transfer));
  }
  return pair_source_cosine(jsa, model, config.interference());
}

inline TheoryOutput theory_maps(const ExperimentConfig& config) {
  const WavelengthGrid grid = config.grid();
  const DispersionModel model = config.dispersion();
  const JointSpectralAmplitude jsa = source_amplitude(config, grid);
  CoincidenceMap ideal = config.apply_absorption
                             ? configured_pair_source(config, jsa).coincidence
                             : coincidence_probability_cosine(jsa, model, config.interference());
  const GaussianSource source = config.source();
  ResolvedMaps resolved = resolved_coincidence_probability(
      [&](double ls, double li) { return source.intensity(ls, li); }, grid, model, config.interference(),
      config.oversample);
  return {model,
          std::move(ideal),
          std::move(resolved.coincidence),
          std::move(resolved.reference),
          phase_difference_map(model.od, model.tau, model.lambda0, grid, grid),
          phase_mod_2pi(model, grid)};
}

namespace detail {

inline void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw FormatError("cannot create output directory '" + dir.string() + "': " + ec.message());
}

inline void write_profile(const fs::path& path, const WavelengthGrid& grid, const std::vector<double>& values,
                          const char* column) {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot write '" + path.string() + "'");
  os << "lambda_nm," << column << '\n';
  for (std::size_t k = 0; k < grid.size(); ++k)
    os << format_double(grid.center_nm(k)) << ',' << format_double(values[k]) << '\n';
}

}  // namespace detail

/// Writes pc_ideal.csv, pc_resolved.csv, pc_reference.csv,
/// phase_difference.csv and phase_mod2pi.csv into `out`.
inline TheoryOutput cmd_theory(const ExperimentConfig& config, const fs::path& out, std::ostream& log) {
  TheoryOutput t = theory_maps(config);
  detail::prepare_dir(out);
  write_matrix(out / "pc_ideal.csv", t.ideal);
  write_matrix(out / "pc_resolved.csv", t.resolved);
  write_matrix(out / "pc_reference.csv", t.reference);
  const WavelengthGrid grid = config.grid();
  write_matrix(out / "phase_difference.csv", {grid, grid, t.phase_difference, MapKind::probability, 0});
  detail::write_profile(out / "phase_mod2pi.csv", grid, t.phase_mod_2pi, "phase_rad");
  const CrossLocation cross = locate_resonance_cross(t.resolved, t.reference);
  log << "temperature_k = " << format_double(config.temperature_k) << '\n'
      << "optical_depth = " << format_double(t.model.od) << '\n'
      << "tau_ps = " << format_double(t.model.tau / units::ps) << '\n'
      << "phase_peak_to_peak_rad = "
      << format_double(spectral_phase_peak_to_peak(t.model, grid.start(), grid.last())) << '\n'
      << "resonance_cross_nm = " << format_double(cross.lambda_nm) << '\n';
  return t;
}

/// Runs the frame generator and writes frames.zhf (and frames.csv on request).
inline FrameBatch cmd_simulate(const ExperimentConfig& config, const fs::path& out, std::ostream& log,
                               Correlation mode = Correlation::paired, bool write_csv = false) {
  const WavelengthGrid grid = config.grid();
  const PairSource source = configured_pair_source(config, source_amplitude(config, grid));
  if (occupancy_warning(source, config.detection))
    log << "warning: more than one photon per pixel per frame expected; saturation will bias estimates\n";
  FrameBatch batch = simulate_frames(source, config.detection, config.frames, mode);
  detail::prepare_dir(out);
  write_frames(out / "frames.zhf", batch);
  if (write_csv) {
    std::ofstream os(out / "frames.csv");
    if (!os) throw FormatError("cannot write frames.csv");
    write_frames_csv(os, batch);
  }
  log << "repetitions = " << config.detection.repetitions() << '\n'
      << "frames = " << batch.n_frames() << '\n'
      << "events = " << batch.n_events() << '\n'
      << "expected_photons_per_frame = " << format_double(config.detection.expected_photons_per_frame()) << '\n'
      << "mean_photons_per_frame = " << format_double(batch.n_frames() ? mean_photons_per_frame(batch) : 0.0)
      << '\n';
  return batch;
}

struct EstimateOutput {
  CoincidenceMap raw;
  CoincidenceMap accidental;
  CoincidenceMap covariance;
};

inline EstimateOutput estimate_all(const FrameBatch& batch) {
  if (batch.n_frames() == 0) {
    const auto zero = [&](MapKind kind) {
      return CoincidenceMap{batch.grid_plus(), batch.grid_minus(),
                            Matrix<double>(batch.grid_plus().size(), batch.grid_minus().size()), kind, 0};
    };
    return {zero(MapKind::raw), zero(MapKind::accidental), zero(MapKind::covariance)};
  }
  const FrameCounts counts = count_frames(batch);
  return {raw_coincidences(counts), accidental_map(counts), covariance_map(counts)};
}

/// Reads a frame file and writes raw.csv, accidental.csv and covariance.csv
/// into `out`.
inline EstimateOutput cmd_estimate(const fs::path& frame_file, const fs::path& out, std::ostream& log) {
  const FrameBatch batch = read_frames(frame_file);
  EstimateOutput e = estimate_all(batch);
  detail::prepare_dir(out);
  write_matrix(out / "raw.csv", e.raw);
  write_matrix(out / "accidental.csv", e.accidental);
  write_matrix(out / "covariance.csv", e.covariance);
  std::uint64_t coincidences = 0;
  if (batch.n_frames() > 0) {
    const FrameCounts counts = count_frames(batch);
    coincidences = std::accumulate(counts.pairs.flat().begin(), counts.pairs.flat().end(), std::uint64_t{0});
  }
  log << "frames = " << batch.n_frames() << '\n' << "total_coincidences = " << coincidences << '\n';
  if (low_statistics(e.covariance)) log << "warning: fewer than " << kLowStatisticsFrames << " frames\n";
  return e;
}

/// Fits a covariance (or probability) map and writes fit_report.{txt,json}.
/// An accidental map switches on variance weighting. A report is written
/// even when the fit did not converge.
inline FitReport cmd_fit(const fs::path& map_file, const ExperimentConfig& config, const fs::path& out,
                         std::ostream& log, const std::optional<fs::path>& accidental_file = std::nullopt) {
  const CoincidenceMap map = read_matrix(map_file, MapKind::covariance);
  std::optional<CoincidenceMap> accidental;
  if (accidental_file) {
    accidental = read_matrix(*accidental_file, MapKind::accidental);
    if (accidental->grid_p != map.grid_p || accidental->grid_m != map.grid_m)
      throw GridMismatch("accidental map grid differs from the data map");
  }
  if (map.grid_p != map.grid_m) throw GridMismatch("fit needs a square map on one grid");
  const JointSpectralAmplitude jsa = source_amplitude(config, map.grid_p);
  FitReport report;
  report.result = fit(map, jsa, config.resonance(), config.fit, accidental ? &*accidental : nullptr);
  report.map_file = map_file.filename().string();
  report.map_kind = std::string(to_string(map.kind));
  report.n_frames = map.n_frames;
  report.temperature_k = config.temperature_k;
  report.od_theory = config.od();
  detail::prepare_dir(out);
  write_report(out, report);
  write_report_text(log, report);
  return report;
}

/// theory -> simulate -> estimate -> fit, all into `out`.
inline FitReport cmd_pipeline(const ExperimentConfig& config, const fs::path& out, std::ostream& log) {
  cmd_theory(config, out, log);
  cmd_simulate(config, out, log);
  cmd_estimate(out / "frames.zhf", out, log);
  return cmd_fit(out / "covariance.csv", config, out, log, out / "accidental.csv");
}

}  // namespace shom
