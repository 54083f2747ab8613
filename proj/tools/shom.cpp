// Command-line driver: theory maps, frame simulation, estimation and fitting.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "shom/shom.hpp"

namespace {

enum Exit { kOk = 0, kOther = 1, kConfig = 2, kData = 3, kNotConverged = 4 };

struct Common {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> frames;
  std::string out;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "Experiment config file (defaults when omitted)");
  cmd->add_option("--seed", c.seed, "Random seed");
  cmd->add_option("--frames", c.frames, "Number of camera frames");
  cmd->add_option("--out", c.out, "Output directory (overrides output_dir)");
  cmd->add_option("--override", c.overrides, "key=value config override (repeatable)");
}

shom::ExperimentConfig effective_config(const Common& c) {
  shom::ExperimentConfig config = c.config_path.empty() ? shom::ExperimentConfig{} : shom::load_config(c.config_path);
  for (const std::string& o : c.overrides) {
    try {
      shom::apply_setting(config, o, 0);
    } catch (const shom::ConfigError& e) {
      throw shom::ConfigError(std::string("--override ") + o + ": " + e.what());
    }
  }
  if (c.seed) config.detection.seed = *c.seed;
  if (c.frames) config.frames = *c.frames;
  if (!c.out.empty()) config.output_dir = c.out;
  shom::validate(config);
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectrally resolved two-photon interference through an atomic vapor"};
  app.require_subcommand(1);
  Common common;
  bool uncorrelated = false, frames_csv = false;
  std::string frame_file, map_file, accidental_file;

  auto* defaults = app.add_subcommand("defaults", "Print the effective config");
  auto* theory = app.add_subcommand("theory", "Write theory coincidence and phase maps");
  auto* simulate = app.add_subcommand("simulate", "Generate camera frames (ZHF1)");
  auto* estimate = app.add_subcommand("estimate", "Raw, accidental and covariance maps from frames");
  auto* fitcmd = app.add_subcommand("fit", "Fit optical depth to a coincidence map");
  auto* pipeline = app.add_subcommand("pipeline", "theory, simulate, estimate and fit in one run");
  for (auto* cmd : {defaults, theory, simulate, estimate, fitcmd, pipeline}) add_common(cmd, common);
  simulate->add_flag("--uncorrelated", uncorrelated, "Draw the two regions independently (zero covariance)");
  simulate->add_flag("--csv", frames_csv, "Also write frames.csv");
  estimate->add_option("frame_file", frame_file, "ZHF1 frame file")->required();
  fitcmd->add_option("map", map_file, "Map file (.csv or .zhm)")->required();
  fitcmd->add_option("--accidental", accidental_file, "Accidental map; enables variance weighting");

  CLI11_PARSE(app, argc, argv);

  try {
    const shom::ExperimentConfig config = effective_config(common);
    const std::filesystem::path out = config.output_dir;
    if (defaults->parsed()) {
      shom::write_config(std::cout, config);
    } else if (theory->parsed()) {
      shom::cmd_theory(config, out, std::cout);
    } else if (simulate->parsed()) {
      shom::cmd_simulate(config, out, std::cout,
                         uncorrelated ? shom::Correlation::uncorrelated : shom::Correlation::paired, frames_csv);
    } else if (estimate->parsed()) {
      shom::cmd_estimate(frame_file, out, std::cout);
    } else if (fitcmd->parsed()) {
      std::optional<std::filesystem::path> acc;
      if (!accidental_file.empty()) acc = accidental_file;
      const auto report = shom::cmd_fit(map_file, config, out, std::cout, acc);
      if (!report.result.converged) {
        std::cerr << "error: fit did not converge; best iterate reported\n";
        return kNotConverged;
      }
    } else if (pipeline->parsed()) {
      const auto report = shom::cmd_pipeline(config, out, std::cout);
      if (!report.result.converged) {
        std::cerr << "error: fit did not converge; best iterate reported\n";
        return kNotConverged;
      }
    }
  } catch (const shom::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const shom::FormatError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const shom::GridMismatch& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const shom::DegenerateMap& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const shom::Error& e) {
    // Remaining library errors stem from config values (range, coverage).
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kOther;
  }
  return kOk;
}
