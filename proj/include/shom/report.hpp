#pragma once

#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "error.hpp"
#include "format.hpp"
#include "retrieval.hpp"

namespace shom {

/// Fit outcome plus the context needed to read it later.
struct FitReport {
  FitResult result;
  std::string map_file;
  std::string map_kind;
  std::uint64_t n_frames = 0;
  double temperature_k = 0.0;
  double od_theory = 0.0;  // OD predicted from temperature and cell length
};

inline nlohmann::ordered_json to_json(const FitReport& report) {
  const FitResult& r = report.result;
  nlohmann::ordered_json j;
  j["map_file"] = report.map_file;
  j["map_kind"] = report.map_kind;
  j["n_frames"] = report.n_frames;
  j["temperature_k"] = report.temperature_k;
  j["od_theory"] = report.od_theory;
  j["od_hat"] = r.od_hat;
  j["visibility_hat"] = r.visibility_hat;
  j["delay_fs_hat"] = r.delay_fs_hat;
  j["sigma_od"] = r.param_sigma[0];
  j["sigma_visibility"] = r.param_sigma[1];
  j["sigma_delay_fs"] = r.param_sigma[2];
  j["od_visibility_correlation"] = r.od_visibility_correlation;
  j["cost"] = r.cost;
  j["iterations"] = r.iterations;
  j["starts"] = r.starts;
  j["converged"] = r.converged;
  return j;
}

/// Plain `key = value` rendering of the JSON report, one field per line.
inline void write_report_text(std::ostream& os, const FitReport& report) {
  const auto j = to_json(report);
  for (const auto& [key, value] : j.items()) {
    os << key << " = ";
    if (value.is_string()) os << value.get<std::string>();
    else if (value.is_number_float()) os << format_double(value.get<double>());
    else os << value.dump();
    os << '\n';
  }
}

inline void write_report(const std::filesystem::path& dir, const FitReport& report) {
  std::ofstream text(dir / "fit_report.txt");
  std::ofstream json(dir / "fit_report.json");
  if (!text || !json) throw FormatError("cannot write fit report to '" + dir.string() + "'");
  write_report_text(text, report);
  json << to_json(report).dump(2) << '\n';
}

}  // namespace shom
