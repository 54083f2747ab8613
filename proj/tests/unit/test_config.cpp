#include <catch_amalgamated.hpp>

#include <sstream>

#include "shom/config.hpp"

using namespace shom;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinRel;

TEST_CASE("defaults follow the experimental setup") {
  const ExperimentConfig c;
  CHECK(c.temperature_k == 461.15);
  CHECK(c.cell_length_m == 0.05);
  CHECK(c.filter_center_nm == 796.7);
  CHECK(c.jsa_fwhm_nm == 10.0);
  CHECK(c.grid_bins == 140);
  CHECK(c.detection.f_rep == 80e6);
  CHECK(c.detection.t_exp == 11e-6);
  CHECK(c.detection.repetitions() == 880);
  CHECK_FALSE(c.optical_depth.has_value());
  CHECK_THAT(c.od(), WithinRel(4658.7415062561543, 1e-12));
  CHECK_NOTHROW(validate(c));
}

TEST_CASE("written defaults parse back identically") {
  const ExperimentConfig c;
  const std::string text = to_string(c);
  CHECK(parse_config(text) == c);
  CHECK_THAT(text, ContainsSubstring("temperature = 461.15 K\n"));
  CHECK_THAT(text, ContainsSubstring("t_exp = 1.1e-05 s\n"));
}

TEST_CASE("round trip of a non-default config") {
  ExperimentConfig c;
  c.temperature_k = 359.15;
  c.optical_depth = 21.5;
  c.jsa_correlation = -0.75;
  c.residual_delay_fs = -12.25;
  c.apply_absorption = true;
  c.detection.seed = 0xfeedbeefULL;
  c.detection.dark_rate = 0.01;
  c.frames = 12345;
  c.fit.fit_delay = false;
  c.fit.mask_radius = 0;
  c.fit.od = {1.0, 1e4};
  c.output_dir = "results/86C";
  CHECK(parse_config(to_string(c)) == c);
}

TEST_CASE("units are converted") {
  const ExperimentConfig c = parse_config(
      "temperature = 188 C\n"
      "cell_length = 50 mm\n"
      "filter_center = 0.0007967 mm\n"
      "jsa_fwhm = 0.01 um\n"
      "f_rep = 80 MHz\n"
      "t_exp = 11 us\n"
      "residual_delay = 0.5 ps\n");
  CHECK_THAT(c.temperature_k, WithinRel(461.15, 1e-15));
  CHECK_THAT(c.cell_length_m, WithinRel(0.05, 1e-15));
  CHECK_THAT(c.filter_center_nm, WithinRel(796.7, 1e-14));
  CHECK_THAT(c.jsa_fwhm_nm, WithinRel(10.0, 1e-14));
  CHECK_THAT(c.detection.f_rep, WithinRel(80e6, 1e-15));
  CHECK_THAT(c.detection.t_exp, WithinRel(11e-6, 1e-15));
  CHECK_THAT(c.residual_delay_fs, WithinRel(500.0, 1e-14));
  CHECK(c.detection.repetitions() == 880);
}

TEST_CASE("comments, blank lines and auto OD") {
  const ExperimentConfig c = parse_config(
      "# 86 C run\n"
      "\n"
      "temperature = 86 C   # cool cell\n"
      "optical_depth = 0\n"
      "apply_absorption = yes\n");
  CHECK(c.optical_depth == 0.0);
  CHECK(c.od() == 0.0);
  CHECK(c.apply_absorption);
  CHECK_FALSE(parse_config("optical_depth = auto\n").optical_depth.has_value());
}

TEST_CASE("diagnostics carry line numbers") {
  const auto fails = [](const std::string& text, const std::string& what, int line) {
    try {
      parse_config(text);
      FAIL("accepted: " << text);
    } catch (const ConfigError& e) {
      CHECK_THAT(std::string(e.what()), ContainsSubstring(what));
      CHECK(e.line() == line);
    }
  };
  fails("temperature = 188 C\nbogus = 1\n", "unknown key 'bogus'", 2);
  fails("\n\ntemperature = 188\n", "missing unit", 3);
  fails("temperature = 188 nm\n", "does not fit", 1);
  fails("temperature = hot C\n", "invalid number", 1);
  fails("grid_bins = 12.5\n", "invalid integer", 1);
  fails("eta = 0.5 s\n", "unexpected unit", 1);
  fails("apply_absorption = maybe\n", "invalid boolean", 1);
  fails("seed = 1\nseed = 2\n", "duplicate key", 2);
  fails("just words\n", "expected 'key = value'", 1);
  fails("chi =\n", "empty value", 1);
  fails("temperature = 188 furlongs\n", "does not fit", 1);
}

TEST_CASE("semantic validation") {
  CHECK_THROWS_AS(parse_config("visibility = 1.5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("grid_bins = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("grid_start = 810 nm\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("fit_kernel_width = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("eta = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("jsa_correlation = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("fit_od_min = 10\nfit_od_max = 1\n"), ConfigError);
}

TEST_CASE("overrides") {
  ExperimentConfig c;
  apply_setting(c, "temperature=174 C", 0);
  apply_setting(c, " frames = 99 ", 0);
  CHECK_THAT(c.temperature_k, WithinRel(447.15, 1e-15));
  CHECK(c.frames == 99);
  CHECK_THROWS_AS(apply_setting(c, "nope=1", 0), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/shom.cfg"), ConfigError);
}
