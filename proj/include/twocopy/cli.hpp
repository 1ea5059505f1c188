#pragma once

// Command-line front end. parse_invocation validates flags and config files;
// execute runs one subcommand and reports errors as JSON on the error stream.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "twocopy/analysis.hpp"
#include "twocopy/montecarlo.hpp"

namespace twocopy::cli {

enum class Format { Json, Csv };

struct CommandConfig {
  std::string command;
  std::string help_text;  // non-empty when help was requested
  Format format = Format::Json;
  std::string in_path;
  std::string out_path;  // empty writes to the output stream

  // table / optimize
  PhaseSettings phases{};
  double overlap = 1.0;
  PostSelectionMode mode = PostSelectionMode::CrossLabOnly;
  bool mode_given = false;

  // theory
  std::vector<double> v_grid;

  // simulate / hom-scan / fringe-scan
  montecarlo::RunConfig run{};
  montecarlo::ScanConfig scan{};
  std::vector<double> fringe_phi_x;
  std::vector<double> fringe_phi_y;

  // calibration and analysis
  std::optional<detectors::EfficiencyMap> efficiency;
  detectors::DetectorModel detector = detectors::DetectorModel::pseudo(0.5);
  int resamples = 0;  // 0 keeps the estimator default
  std::uint64_t seed = 0;
  bool seed_given = false;
  double phase_noise_prior_rad = 0.0;
  double tolerance = 0.05;
};

/// argv[0] is the program name. Throws UsageError, IoError or ValidationError.
CommandConfig parse_invocation(const std::vector<std::string>& argv);

/// Runs a parsed command; returns the process exit status.
int execute(const CommandConfig& config, std::ostream& out, std::ostream& err);

/// parse_invocation plus execute, with every failure mapped to error JSON.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace twocopy::cli
