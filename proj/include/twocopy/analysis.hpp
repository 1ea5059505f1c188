#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "twocopy/chsh.hpp"
#include "twocopy/detectors.hpp"
#include "twocopy/montecarlo.hpp"

namespace twocopy::analysis {

struct FitParameter {
  std::string name;
  double value = 0.0;
  double std = 0.0;  // from Monte Carlo resampling
};

struct FitResult {
  std::vector<FitParameter> params;
  double residual_sum_squares = 0.0;
  std::size_t n_points = 0;
  int iterations = 0;
  int resamples = 0;

  double value(std::string_view name) const;
  double stddev(std::string_view name) const;
};

// ---- calibration -----------------------------------------------------------

/// Relative channel efficiencies (max = 1) from a distinguishable-photon run,
/// by least squares on log coincidence rates, rate(i, j) ~ eta_i * eta_j.
detectors::EfficiencyMap estimate_efficiencies(std::span<const montecarlo::ClickRecord> records);

// ---- HOM visibility --------------------------------------------------------

struct HomVisibility {
  double alice = 0.0;
  double bob = 0.0;
  double mean = 0.0;
};

/// 1 - P(in-lab) / P(doubles) per lab, from efficiency-corrected counts.
HomVisibility hom_visibility_ratio(std::span<const montecarlo::ClickRecord> records,
                                   const detectors::EfficiencyMap& eff,
                                   const detectors::DetectorModel& model);

struct ResampleOptions {
  int resamples = 200;
  std::uint64_t seed = 7;
};

/// Gaussian dip fit of in-lab coincidences; params baseline, v0, center, sigma.
FitResult fit_hom_dip(std::span<const montecarlo::HomScanPoint> scan, const ResampleOptions& opts = {});

// ---- fringes ---------------------------------------------------------------

struct FringeFitOptions {
  detectors::DetectorModel detector = detectors::DetectorModel::pseudo(0.5);
  ResampleOptions resampling{};
};

/// Correlation at one scan point; doubles are split evenly between the two
/// labs and corrected by the detector's pair resolution in number-resolving mode.
double fringe_point_correlation(const montecarlo::FringeScanPoint& pt, PostSelectionMode mode,
                                const detectors::DetectorModel& detector);

/// Fits corr = baseline - amplitude * cos(phi_x + phi_y + 2 offset) (cosine form of
/// the number-resolving cos^2 law in that mode). Params amplitude, phase_offset,
/// baseline; phase_offset acts on the average phase.
FitResult fit_fringe(std::span<const montecarlo::FringeScanPoint> scan, PostSelectionMode mode,
                     const FringeFitOptions& opts = {});

struct FringeFit {
  double phi_x = 0.0;
  FitResult fit;
};

struct Setpoints {
  chsh::BasisAssignment basis;
  double offset = 0.0;
  std::vector<std::string> warnings;
};

/// Basis settings that realize {pi/8, -3pi/8} once the fitted offsets are removed.
Setpoints derive_setpoints(std::span<const FringeFit> fits, double consistency_tolerance = 0.05);

// ---- CHSH ------------------------------------------------------------------

struct ChshOptions {
  detectors::DetectorModel detector = detectors::DetectorModel::pseudo(0.5);
  int resamples = 1000;
  std::uint64_t seed = 11;
  // Per-setting phase jitter folded into the error bar (0 disables).
  double phase_noise_prior_rad = 0.0;
  double visibility_prior = 1.0;
};

struct SettingTally {
  std::int64_t kept_events = 0;
  double weighted_total = 0.0;
  std::array<double, 4> weighted_groups{};  // ++, +-, -+, --
  int windows = 0;
};

struct ChshEstimate {
  double value = 0.0;
  double std = 0.0;
  std::array<std::array<double, 2>, 2> correlations{};
  std::array<std::array<SettingTally, 2>, 2> tallies{};
  PostSelectionMode mode = PostSelectionMode::CrossLabOnly;
};

ChshEstimate estimate_chsh(std::span<const montecarlo::ClickRecord> records, PostSelectionMode mode,
                           const detectors::EfficiencyMap& eff, const ChshOptions& opts = {});

}  // namespace twocopy::analysis
