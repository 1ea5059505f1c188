#pragma once

// Seeded simulation of acquisition runs, HOM delay scans and fringe scans.
//
// Every window draws from its own stream derived from (seed, tag, setting,
// window), so output never depends on the number of worker threads.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "twocopy/chsh.hpp"
#include "twocopy/detectors.hpp"
#include "twocopy/random.hpp"

namespace twocopy::montecarlo {

// Which phase span "a fringe" refers to when scaling the phase noise.
enum class FringeReading {
  FullTurn,  // sigma on (phi_x + phi_y) = frac * 2 pi
  HalfTurn,  // sigma on (phi_x + phi_y) = frac * pi
};

struct RunConfig {
  double v0 = 0.952;
  double pair_rate = 500.0;  // pairs reaching the measurement splitters per second
  double acquisition_s = 1.0;
  int windows_per_setting = 30;
  chsh::BasisAssignment basis = chsh::BasisAssignment::standard();
  detectors::DetectorModel detector = detectors::DetectorModel::pseudo(0.5);
  detectors::EfficiencyMap efficiency{};
  double phase_noise_frac = 0.02;
  FringeReading fringe_reading = FringeReading::FullTurn;
  double drift_rad_per_s = 0.0;
  // Instrument offset on the average phase; the summed phase gains twice this.
  double phase_offset_rad = 0.0;
  // Calibration run: delay far outside the coherence length, overlap 0.
  bool distinguishable = false;
  std::uint64_t seed = 1;
  unsigned threads = 1;

  double phase_noise_sigma() const;
  double overlap() const { return distinguishable ? 0.0 : v0; }
};

void validate(const RunConfig& config);

struct ClickRecord {
  std::uint32_t window_id = 0;
  std::uint8_t x = 0;
  std::uint8_t y = 0;
  detectors::ObservedClicks observed;
  double wall_time_s = 0.0;

  friend bool operator==(const ClickRecord&, const ClickRecord&) = default;
};

/// Events with at least one registered photon, in (setting, window, pair) order.
std::vector<ClickRecord> simulate_run(const RunConfig& config);

/// Observed two-photon pattern when exactly two photons registered.
std::optional<DetectionPattern> as_pattern(const detectors::ObservedClicks& obs);

struct ScanConfig {
  std::vector<double> grid;
  double coherence_sigma = 1.0;
  double acquisition_s = 1.0;
};

void validate(const ScanConfig& scan);

struct HomScanPoint {
  double delay = 0.0;
  std::int64_t inlab_coinc = 0;
  std::int64_t double_clicks = 0;
  std::int64_t total_pairs = 0;
  friend bool operator==(const HomScanPoint&, const HomScanPoint&) = default;
};

/// Overlap at delay tau is v0 * exp(-tau^2 / (2 coherence_sigma^2)).
std::vector<HomScanPoint> simulate_hom_scan(const RunConfig& config, const ScanConfig& scan);

struct FringeScanPoint {
  double phi_y = 0.0;
  double phi_x = 0.0;
  std::int64_t n_pp = 0;
  std::int64_t n_pm = 0;
  std::int64_t n_mp = 0;
  std::int64_t n_mm = 0;
  std::int64_t n_doubles = 0;  // observed double clicks, both labs
  friend bool operator==(const FringeScanPoint&, const FringeScanPoint&) = default;
};

/// One window per grid point. Group counts hold non-double two-photon events kept
/// by the mode; double clicks are tallied separately. Drift accumulates over the scan.
std::vector<FringeScanPoint> simulate_fringe_scan(const RunConfig& config, double phi_x_fixed,
                                                  std::span<const double> phi_y_grid,
                                                  PostSelectionMode mode, double point_acquisition_s);

/// Tally of observed outcomes for n pairs at one nominal summed phase.
std::map<detectors::ObservedClicks, std::int64_t> sample_window(
    std::int64_t n_pairs, double total_phase, double phase_sigma, double v,
    const detectors::DetectionSampler& sampler, Rng& rng);

std::int64_t draw_pair_count(double mean, Rng& rng);

}  // namespace twocopy::montecarlo
