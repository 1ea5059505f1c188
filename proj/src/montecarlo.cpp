#include "twocopy/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

#include "twocopy/error.hpp"
#include "twocopy/kernels.hpp"

namespace twocopy::montecarlo {
namespace {

using std::numbers::pi;

// Stream tags, one per simulation kind.
constexpr std::uint64_t kRunTag = 1;
constexpr std::uint64_t kHomTag = 2;
constexpr std::uint64_t kFringeTag = 3;

int categorical(const std::array<double, kNumPatterns>& probs, double u) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < kNumPatterns; ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(kNumPatterns - 1);
}

// Multinomial by sequential binomials.
template <std::size_t N>
std::array<std::int64_t, N> multinomial(std::int64_t n, const std::array<double, N>& probs, Rng& rng) {
  std::array<std::int64_t, N> out{};
  double remaining_p = 1.0;
  std::int64_t remaining_n = n;
  for (std::size_t i = 0; i < N && remaining_n > 0; ++i) {
    if (i + 1 == N) {
      out[i] = remaining_n;
      break;
    }
    const double q = remaining_p > 0.0 ? std::clamp(probs[i] / remaining_p, 0.0, 1.0) : 0.0;
    out[i] = std::binomial_distribution<std::int64_t>(remaining_n, q)(rng);
    remaining_n -= out[i];
    remaining_p -= probs[i];
  }
  return out;
}

// Per-pair summed phases and their cosines for one window.
std::vector<double> pair_cosines(std::int64_t n, double total_phase, double sigma, Rng& rng) {
  std::vector<double> args(static_cast<std::size_t>(n), total_phase);
  if (sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, sigma);
    for (double& a : args) a += noise(rng);
  }
  std::vector<double> s(args.size());
  std::vector<double> c(args.size());
  kernels::active().sincos(args, s, c);
  return c;
}

template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += threads) fn(i);
    });
  }
}

}  // namespace

double RunConfig::phase_noise_sigma() const {
  const double span = fringe_reading == FringeReading::FullTurn ? 2.0 * pi : pi;
  return phase_noise_frac * span;
}

void validate(const RunConfig& c) {
  if (!(c.v0 >= 0.0 && c.v0 <= 1.0)) throw ValidationError("v0 must lie in [0, 1]");
  if (!(c.pair_rate >= 0.0) || !std::isfinite(c.pair_rate)) throw ValidationError("pair_rate must be >= 0");
  if (!(c.acquisition_s > 0.0)) throw ValidationError("acquisition_s must be positive");
  if (c.windows_per_setting <= 0) throw ValidationError("windows_per_setting must be positive");
  if (!(c.phase_noise_frac >= 0.0)) throw ValidationError("phase_noise_frac must be >= 0");
  if (!std::isfinite(c.drift_rad_per_s) || !std::isfinite(c.phase_offset_rad)) {
    throw ValidationError("phase drift and offset must be finite");
  }
  if (c.detector.kind == detectors::DetectorKind::PseudoNumberResolving) {
    detectors::DetectorModel::pseudo(c.detector.split_ratio);
  }
}

void validate(const ScanConfig& scan) {
  if (scan.grid.empty()) throw ValidationError("scan grid is empty");
  for (std::size_t i = 1; i < scan.grid.size(); ++i) {
    if (!(scan.grid[i] > scan.grid[i - 1])) throw ValidationError("scan grid must be increasing");
  }
  if (!(scan.coherence_sigma > 0.0)) throw ValidationError("coherence_sigma must be positive");
  if (!(scan.acquisition_s > 0.0)) throw ValidationError("scan acquisition_s must be positive");
}

std::int64_t draw_pair_count(double mean, Rng& rng) {
  if (mean <= 0.0) return 0;
  return std::poisson_distribution<std::int64_t>(mean)(rng);
}

std::optional<DetectionPattern> as_pattern(const detectors::ObservedClicks& obs) {
  if (obs.detected() != 2) return std::nullopt;
  return DetectionPattern{obs.counts};
}

std::map<detectors::ObservedClicks, std::int64_t> sample_window(
    std::int64_t n_pairs, double total_phase, double phase_sigma, double v,
    const detectors::DetectionSampler& sampler, Rng& rng) {
  std::map<detectors::ObservedClicks, std::int64_t> tally;
  if (n_pairs <= 0) return tally;
  if (phase_sigma == 0.0) {
    // Constant distribution across the window: multinomial twice over.
    const auto probs = protocol::pattern_probabilities_from_cos(std::cos(total_phase), v);
    const auto pattern_counts = multinomial(n_pairs, probs, rng);
    for (std::size_t i = 0; i < kNumPatterns; ++i) {
      std::int64_t remaining = pattern_counts[i];
      const auto& outcomes = sampler.outcomes(i);
      double remaining_p = 1.0;
      for (std::size_t k = 0; k < outcomes.size() && remaining > 0; ++k) {
        std::int64_t take = remaining;
        if (k + 1 < outcomes.size()) {
          const double q = std::clamp(outcomes[k].second / remaining_p, 0.0, 1.0);
          take = std::binomial_distribution<std::int64_t>(remaining, q)(rng);
        }
        remaining_p -= outcomes[k].second;
        remaining -= take;
        if (take > 0) tally[outcomes[k].first] += take;
      }
    }
    return tally;
  }
  const auto cosines = pair_cosines(n_pairs, total_phase, phase_sigma, rng);
  for (double c : cosines) {
    const auto probs = protocol::pattern_probabilities_from_cos(c, v);
    const int idx = categorical(probs, uniform01(rng));
    ++tally[sampler.sample(static_cast<std::size_t>(idx), uniform01(rng))];
  }
  return tally;
}

std::vector<ClickRecord> simulate_run(const RunConfig& config) {
  validate(config);
  const detectors::DetectionSampler sampler(config.detector, config.efficiency);
  const auto windows = static_cast<std::size_t>(config.windows_per_setting);
  const double sigma = config.phase_noise_sigma();
  const double v = config.overlap();

  std::vector<std::vector<ClickRecord>> per_window(4 * windows);
  parallel_for(per_window.size(), config.threads, [&](std::size_t id) {
    const std::size_t setting = id / windows;
    const std::size_t w = id % windows;
    const int x = static_cast<int>(setting / 2);
    const int y = static_cast<int>(setting % 2);
    Rng rng = make_stream(config.seed, {kRunTag, setting, w});

    const double t0 = static_cast<double>(id) * config.acquisition_s;
    const auto ps = config.basis.settings(x, y);
    const double phase = ps.phi_x + ps.phi_y + 2.0 * config.phase_offset_rad +
                         config.drift_rad_per_s * (t0 + 0.5 * config.acquisition_s);

    const std::int64_t n = draw_pair_count(config.pair_rate * config.acquisition_s, rng);
    const auto cosines = pair_cosines(n, phase, sigma, rng);
    auto& out = per_window[id];
    for (double c : cosines) {
      const auto probs = protocol::pattern_probabilities_from_cos(c, v);
      const int idx = categorical(probs, uniform01(rng));
      const auto obs = sampler.sample(static_cast<std::size_t>(idx), uniform01(rng));
      if (obs.detected() == 0) continue;
      out.push_back(ClickRecord{static_cast<std::uint32_t>(id), static_cast<std::uint8_t>(x),
                                static_cast<std::uint8_t>(y), obs, t0});
    }
  });

  std::vector<ClickRecord> records;
  std::size_t total = 0;
  for (const auto& w : per_window) total += w.size();
  records.reserve(total);
  for (auto& w : per_window) records.insert(records.end(), w.begin(), w.end());
  return records;
}

std::vector<HomScanPoint> simulate_hom_scan(const RunConfig& config, const ScanConfig& scan) {
  validate(config);
  validate(scan);
  const detectors::DetectionSampler sampler(config.detector, config.efficiency);
  const auto ps = config.basis.settings(0, 0);
  const double phase = ps.phi_x + ps.phi_y + 2.0 * config.phase_offset_rad;

  std::vector<HomScanPoint> out(scan.grid.size());
  parallel_for(scan.grid.size(), config.threads, [&](std::size_t i) {
    Rng rng = make_stream(config.seed, {kHomTag, i});
    const double tau = scan.grid[i];
    const double z = tau / scan.coherence_sigma;
    const double v = config.distinguishable ? 0.0 : config.v0 * std::exp(-0.5 * z * z);
    HomScanPoint pt;
    pt.delay = tau;
    pt.total_pairs = draw_pair_count(config.pair_rate * scan.acquisition_s, rng);
    // In-lab and double-click rates do not depend on the phases.
    for (const auto& [obs, count] : sample_window(pt.total_pairs, phase, 0.0, v, sampler, rng)) {
      auto pat = as_pattern(obs);
      if (!pat) continue;
      const auto kind = pattern_kind(*pat);
      if (kind == PatternKind::InLab) pt.inlab_coinc += count;
      if (kind == PatternKind::DoubleClick) pt.double_clicks += count;
    }
    out[i] = pt;
  });
  return out;
}

std::vector<FringeScanPoint> simulate_fringe_scan(const RunConfig& config, double phi_x_fixed,
                                                  std::span<const double> phi_y_grid,
                                                  PostSelectionMode mode, double point_acquisition_s) {
  validate(config);
  if (phi_y_grid.empty()) throw ValidationError("fringe grid is empty");
  if (!(point_acquisition_s > 0.0)) throw ValidationError("point acquisition must be positive");
  const detectors::DetectionSampler sampler(config.detector, config.efficiency);
  const double sigma = config.phase_noise_sigma();
  const double v = config.overlap();
  // Distinct sub-streams for the two Alice settings of one calibration.
  const auto x_key = static_cast<std::uint64_t>(std::llround(phi_x_fixed * 1e9));

  std::vector<FringeScanPoint> out(phi_y_grid.size());
  parallel_for(phi_y_grid.size(), config.threads, [&](std::size_t i) {
    Rng rng = make_stream(config.seed, {kFringeTag, x_key, i});
    const double t_mid = (static_cast<double>(i) + 0.5) * point_acquisition_s;
    const double phase = phi_x_fixed + phi_y_grid[i] + 2.0 * config.phase_offset_rad +
                         config.drift_rad_per_s * t_mid;
    FringeScanPoint pt;
    pt.phi_x = phi_x_fixed;
    pt.phi_y = phi_y_grid[i];
    const std::int64_t n = draw_pair_count(config.pair_rate * point_acquisition_s, rng);
    for (const auto& [obs, count] : sample_window(n, phase, sigma, v, sampler, rng)) {
      auto pat = as_pattern(obs);
      if (!pat) continue;
      const auto kind = pattern_kind(*pat);
      if (kind == PatternKind::DoubleClick) {
        pt.n_doubles += count;
        continue;
      }
      if (!mode_keeps(mode, kind)) continue;
      const auto o = protocol::outcome_of(*pat);
      if (o.a > 0 && o.b > 0) pt.n_pp += count;
      if (o.a > 0 && o.b < 0) pt.n_pm += count;
      if (o.a < 0 && o.b > 0) pt.n_mp += count;
      if (o.a < 0 && o.b < 0) pt.n_mm += count;
    }
    out[i] = pt;
  });
  return out;
}

}  // namespace twocopy::montecarlo
