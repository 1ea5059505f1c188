#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string_view>
#include <utility>
#include <vector>

#include "twocopy/protocol.hpp"
#include "twocopy/random.hpp"

namespace twocopy::detectors {

enum class DetectorKind { IdealNumberResolving, ClickOnly, PseudoNumberResolving };

struct DetectorModel {
  DetectorKind kind = DetectorKind::PseudoNumberResolving;
  double split_ratio = 0.5;

  static DetectorModel ideal() { return {DetectorKind::IdealNumberResolving, 0.5}; }
  static DetectorModel click_only() { return {DetectorKind::ClickOnly, 0.5}; }
  static DetectorModel pseudo(double split_ratio = 0.5);

  /// Probability that two photons that both fired in one channel are reported as 2.
  double pair_resolution() const;
};

std::string_view kind_name(DetectorKind kind);
DetectorKind parse_kind(std::string_view name);

class EfficiencyMap {
 public:
  EfficiencyMap() : eta_{1.0, 1.0, 1.0, 1.0} {}
  explicit EfficiencyMap(const std::array<double, kNumChannels>& eta);

  double operator[](std::size_t ch) const { return eta_[ch]; }
  double operator[](Channel ch) const { return eta_[static_cast<std::size_t>(ch)]; }
  const std::array<double, kNumChannels>& values() const { return eta_; }

 private:
  std::array<double, kNumChannels> eta_;
};

struct ObservedClicks {
  std::array<std::uint8_t, kNumChannels> counts{};
  std::uint8_t lost = 0;

  int detected() const { return counts[0] + counts[1] + counts[2] + counts[3]; }
  friend auto operator<=>(const ObservedClicks&, const ObservedClicks&) = default;
};

std::map<ObservedClicks, double> detection_distribution(const DetectionPattern& pattern,
                                                        const DetectorModel& model,
                                                        const EfficiencyMap& eff);

/// One draw, photon by photon.
ObservedClicks sample_detection(const DetectionPattern& pattern, const DetectorModel& model,
                                const EfficiencyMap& eff, Rng& rng);

// Precomputed inverse-CDF tables over the ten patterns; one uniform per draw.
class DetectionSampler {
 public:
  DetectionSampler(const DetectorModel& model, const EfficiencyMap& eff);

  ObservedClicks sample(std::size_t pattern_index, double u) const;
  const std::vector<std::pair<ObservedClicks, double>>& outcomes(std::size_t pattern_index) const {
    return table_[pattern_index];
  }

 private:
  std::array<std::vector<std::pair<ObservedClicks, double>>, kNumPatterns> table_;
  std::array<std::vector<double>, kNumPatterns> cdf_;
};

}  // namespace twocopy::detectors
