#include "twocopy/detectors.hpp"

#include <cmath>
#include <string>

#include "twocopy/error.hpp"

namespace twocopy::detectors {
namespace {

// Reported count for j photons that survived thinning in one channel.
std::vector<std::pair<std::uint8_t, double>> report(int fired, const DetectorModel& model) {
  if (fired < 2) return {{static_cast<std::uint8_t>(fired), 1.0}};
  switch (model.kind) {
    case DetectorKind::IdealNumberResolving:
      return {{2, 1.0}};
    case DetectorKind::ClickOnly:
      return {{1, 1.0}};
    case DetectorKind::PseudoNumberResolving: {
      const double q = model.pair_resolution();
      return {{2, q}, {1, 1.0 - q}};
    }
  }
  return {};
}

// Distribution over reported counts for one channel holding k photons.
std::vector<std::pair<std::uint8_t, double>> channel_distribution(int k, double eta,
                                                                  const DetectorModel& model) {
  std::vector<std::pair<std::uint8_t, double>> out;
  for (int j = 0; j <= k; ++j) {
    // Binomial(k, eta)
    const double binom = (k == 2 && j == 1 ? 2.0 : 1.0) * std::pow(eta, j) * std::pow(1.0 - eta, k - j);
    if (binom == 0.0) continue;
    for (auto [r, p] : report(j, model)) {
      bool merged = false;
      for (auto& [r0, p0] : out) {
        if (r0 == r) {
          p0 += binom * p;
          merged = true;
        }
      }
      if (!merged) out.emplace_back(r, binom * p);
    }
  }
  return out;
}

}  // namespace

DetectorModel DetectorModel::pseudo(double split_ratio) {
  if (!(split_ratio > 0.0 && split_ratio < 1.0)) {
    throw ValidationError("split ratio must lie in (0, 1)");
  }
  return {DetectorKind::PseudoNumberResolving, split_ratio};
}

double DetectorModel::pair_resolution() const {
  switch (kind) {
    case DetectorKind::IdealNumberResolving:
      return 1.0;
    case DetectorKind::ClickOnly:
      return 0.0;
    case DetectorKind::PseudoNumberResolving:
      // Each photon routes independently; a double needs one per sub-detector.
      return 2.0 * split_ratio * (1.0 - split_ratio);
  }
  return 0.0;
}

std::string_view kind_name(DetectorKind kind) {
  switch (kind) {
    case DetectorKind::IdealNumberResolving:
      return "ideal";
    case DetectorKind::ClickOnly:
      return "click-only";
    case DetectorKind::PseudoNumberResolving:
      return "pseudo";
  }
  return "unknown";
}

DetectorKind parse_kind(std::string_view name) {
  for (auto k : {DetectorKind::IdealNumberResolving, DetectorKind::ClickOnly,
                 DetectorKind::PseudoNumberResolving}) {
    if (kind_name(k) == name) return k;
  }
  throw ValidationError("unknown detector model '" + std::string(name) + "'");
}

EfficiencyMap::EfficiencyMap(const std::array<double, kNumChannels>& eta) : eta_(eta) {
  for (double e : eta_) {
    if (!(e > 0.0 && e <= 1.0)) throw ValidationError("channel efficiency must lie in (0, 1]");
  }
}

std::map<ObservedClicks, double> detection_distribution(const DetectionPattern& pattern,
                                                        const DetectorModel& model,
                                                        const EfficiencyMap& eff) {
  if (!pattern.is_valid()) throw ValidationError("detection pattern must hold exactly 2 photons");
  std::map<ObservedClicks, double> dist{{ObservedClicks{}, 1.0}};
  for (std::size_t ch = 0; ch < kNumChannels; ++ch) {
    const int k = pattern.n[ch];
    if (k == 0) continue;
    std::map<ObservedClicks, double> next;
    for (const auto& [obs, p] : dist) {
      for (auto [r, q] : channel_distribution(k, eff[ch], model)) {
        ObservedClicks o = obs;
        o.counts[ch] = r;
        next[o] += p * q;
      }
    }
    dist = std::move(next);
  }
  std::map<ObservedClicks, double> out;
  for (const auto& [obs, p] : dist) {
    ObservedClicks o = obs;
    o.lost = static_cast<std::uint8_t>(2 - o.detected());
    out[o] += p;
  }
  return out;
}

ObservedClicks sample_detection(const DetectionPattern& pattern, const DetectorModel& model,
                                const EfficiencyMap& eff, Rng& rng) {
  if (!pattern.is_valid()) throw ValidationError("detection pattern must hold exactly 2 photons");
  ObservedClicks out;
  for (std::size_t ch = 0; ch < kNumChannels; ++ch) {
    int fired = 0;
    // Sub-detector each surviving photon lands on (pseudo model only).
    bool first_sub = false;
    bool second_sub = false;
    for (int photon = 0; photon < pattern.n[ch]; ++photon) {
      if (uniform01(rng) >= eff[ch]) continue;
      ++fired;
      if (model.kind == DetectorKind::PseudoNumberResolving) {
        (uniform01(rng) < model.split_ratio ? first_sub : second_sub) = true;
      }
    }
    std::uint8_t reported = static_cast<std::uint8_t>(fired);
    if (fired == 2) {
      if (model.kind == DetectorKind::ClickOnly) reported = 1;
      if (model.kind == DetectorKind::PseudoNumberResolving) reported = (first_sub && second_sub) ? 2 : 1;
    }
    out.counts[ch] = reported;
  }
  out.lost = static_cast<std::uint8_t>(2 - out.detected());
  return out;
}

DetectionSampler::DetectionSampler(const DetectorModel& model, const EfficiencyMap& eff) {
  const auto& patterns = all_patterns();
  for (std::size_t i = 0; i < kNumPatterns; ++i) {
    double acc = 0.0;
    for (const auto& [obs, p] : detection_distribution(patterns[i], model, eff)) {
      table_[i].emplace_back(obs, p);
      acc += p;
      cdf_[i].push_back(acc);
    }
  }
}

ObservedClicks DetectionSampler::sample(std::size_t pattern_index, double u) const {
  const auto& cdf = cdf_[pattern_index];
  const double scaled = u * cdf.back();
  for (std::size_t k = 0; k + 1 < cdf.size(); ++k) {
    if (scaled < cdf[k]) return table_[pattern_index][k].first;
  }
  return table_[pattern_index].back().first;
}

}  // namespace twocopy::detectors
