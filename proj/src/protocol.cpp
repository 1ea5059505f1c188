#include "twocopy/protocol.hpp"

#include <cassert>
#include <cmath>
#include <numeric>

#include "twocopy/error.hpp"

namespace twocopy {
namespace {

void check_overlap(double v) {
  if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("overlap v must lie in [0, 1]");
}

}  // namespace

bool DetectionPattern::is_valid() const {
  if (total() != 2) return false;
  for (auto c : n) {
    if (c > 2) return false;
  }
  return true;
}

const std::array<DetectionPattern, kNumPatterns>& all_patterns() {
  static const std::array<DetectionPattern, kNumPatterns> patterns{{
      {{2, 0, 0, 0}},
      {{0, 2, 0, 0}},
      {{0, 0, 2, 0}},
      {{0, 0, 0, 2}},
      {{1, 1, 0, 0}},
      {{0, 0, 1, 1}},
      {{1, 0, 1, 0}},
      {{0, 1, 0, 1}},
      {{1, 0, 0, 1}},
      {{0, 1, 1, 0}},
  }};
  return patterns;
}

std::optional<std::size_t> pattern_index(const DetectionPattern& p) {
  const auto& all = all_patterns();
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (all[i] == p) return i;
  }
  return std::nullopt;
}

PatternKind pattern_kind(const DetectionPattern& p) {
  for (auto c : p.n) {
    if (c == 2) return PatternKind::DoubleClick;
  }
  const int alice = p.n[0] + p.n[1];
  return alice == 1 ? PatternKind::CrossLab : PatternKind::InLab;
}

PatternDistribution::PatternDistribution(const std::array<double, kNumPatterns>& probabilities)
    : probs_(probabilities) {
  double s = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0)) throw ValidationError("negative pattern probability");
    s += p;
  }
  if (std::abs(s - 1.0) > 1e-12) throw ValidationError("pattern probabilities do not sum to 1");
}

double PatternDistribution::probability(const DetectionPattern& p) const {
  auto idx = pattern_index(p);
  if (!idx) throw ValidationError("not one of the ten two-photon patterns");
  return probs_[*idx];
}

std::string_view mode_name(PostSelectionMode mode) {
  switch (mode) {
    case PostSelectionMode::NumberResolving:
      return "number-resolving";
    case PostSelectionMode::DiscardDoubles:
      return "discard-doubles";
    case PostSelectionMode::CrossLabOnly:
      return "cross-lab-only";
  }
  return "unknown";
}

PostSelectionMode parse_mode(std::string_view name) {
  for (auto m : {PostSelectionMode::NumberResolving, PostSelectionMode::DiscardDoubles,
                 PostSelectionMode::CrossLabOnly}) {
    if (mode_name(m) == name) return m;
  }
  throw ValidationError("unknown post-selection mode '" + std::string(name) + "'");
}

bool mode_keeps(PostSelectionMode mode, PatternKind kind) {
  switch (mode) {
    case PostSelectionMode::NumberResolving:
      return true;
    case PostSelectionMode::DiscardDoubles:
      return kind != PatternKind::DoubleClick;
    case PostSelectionMode::CrossLabOnly:
      return kind == PatternKind::CrossLab;
  }
  return false;
}

namespace protocol {

fock::TwoPhotonState build_protocol_state(const PhaseSettings& settings, double v) {
  check_overlap(v);
  const double h = 1.0 / std::sqrt(2.0);
  fock::SinglePhotonWavefunction photon1({{kA1, h}, {kB1, h}}, fock::InternalVector::basis(0));
  fock::SinglePhotonWavefunction photon2({{kA2, h}, {kB2, h}}, fock::overlap_from_visibility(v));
  auto state = fock::product_state(photon1, photon2, 4);
  state = fock::apply_element(state, fock::OpticalElement::phase(kA2, settings.phi_x));
  state = fock::apply_element(state, fock::OpticalElement::phase(kB1, settings.phi_y));
  return state;
}

std::array<double, kNumPatterns> pattern_probabilities_from_cos(double cos_total, double v) {
  const double dbl = (1.0 + v) / 16.0;
  const double inlab = (1.0 - v) / 8.0;
  const double same = (1.0 - v * cos_total) / 8.0;  // (A1,B1), (A2,B2)
  const double cross = (1.0 + v * cos_total) / 8.0;  // (A1,B2), (A2,B1)
  return {dbl, dbl, dbl, dbl, inlab, inlab, same, same, cross, cross};
}

PatternDistribution pattern_distribution(const PhaseSettings& settings, double v) {
  check_overlap(v);
  return PatternDistribution(
      pattern_probabilities_from_cos(std::cos(settings.phi_x + settings.phi_y), v));
}

PatternDistribution pattern_distribution_oracle(const PhaseSettings& settings, double v) {
  auto state = build_protocol_state(settings, v);
  using fock::Complex;
  const double h = 1.0 / std::sqrt(2.0);
  // Alice: (A1, A2) -> (DA1, DA2) = ((A1+A2), (A1-A2)) / sqrt2
  state = fock::apply_element(state, fock::OpticalElement::balanced_splitter(kA1, kA2));
  // Bob: (B1, B2) -> (DB1, DB2) = ((B1-B2), (B1+B2)) / sqrt2
  state = fock::apply_element(
      state, fock::OpticalElement::beam_splitter(
                 kB1, kB2, {{{Complex{h}, Complex{-h}}, {Complex{h}, Complex{h}}}}));

  std::array<double, kNumPatterns> probs{};
  for (const auto& [occ, p] : fock::occupation_probabilities(state)) {
    DetectionPattern pat{{occ[0], occ[1], occ[2], occ[3]}};
    auto idx = pattern_index(pat);
    assert(idx.has_value());
    probs[*idx] += p;
  }
  // Renormalize away rounding at the 1e-16 level.
  const double s = std::accumulate(probs.begin(), probs.end(), 0.0);
  for (double& p : probs) p /= s;
  return PatternDistribution(probs);
}

OutcomeGroup outcome_of(const DetectionPattern& pattern) {
  if (!pattern.is_valid()) throw ValidationError("detection pattern must hold exactly 2 photons");
  // Local rule: a double click or a lone click in the first detector is -1.
  auto local = [](std::uint8_t d1, std::uint8_t d2) {
    if (d1 == 2 || d2 == 2) return -1;
    if (d1 == 1 && d2 == 0) return -1;
    return 1;
  };
  return OutcomeGroup{local(pattern.n[0], pattern.n[1]), local(pattern.n[2], pattern.n[3])};
}

GroupProbabilities group_probabilities(const PatternDistribution& dist, PostSelectionMode mode) {
  GroupProbabilities g;
  double kept = 0.0;
  const auto& patterns = all_patterns();
  for (std::size_t i = 0; i < kNumPatterns; ++i) {
    if (!mode_keeps(mode, pattern_kind(patterns[i]))) continue;
    const double p = dist[i];
    kept += p;
    auto o = outcome_of(patterns[i]);
    if (o.a > 0 && o.b > 0) g.p_pp += p;
    if (o.a > 0 && o.b < 0) g.p_pm += p;
    if (o.a < 0 && o.b > 0) g.p_mp += p;
    if (o.a < 0 && o.b < 0) g.p_mm += p;
  }
  assert(kept > 0.0);
  g.p_pp /= kept;
  g.p_pm /= kept;
  g.p_mp /= kept;
  g.p_mm /= kept;
  return g;
}

GroupProbabilities group_probabilities(const PhaseSettings& settings, double v,
                                       PostSelectionMode mode) {
  return group_probabilities(pattern_distribution(settings, v), mode);
}

}  // namespace protocol
}  // namespace twocopy
