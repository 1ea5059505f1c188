#pragma once

// The two-copy interferometer: two source splitters, one phase shifter per
// party, and one measurement splitter per party.
//
// Mode layout: A1=0, A2=1, B1=2, B2=3. Photon 1 occupies (A1+B1)/sqrt2, photon 2
// occupies (A2+B2)/sqrt2. phi_x acts on A2, phi_y on B1. Measurement splitters:
// DA1=(A1+A2)/sqrt2, DA2=(A1-A2)/sqrt2, DB1=(B1-B2)/sqrt2, DB2=(B1+B2)/sqrt2.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "twocopy/fock.hpp"

namespace twocopy {

enum class Channel : std::uint8_t { A1 = 0, A2 = 1, B1 = 2, B2 = 3 };
inline constexpr std::size_t kNumChannels = 4;

struct PhaseSettings {
  double phi_x = 0.0;
  double phi_y = 0.0;
  double phi_xy() const { return 0.5 * (phi_x + phi_y); }
};

struct DetectionPattern {
  std::array<std::uint8_t, kNumChannels> n{};

  std::uint8_t n_a1() const { return n[0]; }
  std::uint8_t n_a2() const { return n[1]; }
  std::uint8_t n_b1() const { return n[2]; }
  std::uint8_t n_b2() const { return n[3]; }
  int total() const { return n[0] + n[1] + n[2] + n[3]; }
  bool is_valid() const;

  friend auto operator<=>(const DetectionPattern&, const DetectionPattern&) = default;
};

enum class PatternKind { DoubleClick, InLab, CrossLab };

inline constexpr std::size_t kNumPatterns = 10;

// Row order: Alice doubles, Bob doubles, in-lab A, in-lab B,
// cross-lab (A1,B1), (A2,B2), (A1,B2), (A2,B1).
const std::array<DetectionPattern, kNumPatterns>& all_patterns();
std::optional<std::size_t> pattern_index(const DetectionPattern& p);
PatternKind pattern_kind(const DetectionPattern& p);

class PatternDistribution {
 public:
  explicit PatternDistribution(const std::array<double, kNumPatterns>& probabilities);

  const std::array<double, kNumPatterns>& probabilities() const { return probs_; }
  double probability(const DetectionPattern& p) const;
  double operator[](std::size_t i) const { return probs_[i]; }

 private:
  std::array<double, kNumPatterns> probs_;
};

struct OutcomeGroup {
  int a = 1;
  int b = 1;
  friend bool operator==(const OutcomeGroup&, const OutcomeGroup&) = default;
};

enum class PostSelectionMode { NumberResolving, DiscardDoubles, CrossLabOnly };

std::string_view mode_name(PostSelectionMode mode);
PostSelectionMode parse_mode(std::string_view name);
bool mode_keeps(PostSelectionMode mode, PatternKind kind);

struct GroupProbabilities {
  double p_pp = 0.0;
  double p_pm = 0.0;
  double p_mp = 0.0;
  double p_mm = 0.0;
  double sum() const { return p_pp + p_pm + p_mp + p_mm; }
};

namespace protocol {

inline constexpr fock::ModeId kA1{0};
inline constexpr fock::ModeId kA2{1};
inline constexpr fock::ModeId kB1{2};
inline constexpr fock::ModeId kB2{3};

/// State after the source splitters and phase shifters.
fock::TwoPhotonState build_protocol_state(const PhaseSettings& settings, double v);

/// Closed-form Table-1 distribution generalized to partial overlap v.
PatternDistribution pattern_distribution(const PhaseSettings& settings, double v);

/// Same, from cos(phi_x + phi_y) directly.
std::array<double, kNumPatterns> pattern_probabilities_from_cos(double cos_total, double v);

/// Brute-force route: fock state through the measurement splitters.
PatternDistribution pattern_distribution_oracle(const PhaseSettings& settings, double v);

OutcomeGroup outcome_of(const DetectionPattern& pattern);

GroupProbabilities group_probabilities(const PatternDistribution& dist, PostSelectionMode mode);
GroupProbabilities group_probabilities(const PhaseSettings& settings, double v,
                                       PostSelectionMode mode);

}  // namespace protocol
}  // namespace twocopy
