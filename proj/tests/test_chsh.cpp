#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "test_util.hpp"
#include "twocopy/chsh.hpp"
#include "twocopy/error.hpp"

using namespace twocopy;
using namespace twocopy::chsh;
using twocopy::tu::pi;

namespace {
const double kSqrt2 = std::sqrt(2.0);
constexpr PostSelectionMode kClo = PostSelectionMode::CrossLabOnly;
constexpr PostSelectionMode kNr = PostSelectionMode::NumberResolving;
constexpr PostSelectionMode kDd = PostSelectionMode::DiscardDoubles;
}  // namespace

TEST(Correlation, Examples) {
  EXPECT_DOUBLE_EQ(correlation({0.5, 0, 0, 0.5}), 1.0);
  EXPECT_DOUBLE_EQ(correlation({0, 0.5, 0.5, 0}), -1.0);
  const auto g = protocol::group_probabilities(PhaseSettings{pi / 8, pi / 8}, 1.0, kNr);
  EXPECT_NEAR(correlation(g), -std::pow(std::cos(pi / 8), 2), 1e-12);
}

TEST(ChshValue, Examples) {
  const auto b = BasisAssignment::standard();
  EXPECT_NEAR(chsh_value(b, 1.0, kClo).value, 2 * kSqrt2, 1e-12);
  EXPECT_NEAR(chsh_value(b, 1.0, kNr).value, 1 + kSqrt2, 1e-12);
  EXPECT_NEAR(chsh_value(b, 0.95, kClo).value, 2.687, 1e-3);
  EXPECT_NEAR(chsh_value(b, 0.95, kNr).value, 2.293, 1e-3);
}

TEST(ChshValue, RecomputableFromCorrelations) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ang(-pi, pi), vis(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const BasisAssignment b{ang(rng), ang(rng), ang(rng), ang(rng)};
    for (auto m : {kClo, kNr, kDd}) {
      const auto r = chsh_value(b, vis(rng), m);
      ASSERT_NEAR(r.value, combine(r.correlations), 1e-12);
      for (const auto& row : r.correlations) {
        for (double c : row) ASSERT_LE(std::abs(c), 1.0 + 1e-12);
      }
      ASSERT_LE(r.value, 2 * kSqrt2 + 1e-12);
    }
  }
}

TEST(ClosedForm, Examples) {
  EXPECT_NEAR(closed_form_chsh(pi / 8, 1.0, kClo), 2 * kSqrt2, 1e-12);
  EXPECT_NEAR(closed_form_chsh(0.0, 1.0, kNr), 2.0, 1e-12);
  EXPECT_NEAR(closed_form_chsh(pi / 8, 0.5, kNr), 0.5 * (1 + kSqrt2), 1e-12);
  EXPECT_NEAR(chsh_value(BasisAssignment::from_theta(pi / 8), 0.5, kNr).value, 0.5 * (1 + kSqrt2), 1e-12);
  EXPECT_THROW(closed_form_chsh(pi / 8, 1.0, kDd), ValidationError);
}

TEST(ClosedForm, MatchesChshValueRandomBattery) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> ang(-pi, pi), vis(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const double theta = ang(rng), v = vis(rng);
    for (auto m : {kClo, kNr}) {
      ASSERT_NEAR(closed_form_chsh(theta, v, m), chsh_value(BasisAssignment::from_theta(theta), v, m).value, 1e-12);
    }
  }
}

TEST(Optimize, Optima) {
  const auto a = optimize_theta(1.0, kClo);
  EXPECT_NEAR(a.theta, pi / 8, 1e-6);
  EXPECT_NEAR(a.value, 2 * kSqrt2, 1e-9);
  const auto b = optimize_theta(1.0, kNr);
  EXPECT_NEAR(b.theta, pi / 8, 1e-6);
  EXPECT_NEAR(b.value, 1 + kSqrt2, 1e-9);
  for (auto m : {kClo, kNr}) {
    const auto c = optimize_theta(0.3, m);
    const auto d = optimize_theta(1.0, m);
    EXPECT_NEAR(c.theta, d.theta, 1e-6);
    EXPECT_NEAR(c.value, 0.3 * d.value, 1e-9);
  }
}

TEST(Optimize, ArgmaxInvariantInOverlap) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> vis(1e-3, 1.0);
  for (auto m : {kClo, kNr}) {
    const double ref = optimize_theta(1.0, m).theta;
    for (int trial = 0; trial < 50; ++trial) ASSERT_NEAR(optimize_theta(vis(rng), m).theta, ref, 1e-6);
  }
}

TEST(Threshold, Values) {
  const double clo = violation_threshold(kClo);
  const double nr = violation_threshold(kNr);
  EXPECT_NEAR(clo, 1 / kSqrt2, 1e-6);
  EXPECT_NEAR(nr, 2 * (kSqrt2 - 1), 1e-6);
  EXPECT_LT(clo, nr);
  EXPECT_THROW(violation_threshold(kDd), ValidationError);
}

TEST(Threshold, NoViolationBelow) {
  for (auto m : {kClo, kNr}) {
    const double vt = violation_threshold(m);
    for (double v : {0.0, 0.25 * vt, 0.5 * vt, 0.9 * vt, vt - 1e-6}) {
      EXPECT_LE(optimize_theta(v, m).value, 2.0 + 1e-12);
      for (double theta = 0; theta < pi; theta += 0.01) EXPECT_LE(closed_form_chsh(theta, v, m), 2.0 + 1e-12);
    }
    EXPECT_GT(optimize_theta(vt + 1e-6, m).value, 2.0);
  }
}

TEST(TheoryCurve, EndpointsAndLinearity) {
  std::vector<double> grid{0.0, 0.5, 1.0};
  const auto clo = theory_curve(kClo, grid);
  const auto nr = theory_curve(kNr, grid);
  EXPECT_NEAR(clo[2].second, 2 * kSqrt2, 1e-9);
  EXPECT_NEAR(nr[2].second, 1 + kSqrt2, 1e-9);
  EXPECT_NEAR(clo[0].second, 0.0, 1e-12);
  EXPECT_NEAR(nr[0].second, 0.0, 1e-12);
  EXPECT_NEAR(clo[1].second, clo[2].second / 2, 1e-9);
  EXPECT_NEAR(nr[1].second, nr[2].second / 2, 1e-9);
  std::vector<double> bad{1.2};
  EXPECT_THROW(theory_curve(kClo, bad), ValidationError);
}

TEST(ChshProperty, FreeAnglesNeverBeatTheParameterizedOptimum) {
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> ang(-pi, pi), vis(0.0, 1.0);
  for (int trial = 0; trial < 5000; ++trial) {
    const double v = trial % 2 ? 1.0 : vis(rng);
    const chsh::BasisAssignment b{ang(rng), ang(rng), ang(rng), ang(rng)};
    ASSERT_LE(chsh::chsh_value(b, v, PostSelectionMode::NumberResolving).value, v * (1 + std::sqrt(2.0)) + 1e-12);
    ASSERT_LE(chsh::chsh_value(b, v, PostSelectionMode::CrossLabOnly).value, v * 2 * std::sqrt(2.0) + 1e-12);
  }
}
