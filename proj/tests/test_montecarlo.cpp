#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <map>

#include "test_util.hpp"
#include "twocopy/chsh.hpp"
#include "twocopy/error.hpp"
#include "twocopy/montecarlo.hpp"

using namespace twocopy;
using namespace twocopy::montecarlo;
using twocopy::tu::pi;

namespace {

RunConfig ideal_config() {
  RunConfig c;
  c.v0 = 1.0;
  c.detector = detectors::DetectorModel::ideal();
  c.phase_noise_frac = 0.0;
  return c;
}

// Pattern counts per setting from two-photon records.
std::array<std::array<std::int64_t, kNumPatterns>, 4> pattern_counts(const std::vector<ClickRecord>& recs) {
  std::array<std::array<std::int64_t, kNumPatterns>, 4> out{};
  for (const auto& r : recs) {
    auto p = as_pattern(r.observed);
    if (!p) continue;
    ++out[2 * r.x + r.y][*pattern_index(*p)];
  }
  return out;
}

}  // namespace

TEST(SimulateRun, GroupFrequenciesMatchEqFour) {
  auto c = ideal_config();
  c.pair_rate = 200000;
  c.windows_per_setting = 1;
  const auto counts = pattern_counts(simulate_run(c));
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      const auto& k = counts[2 * x + y];
      std::int64_t n = 0;
      for (auto v : k) n += v;
      std::array<double, 4> obs{};
      const auto& pats = all_patterns();
      for (std::size_t i = 0; i < kNumPatterns; ++i) {
        const auto o = protocol::outcome_of(pats[i]);
        obs[(o.a > 0 ? 0 : 2) + (o.b > 0 ? 0 : 1)] += double(k[i]);
      }
      const auto g = protocol::group_probabilities(c.basis.settings(x, y), 1.0, PostSelectionMode::NumberResolving);
      const std::array<double, 4> expect{g.p_pp, g.p_pm, g.p_mp, g.p_mm};
      for (int j = 0; j < 4; ++j) {
        const double f = obs[j] / double(n);
        const double sd = std::sqrt(expect[j] * (1 - expect[j]) / double(n));
        EXPECT_NEAR(f, expect[j], 3 * sd + 1e-12) << "setting " << x << y << " group " << j;
      }
    }
  }
}

TEST(SimulateRun, PatternFrequenciesConvergeAtMillionPairs) {
  auto c = ideal_config();
  c.v0 = 0.8;
  c.pair_rate = 250000;
  c.windows_per_setting = 1;
  c.seed = 77;
  const auto counts = pattern_counts(simulate_run(c));
  for (int s = 0; s < 4; ++s) {
    std::int64_t n = 0;
    for (auto v : counts[s]) n += v;
    const auto d = protocol::pattern_distribution(c.basis.settings(s / 2, s % 2), 0.8);
    for (std::size_t i = 0; i < kNumPatterns; ++i) {
      const double sd = std::sqrt(d[i] * (1 - d[i]) / double(n));
      EXPECT_NEAR(double(counts[s][i]) / double(n), d[i], 5 * sd + 1e-12);
    }
  }
}

TEST(SimulateRun, DeterministicAndThreadInvariant) {
  RunConfig c;
  c.seed = 42;
  c.drift_rad_per_s = 0.01;
  c.efficiency = detectors::EfficiencyMap({1.0, 0.8, 0.9, 0.7});
  const auto a = simulate_run(c);
  const auto b = simulate_run(c);
  EXPECT_EQ(a, b);
  for (unsigned t : {2u, 3u, 8u}) {
    c.threads = t;
    EXPECT_EQ(simulate_run(c), a) << t << " threads";
  }
  c.threads = 1;
  c.seed = 43;
  EXPECT_NE(simulate_run(c), a);
}

TEST(SimulateRun, ZeroRateIsEmpty) {
  RunConfig c;
  c.pair_rate = 0;
  EXPECT_TRUE(simulate_run(c).empty());
}

TEST(SimulateRun, RecordLayout) {
  RunConfig c;
  c.windows_per_setting = 5;
  c.acquisition_s = 0.5;
  const auto recs = simulate_run(c);
  ASSERT_FALSE(recs.empty());
  std::uint32_t prev = 0;
  for (const auto& r : recs) {
    ASSERT_GE(r.window_id, prev);
    prev = r.window_id;
    ASSERT_EQ(2 * r.x + r.y, r.window_id / 5);
    ASSERT_DOUBLE_EQ(r.wall_time_s, r.window_id * 0.5);
    ASSERT_GE(r.observed.detected(), 1);
    ASSERT_EQ(r.observed.detected() + r.observed.lost, 2);
  }
}

TEST(SimulateRun, PhaseNoiseDampsCorrelations) {
  auto c = ideal_config();
  c.v0 = 0.9;
  c.phase_noise_frac = 0.05;
  c.pair_rate = 200000;
  c.windows_per_setting = 1;
  const double sigma = c.phase_noise_sigma();
  EXPECT_DOUBLE_EQ(sigma, 0.05 * 2 * pi);
  const auto counts = pattern_counts(simulate_run(c));
  for (int s = 0; s < 4; ++s) {
    const auto ps = c.basis.settings(s / 2, s % 2);
    double kept = 0, corr = 0;
    for (std::size_t i = 6; i < kNumPatterns; ++i) {
      const auto o = protocol::outcome_of(all_patterns()[i]);
      kept += double(counts[s][i]);
      corr += o.a * o.b * double(counts[s][i]);
    }
    const double expected = -0.9 * std::exp(-0.5 * sigma * sigma) * std::cos(ps.phi_x + ps.phi_y);
    EXPECT_NEAR(corr / kept, expected, 4 * std::sqrt(1.0 / kept));
  }
  c.fringe_reading = FringeReading::HalfTurn;
  EXPECT_DOUBLE_EQ(c.phase_noise_sigma(), 0.05 * pi);
}

TEST(SimulateRun, DistinguishableForcesZeroOverlap) {
  auto c = ideal_config();
  c.distinguishable = true;
  c.pair_rate = 100000;
  c.windows_per_setting = 1;
  EXPECT_EQ(c.overlap(), 0.0);
  const auto counts = pattern_counts(simulate_run(c));
  for (int s = 0; s < 4; ++s) {
    std::int64_t n = 0;
    for (auto v : counts[s]) n += v;
    for (std::size_t i = 4; i < kNumPatterns; ++i) {
      EXPECT_NEAR(double(counts[s][i]) / double(n), 0.125, 5 * std::sqrt(0.125 * 0.875 / double(n)));
    }
  }
}

TEST(SimulateRun, ValidationErrors) {
  RunConfig c;
  c.v0 = 1.2;
  EXPECT_THROW(simulate_run(c), ValidationError);
  c = RunConfig{};
  c.acquisition_s = 0;
  EXPECT_THROW(simulate_run(c), ValidationError);
  c = RunConfig{};
  c.windows_per_setting = 0;
  EXPECT_THROW(simulate_run(c), ValidationError);
  c = RunConfig{};
  c.phase_noise_frac = -0.1;
  EXPECT_THROW(simulate_run(c), ValidationError);
  c = RunConfig{};
  c.pair_rate = -1;
  EXPECT_THROW(simulate_run(c), ValidationError);
}

TEST(PairCounts, PoissonMeanVarianceRatio) {
  const int windows = 100000;
  double sum = 0, sum2 = 0;
  for (int w = 0; w < windows; ++w) {
    Rng rng = make_stream(5, {9, std::uint64_t(w)});
    const double n = double(draw_pair_count(500.0, rng));
    sum += n;
    sum2 += n * n;
  }
  const double mean = sum / windows;
  const double var = sum2 / windows - mean * mean;
  EXPECT_NEAR(mean, 500.0, 0.5);
  EXPECT_GE(mean / var, 0.95);
  EXPECT_LE(mean / var, 1.05);
}

TEST(HomScan, FarDelayLooksDistinguishable) {
  auto c = ideal_config();
  c.pair_rate = 200000;
  ScanConfig s;
  s.grid = {-8.0, 8.0};
  const auto pts = simulate_hom_scan(c, s);
  for (const auto& p : pts) {
    const double n = double(p.total_pairs);
    EXPECT_NEAR(double(p.inlab_coinc) / n, 0.25, 5 * std::sqrt(0.25 * 0.75 / n));
    EXPECT_NEAR(double(p.inlab_coinc), double(p.double_clicks), 5 * std::sqrt(2 * 0.25 * n));
  }
}

TEST(HomScan, NoCoincidencesAtZeroDelay) {
  auto c = ideal_config();
  c.pair_rate = 100000;
  ScanConfig s;
  s.grid = {0.0};
  const auto pts = simulate_hom_scan(c, s);
  EXPECT_EQ(pts[0].inlab_coinc, 0);
  EXPECT_GT(pts[0].double_clicks, 0);
}

TEST(HomScan, DipMinimumAtCenterAndThreadInvariant) {
  RunConfig c;
  c.pair_rate = 100000;
  ScanConfig s;
  for (int i = -10; i <= 10; ++i) s.grid.push_back(0.3 * i);
  const auto pts = simulate_hom_scan(c, s);
  std::size_t best = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (double(pts[i].inlab_coinc) / double(pts[i].total_pairs) <
        double(pts[best].inlab_coinc) / double(pts[best].total_pairs)) {
      best = i;
    }
  }
  EXPECT_EQ(best, 10u);
  c.threads = 4;
  EXPECT_EQ(simulate_hom_scan(c, s), pts);
  s.grid = {1.0, 0.5};
  EXPECT_THROW(simulate_hom_scan(c, s), ValidationError);
  s.grid.clear();
  EXPECT_THROW(simulate_hom_scan(c, s), ValidationError);
}

TEST(FringeScan, NoiselessCorrelationFollowsCosine) {
  auto c = ideal_config();
  c.pair_rate = 40000;
  std::vector<double> grid;
  for (int i = 0; i < 32; ++i) grid.push_back(i * 2 * pi / 32);
  const auto pts = simulate_fringe_scan(c, pi / 8, grid, PostSelectionMode::CrossLabOnly, 1.0);
  ASSERT_EQ(pts.size(), grid.size());
  for (const auto& p : pts) {
    const double n = double(p.n_pp + p.n_pm + p.n_mp + p.n_mm);
    const double corr = double(p.n_pp + p.n_mm - p.n_pm - p.n_mp) / n;
    const double expected = -std::cos(p.phi_x + p.phi_y);
    const double sd = std::sqrt(std::max(1 - expected * expected, 1.0 / n) / n);
    EXPECT_NEAR(corr, expected, 5 * sd + 1e-9) << p.phi_y;
    EXPECT_GT(p.n_doubles, 0);
    EXPECT_DOUBLE_EQ(p.phi_x, pi / 8);
  }
  c.threads = 3;
  EXPECT_EQ(simulate_fringe_scan(c, pi / 8, grid, PostSelectionMode::CrossLabOnly, 1.0), pts);
}
