// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "test_util.hpp"
#include "twocopy/analysis.hpp"
#include "twocopy/chsh.hpp"
#include "twocopy/fock.hpp"
#include "twocopy/montecarlo.hpp"
#include "twocopy/protocol.hpp"

using namespace twocopy;
using std::numbers::pi;

namespace {

constexpr PostSelectionMode kClo = PostSelectionMode::CrossLabOnly;
constexpr PostSelectionMode kNr = PostSelectionMode::NumberResolving;
constexpr PostSelectionMode kModes[3] = {kNr, PostSelectionMode::DiscardDoubles, kClo};

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

DetectionPattern pat(int a1, int a2, int b1, int b2) {
  return DetectionPattern{{std::uint8_t(a1), std::uint8_t(a2), std::uint8_t(b1), std::uint8_t(b2)}};
}

double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / double(xs.size());
}

double sd_of(const std::vector<double>& xs) {
  const double m = mean_of(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / double(xs.size() - 1));
}

std::vector<double> uniform_grid(int n) {
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(2 * pi * i / n);
  return g;
}

// 1. Pattern table at unit overlap.
void table_golden(Outcome& o) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> ang(-pi, pi);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const PhaseSettings s{ang(rng), ang(rng)};
    const double sxy = std::sin(s.phi_xy()), cxy = std::cos(s.phi_xy());
    const auto d = protocol::pattern_distribution(s, 1.0);
    const std::vector<std::pair<DetectionPattern, double>> expected{
        {pat(2, 0, 0, 0), 0.125},           {pat(0, 2, 0, 0), 0.125},           {pat(0, 0, 2, 0), 0.125},
        {pat(0, 0, 0, 2), 0.125},           {pat(1, 1, 0, 0), 0.0},             {pat(0, 0, 1, 1), 0.0},
        {pat(1, 0, 1, 0), 0.25 * sxy * sxy}, {pat(0, 1, 0, 1), 0.25 * sxy * sxy}, {pat(1, 0, 0, 1), 0.25 * cxy * cxy},
        {pat(0, 1, 1, 0), 0.25 * cxy * cxy}};
    for (const auto& [p, e] : expected) worst = std::max(worst, std::abs(d.probability(p) - e));
  }
  o.detail << "max |P - table| = " << worst << " over 1000 settings";
  o.require(worst <= 1e-12, "tolerance 1e-12");
}

// 2. Closed form against the Fock-space pipeline.
void oracle_equivalence(Outcome& o) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> ang(-2 * pi, 2 * pi), vis(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const PhaseSettings s{ang(rng), ang(rng)};
    const double v = vis(rng);
    const auto a = protocol::pattern_distribution(s, v);
    const auto b = protocol::pattern_distribution_oracle(s, v);
    for (std::size_t i = 0; i < kNumPatterns; ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  o.detail << "max deviation = " << worst << " over 1000 draws";
  o.require(worst <= 1e-12, "tolerance 1e-12");
}

// 3. Optimal angle and values.
void chsh_optima(Outcome& o) {
  const auto clo = chsh::optimize_theta(1.0, kClo);
  const auto nr = chsh::optimize_theta(1.0, kNr);
  o.detail << "CLO theta=" << clo.theta << " B=" << clo.value << "; NR theta=" << nr.theta << " B=" << nr.value;
  o.require(std::abs(clo.theta - pi / 8) <= 1e-6, "CLO theta");
  o.require(std::abs(nr.theta - pi / 8) <= 1e-6, "NR theta");
  o.require(std::abs(clo.value - 2 * std::sqrt(2.0)) <= 1e-9, "CLO value");
  o.require(std::abs(nr.value - (1 + std::sqrt(2.0))) <= 1e-9, "NR value");
}

// 4. Theory values at v = 0.95.
void visibility_scaling(Outcome& o) {
  const double clo = chsh::optimize_theta(0.95, kClo).value;
  const double nr = chsh::optimize_theta(0.95, kNr).value;
  o.detail << "CLO " << clo << " (target 2.687), NR " << nr << " (target 2.293)";
  o.require(std::abs(clo - 2.687) <= 1e-3, "CLO");
  o.require(std::abs(nr - 2.293) <= 1e-3, "NR");
}

// 5. Seed battery at the default configuration.
void experiment_reproduction(Outcome& o) {
  std::vector<double> clo, nr;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    montecarlo::RunConfig c;
    c.seed = seed;
    const auto recs = montecarlo::simulate_run(c);
    analysis::ChshOptions opts;
    opts.detector = c.detector;
    opts.seed = seed;
    clo.push_back(analysis::estimate_chsh(recs, kClo, c.efficiency, opts).value);
    nr.push_back(analysis::estimate_chsh(recs, kNr, c.efficiency, opts).value);
  }
  struct Mode {
    const char* name;
    const std::vector<double>& xs;
    double target, reported, reported_err;
  };
  for (const Mode& m : {Mode{"CLO", clo, 2.69, 2.71, 0.09}, Mode{"NR", nr, 2.30, 2.23, 0.07}}) {
    const double mean = mean_of(m.xs), sd = sd_of(m.xs);
    const auto [lo, hi] = std::minmax_element(m.xs.begin(), m.xs.end());
    // Coverage: the reported interval reaches the simulated 2-sd band.
    const bool covered = std::abs(m.reported - mean) <= m.reported_err + 2 * sd;
    const bool inside_range = m.reported >= *lo && m.reported <= *hi;
    o.detail << m.name << " mean=" << mean << " sd=" << sd << " range=[" << *lo << "," << *hi << "] reported "
             << m.reported << "+-" << m.reported_err << (inside_range ? " inside" : " outside") << " sim range; ";
    o.require(std::abs(mean - m.target) <= 0.03, std::string(m.name) + " mean within 0.03");
    o.require(covered, std::string(m.name) + " spread coverage");
  }
}

// 6. Dip fit and ratio estimator.
void visibility_estimators(Outcome& o) {
  montecarlo::RunConfig c;
  c.pair_rate = 50000;
  montecarlo::ScanConfig s;
  for (int i = 0; i <= 40; ++i) s.grid.push_back(-4.0 + 0.2 * i);
  const auto fit = analysis::fit_hom_dip(montecarlo::simulate_hom_scan(c, s));
  const double v0 = fit.value("v0"), sd = fit.stddev("v0");
  o.detail << "dip v0=" << v0 << "+-" << sd << "; ";
  o.require(std::abs(v0 - 0.952) <= 2 * sd, "dip fit within 2 sigma");

  c.detector = detectors::DetectorModel::ideal();
  c.phase_noise_frac = 0.0;
  const auto recs = montecarlo::simulate_run(c);
  const auto ratio = analysis::hom_visibility_ratio(recs, {}, c.detector);
  double inlab = 0.0, doubles = 0.0;
  for (const auto& r : recs) {
    const auto p = montecarlo::as_pattern(r.observed);
    if (!p) continue;
    if (pattern_kind(*p) == PatternKind::InLab) inlab += 1;
    if (pattern_kind(*p) == PatternKind::DoubleClick) doubles += 1;
  }
  // Delta method on 1 - I / D with Poisson counts.
  const double sigma = inlab / doubles * std::sqrt(1 / inlab + 1 / doubles);
  const double target = 2 * 0.952 / 1.952;
  o.detail << "ratio=" << ratio.mean << "+-" << sigma << " target 2v/(1+v)=" << target << " vs v=0.952";
  o.require(std::abs(ratio.mean - target) <= 3 * sigma, "ratio equals 2v/(1+v)");
  o.require(std::abs(ratio.mean - 0.952) > 3 * sigma, "ratio differs from v");
}

// 7. Fringe amplitude and drift.
void fringe_amplitude(Outcome& o) {
  montecarlo::RunConfig c;
  c.phase_noise_frac = 0.0;
  c.pair_rate = 1e7;
  const auto grid = uniform_grid(48);
  for (auto mode : {kClo, kNr}) {
    const auto f = analysis::fit_fringe(montecarlo::simulate_fringe_scan(c, pi / 8, grid, mode, 1.0), mode);
    o.detail << mode_name(mode) << " A=" << f.value("amplitude") << "; ";
    o.require(std::abs(f.value("amplitude") - c.v0) <= 1e-3, std::string(mode_name(mode)) + " A = v");
  }
  montecarlo::RunConfig d;
  d.pair_rate = 1e5;
  const double still = analysis::fit_fringe(montecarlo::simulate_fringe_scan(d, pi / 8, grid, kClo, 1.0), kClo)
                           .value("amplitude");
  d.drift_rad_per_s = 0.03;
  const double drift = analysis::fit_fringe(montecarlo::simulate_fringe_scan(d, pi / 8, grid, kClo, 1.0), kClo)
                           .value("amplitude");
  o.detail << "drift-free A=" << still << " drifting A=" << drift;
  o.require(drift < still, "drift lowers A");
}

// 8. Efficiency calibration.
void calibration(Outcome& o) {
  const std::array<double, 4> truth{1.0, 0.8, 0.9, 0.7};
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    montecarlo::RunConfig c;
    c.distinguishable = true;
    c.efficiency = detectors::EfficiencyMap(truth);
    c.pair_rate = 1e5 / (4.0 * c.windows_per_setting);
    c.seed = seed;
    const auto eff = analysis::estimate_efficiencies(montecarlo::simulate_run(c));
    for (int ch = 0; ch < 4; ++ch) worst = std::max(worst, std::abs(eff[ch] / truth[ch] - 1.0));
  }
  o.detail << "worst relative error " << worst << " over 10 seeds of 1e5 events";
  o.require(worst <= 0.02, "within 2%");
}

// 9. Thresholds and simulated straddle.
void thresholds(Outcome& o) {
  const double clo = chsh::violation_threshold(kClo);
  const double nr = chsh::violation_threshold(kNr);
  o.detail << "v_min CLO=" << clo << " NR=" << nr << "; ";
  o.require(std::abs(clo - 1 / std::sqrt(2.0)) <= 1e-6, "CLO threshold");
  o.require(std::abs(nr - 2 * (std::sqrt(2.0) - 1)) <= 1e-6, "NR threshold");
  for (auto [mode, v_th] : {std::pair{kClo, clo}, std::pair{kNr, nr}}) {
    for (double dv : {-0.02, 0.02}) {
      montecarlo::RunConfig c;
      c.v0 = v_th + dv;
      c.phase_noise_frac = 0.0;
      c.pair_rate = 20000;
      const auto est = analysis::estimate_chsh(montecarlo::simulate_run(c), mode, c.efficiency, {c.detector, 500, 3});
      o.detail << mode_name(mode) << " v=" << c.v0 << " B=" << est.value << "+-" << est.std << "; ";
      const bool side = dv < 0 ? est.value + 3 * est.std < 2.0 : est.value - 3 * est.std > 2.0;
      o.require(side, std::string(mode_name(mode)) + (dv < 0 ? " below" : " above"));
    }
  }
}

// 10. Invariant batteries.
void invariants(Outcome& o) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> ang(-pi, pi), vis(0.0, 1.0);
  std::uniform_int_distribution<int> mode_pick(0, 3);
  bool normal = true, unitary = true, no_signal = true, local = true;
  for (int trial = 0; trial < 1000; ++trial) {
    const double v = vis(rng);
    const double phi_x = ang(rng), phi_y = ang(rng), phi_x2 = ang(rng), phi_y2 = ang(rng);
    const auto d = protocol::pattern_distribution(PhaseSettings{phi_x, phi_y}, v);
    double total = 0.0;
    for (double p : d.probabilities()) {
      normal &= p >= 0.0;
      total += p;
    }
    normal &= std::abs(total - 1.0) <= 1e-12;
    for (auto m : kModes) {
      const auto g = protocol::group_probabilities(PhaseSettings{phi_x, phi_y}, v, m);
      normal &= std::abs(g.sum() - 1.0) <= 1e-12;
      const auto g_by = protocol::group_probabilities(PhaseSettings{phi_x, phi_y2}, v, m);
      const auto g_ax = protocol::group_probabilities(PhaseSettings{phi_x2, phi_y}, v, m);
      no_signal &= std::abs((g.p_pp + g.p_pm) - (g_by.p_pp + g_by.p_pm)) <= 1e-12;
      no_signal &= std::abs((g.p_pp + g.p_mp) - (g_ax.p_pp + g_ax.p_mp)) <= 1e-12;
    }

    auto s = fock::product_state(tu::wavefunction(tu::random_mode_vector(rng), tu::random_internal(rng)),
                                 tu::wavefunction(tu::random_mode_vector(rng), tu::random_internal(rng)), 4);
    const auto a = std::uint8_t(mode_pick(rng));
    auto b = std::uint8_t(mode_pick(rng));
    if (b == a) b = std::uint8_t((a + 1) % 4);
    const double before = fock::norm(s);
    const auto t = fock::apply_element(
        s, fock::OpticalElement::beam_splitter(fock::ModeId{a}, fock::ModeId{b}, tu::random_unitary(rng)));
    unitary &= std::abs(fock::norm(t) - before) <= 1e-10;
  }
  for (const auto& p : all_patterns()) {
    for (const auto& q : all_patterns()) {
      const auto op = protocol::outcome_of(p), oq = protocol::outcome_of(q);
      if (p.n[0] == q.n[0] && p.n[1] == q.n[1]) local &= op.a == oq.a;
      if (p.n[2] == q.n[2] && p.n[3] == q.n[3]) local &= op.b == oq.b;
    }
  }

  bool deterministic = true;
  montecarlo::RunConfig c;
  c.phase_noise_frac = 0.05;
  c.threads = 1;
  const auto ref = montecarlo::simulate_run(c);
  const auto grid = uniform_grid(24);
  const auto ref_scan = montecarlo::simulate_fringe_scan(c, pi / 8, grid, kClo, 1.0);
  for (unsigned threads : {2u, 3u, 8u}) {
    c.threads = threads;
    deterministic &= montecarlo::simulate_run(c) == ref;
    deterministic &= montecarlo::simulate_fringe_scan(c, pi / 8, grid, kClo, 1.0) == ref_scan;
  }
  o.detail << "normalization " << normal << ", unitarity " << unitary << ", no-signaling " << no_signal
           << ", locality " << local << ", thread determinism " << deterministic;
  o.require(normal, "normalization");
  o.require(unitary, "unitarity");
  o.require(no_signal, "no-signaling");
  o.require(local, "outcome locality");
  o.require(deterministic, "determinism under parallelism");
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria{
      {"pattern table golden", table_golden},
      {"oracle equivalence", oracle_equivalence},
      {"CHSH optima", chsh_optima},
      {"visibility scaling", visibility_scaling},
      {"end-to-end reproduction", experiment_reproduction},
      {"visibility estimators", visibility_estimators},
      {"fringe amplitude", fringe_amplitude},
      {"calibration", calibration},
      {"violation thresholds", thresholds},
      {"invariant batteries", invariants},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "[exception: " << e.what() << "]";
    }
    failures += o.pass ? 0 : 1;
    std::printf("criterion %zu (%s): %s | %s\n", i + 1, criteria[i].first, o.pass ? "PASS" : "FAIL",
                o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", int(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
