#include "twocopy/analysis.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>

#include "twocopy/error.hpp"
#include "twocopy/fit.hpp"
#include "twocopy/kernels.hpp"
#include "twocopy/random.hpp"

namespace twocopy::analysis {
namespace {

using montecarlo::ClickRecord;
using std::numbers::pi;

double sample_std(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

// Wrap into (-pi/2, pi/2].
double wrap_half_turn(double a) {
  a = std::remainder(a, pi);
  if (a <= -pi / 2.0) a += pi;
  return a;
}

// Efficiency-correction weight of one observed two-photon event.
double event_weight(const DetectionPattern& pat, const detectors::EfficiencyMap& eff, double pair_resolution) {
  double w = 1.0;
  for (std::size_t ch = 0; ch < kNumChannels; ++ch) {
    for (int k = 0; k < pat.n[ch]; ++k) w /= eff[ch];
  }
  if (pattern_kind(pat) == PatternKind::DoubleClick) w /= pair_resolution;
  return w;
}

int group_index(const OutcomeGroup& o) {
  if (o.a > 0) return o.b > 0 ? 0 : 1;
  return o.b > 0 ? 2 : 3;
}

double correlation_of(const std::array<double, 4>& g) {
  const double total = g[0] + g[1] + g[2] + g[3];
  return (g[0] + g[3] - g[1] - g[2]) / total;
}

std::string diagnostics(const fit::LmResult& r) {
  std::ostringstream os;
  os << "iterations=" << r.iterations << " rss=" << r.rss << " params=[";
  for (std::size_t i = 0; i < r.params.size(); ++i) os << (i ? "," : "") << r.params[i];
  os << "]";
  return os.str();
}

// ---- dip model --------------------------------------------------------------

struct DipProblem {
  std::vector<double> t;
  std::vector<double> y;
  std::vector<double> w;
  double t_min = 0.0;
  double t_max = 0.0;

  kernels::NormalEquations operator()(const fit::Params& p) const {
    return kernels::active().dip_normal_equations(kernels::DipParams{p[0], p[1], p[2], p[3]}, t, y, w);
  }
  void project(fit::Params& p) const {
    const double span = t_max - t_min;
    p[2] = std::clamp(p[2], t_min, t_max);
    p[3] = std::clamp(std::abs(p[3]), span * 1e-3, span);
  }
};

fit::LmResult solve_dip(const DipProblem& prob, const fit::Params& start) {
  // A flat scan leaves center and sigma unidentified; stop once rss stalls.
  fit::LmOptions opts;
  opts.rss_tolerance = 1e-10;
  return fit::levenberg_marquardt([&](const fit::Params& p) { return prob(p); }, start, 4, opts,
                                  [&](fit::Params& p) { prob.project(p); });
}

// ---- fringe model -----------------------------------------------------------

struct FringeProblem {
  std::vector<double> phi;  // phi_x + phi_y
  std::vector<double> y;    // correlations
  std::vector<double> w;
  double shape_a = 0.0;
  double shape_b = 1.0;

  kernels::NormalEquations operator()(const fit::Params& p) const {
    return kernels::active().fringe_normal_equations(
        kernels::FringeParams{p[0], p[1], p[2], shape_a, shape_b}, phi, y, w);
  }
};

fit::LmResult solve_fringe(const FringeProblem& prob, const fit::Params& start) {
  return fit::levenberg_marquardt([&](const fit::Params& p) { return prob(p); }, start, 3);
}

// Amplitude >= 0 and summed-phase offset in [0, 2 pi).
void canonicalize_fringe(fit::Params& p, double shape_a) {
  if (p[0] < 0.0) {
    p[0] = -p[0];
    p[1] += pi;
    p[2] += 2.0 * p[0] * shape_a;
  }
  p[1] = std::fmod(p[1], 2.0 * pi);
  if (p[1] < 0.0) p[1] += 2.0 * pi;
}

fit::Params fringe_start(const FringeProblem& prob) {
  fit::Params best{};
  double best_rss = HUGE_VAL;
  const int steps = 72;
  for (int k = 0; k < steps; ++k) {
    const double ph = 2.0 * pi * k / steps;
    // Linear least squares for y = b - A f with f fixed by the phase.
    double sf = 0, sff = 0, sy = 0, sfy = 0, sw = 0;
    for (std::size_t i = 0; i < prob.phi.size(); ++i) {
      const double f = prob.shape_a + prob.shape_b * std::cos(prob.phi[i] + ph);
      sw += prob.w[i];
      sf += prob.w[i] * f;
      sff += prob.w[i] * f * f;
      sy += prob.w[i] * prob.y[i];
      sfy += prob.w[i] * f * prob.y[i];
    }
    const double det = sw * sff - sf * sf;
    if (std::abs(det) < 1e-300) continue;
    const double neg_a = (sw * sfy - sf * sy) / det;
    const double b = (sy - neg_a * sf) / sw;
    fit::Params p{-neg_a, ph, b, 0.0};
    const double rss = prob(p).rss;
    if (rss < best_rss) {
      best_rss = rss;
      best = p;
    }
  }
  return best;
}

}  // namespace

double FitResult::value(std::string_view name) const {
  for (const auto& p : params) {
    if (p.name == name) return p.value;
  }
  throw ValidationError("fit has no parameter '" + std::string(name) + "'");
}

double FitResult::stddev(std::string_view name) const {
  for (const auto& p : params) {
    if (p.name == name) return p.std;
  }
  throw ValidationError("fit has no parameter '" + std::string(name) + "'");
}

detectors::EfficiencyMap estimate_efficiencies(std::span<const ClickRecord> records) {
  static constexpr std::array<std::pair<int, int>, 6> kPairs{
      {{0, 1}, {2, 3}, {0, 2}, {0, 3}, {1, 2}, {1, 3}}};
  std::array<std::int64_t, 6> counts{};
  for (const auto& r : records) {
    auto pat = montecarlo::as_pattern(r.observed);
    if (!pat || pattern_kind(*pat) == PatternKind::DoubleClick) continue;
    int first = -1;
    int second = -1;
    for (int ch = 0; ch < 4; ++ch) {
      if (pat->n[ch] == 1) (first < 0 ? first : second) = ch;
    }
    for (std::size_t k = 0; k < kPairs.size(); ++k) {
      if (kPairs[k].first == first && kPairs[k].second == second) ++counts[k];
    }
  }
  for (std::size_t k = 0; k < kPairs.size(); ++k) {
    if (counts[k] == 0) {
      std::ostringstream msg;
      msg << "no coincidences in channel pair (" << kPairs[k].first << "," << kPairs[k].second
          << "); calibration needs distinguishable photons";
      throw EstimationError(msg.str());
    }
  }
  // log n_ij = log eta_i + log eta_j + const; the constant is absorbed by normalization.
  Eigen::Matrix<double, 6, 4> a = Eigen::Matrix<double, 6, 4>::Zero();
  Eigen::Matrix<double, 6, 1> b;
  for (std::size_t k = 0; k < kPairs.size(); ++k) {
    a(static_cast<Eigen::Index>(k), kPairs[k].first) = 1.0;
    a(static_cast<Eigen::Index>(k), kPairs[k].second) = 1.0;
    b(static_cast<Eigen::Index>(k)) = std::log(static_cast<double>(counts[k]));
  }
  Eigen::Vector4d log_eta = a.colPivHouseholderQr().solve(b);
  const double top = log_eta.maxCoeff();
  std::array<double, 4> eta{};
  for (int ch = 0; ch < 4; ++ch) eta[ch] = std::exp(log_eta(ch) - top);
  return detectors::EfficiencyMap(eta);
}

HomVisibility hom_visibility_ratio(std::span<const ClickRecord> records,
                                   const detectors::EfficiencyMap& eff,
                                   const detectors::DetectorModel& model) {
  const double q = model.pair_resolution();
  if (q <= 0.0) throw EstimationError("detector model cannot register double clicks");
  double inlab[2] = {0.0, 0.0};
  double doubles[2] = {0.0, 0.0};
  for (const auto& r : records) {
    auto pat = montecarlo::as_pattern(r.observed);
    if (!pat) continue;
    const auto kind = pattern_kind(*pat);
    if (kind == PatternKind::CrossLab) continue;
    const int lab = (pat->n[0] + pat->n[1]) > 0 ? 0 : 1;
    const double w = event_weight(*pat, eff, q);
    (kind == PatternKind::InLab ? inlab : doubles)[lab] += w;
  }
  if (doubles[0] <= 0.0 || doubles[1] <= 0.0) {
    throw EstimationError("no double clicks recorded in one of the labs");
  }
  HomVisibility v;
  v.alice = 1.0 - inlab[0] / doubles[0];
  v.bob = 1.0 - inlab[1] / doubles[1];
  v.mean = 0.5 * (v.alice + v.bob);
  return v;
}

FitResult fit_hom_dip(std::span<const montecarlo::HomScanPoint> scan, const ResampleOptions& opts) {
  if (scan.size() < 5) throw ValidationError("dip fit needs at least 5 scan points");
  DipProblem prob;
  for (const auto& pt : scan) {
    prob.t.push_back(pt.delay);
    prob.y.push_back(static_cast<double>(pt.inlab_coinc));
    prob.w.push_back(1.0);
  }
  prob.t_min = *std::min_element(prob.t.begin(), prob.t.end());
  prob.t_max = *std::max_element(prob.t.begin(), prob.t.end());
  const double span = prob.t_max - prob.t_min;
  if (!(span > 0.0)) throw ValidationError("dip scan needs distinct delays");

  const std::size_t n = prob.y.size();
  const double edge = std::max(0.5 * (prob.y[0] + prob.y[1]), 0.5 * (prob.y[n - 1] + prob.y[n - 2]));
  const double baseline0 = std::max(edge, 1.0);
  std::size_t imin = 0;
  double smooth_min = HUGE_VAL;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = (prob.y[i > 0 ? i - 1 : i] + prob.y[i] + prob.y[i + 1 < n ? i + 1 : i]) / 3.0;
    if (s < smooth_min) {
      smooth_min = s;
      imin = i;
    }
  }
  const double depth0 = std::clamp(1.0 - prob.y[imin] / baseline0, 0.0, 1.0);

  fit::Params start{baseline0, depth0, prob.t[imin], span / 4.0};
  double best = HUGE_VAL;
  for (int k = 0; k < 40; ++k) {
    const double sigma = span * 1e-3 * std::pow(500.0, k / 39.0);
    fit::Params p{baseline0, depth0, prob.t[imin], sigma};
    const double rss = prob(p).rss;
    if (rss < best) {
      best = rss;
      start = p;
    }
  }

  const auto res = solve_dip(prob, start);
  if (!res.converged) throw FitError("dip fit did not converge", diagnostics(res));

  FitResult out;
  out.residual_sum_squares = res.rss;
  out.n_points = n;
  out.iterations = res.iterations;

  // Monte Carlo of the fit: Poisson counts around the fitted curve.
  std::vector<std::array<double, 4>> draws;
  Rng rng = make_stream(opts.seed, {0x64697066});
  for (int r = 0; r < opts.resamples; ++r) {
    DipProblem re = prob;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = (prob.t[i] - res.params[2]) / res.params[3];
      const double mean = std::max(res.params[0] * (1.0 - res.params[1] * std::exp(-0.5 * z * z)), 0.0);
      re.y[i] = static_cast<double>(montecarlo::draw_pair_count(mean, rng));
    }
    const auto rr = solve_dip(re, res.params);
    if (rr.converged) draws.push_back({rr.params[0], rr.params[1], rr.params[2], rr.params[3]});
  }
  if (opts.resamples > 0 && draws.size() * 2 < static_cast<std::size_t>(opts.resamples)) {
    throw FitError("most dip resamples failed to converge", diagnostics(res));
  }
  out.resamples = static_cast<int>(draws.size());
  const char* names[4] = {"baseline", "v0", "center", "sigma"};
  for (int k = 0; k < 4; ++k) {
    std::vector<double> xs;
    for (const auto& d : draws) xs.push_back(d[k]);
    out.params.push_back({names[k], res.params[k], sample_std(xs)});
  }
  return out;
}

double fringe_point_correlation(const montecarlo::FringeScanPoint& pt, PostSelectionMode mode,
                                const detectors::DetectorModel& detector) {
  std::array<double, 4> g{static_cast<double>(pt.n_pp), static_cast<double>(pt.n_pm),
                          static_cast<double>(pt.n_mp), static_cast<double>(pt.n_mm)};
  if (mode == PostSelectionMode::NumberResolving) {
    const double q = detector.pair_resolution();
    if (q <= 0.0) throw ValidationError("number-resolving correlations need double-click detection");
    // Alice doubles land in (-,+), Bob doubles in (+,-), equally likely.
    const double half = 0.5 * static_cast<double>(pt.n_doubles) / q;
    g[1] += half;
    g[2] += half;
  }
  if (g[0] + g[1] + g[2] + g[3] <= 0.0) throw EstimationError("scan point has no kept events");
  return correlation_of(g);
}

FitResult fit_fringe(std::span<const montecarlo::FringeScanPoint> scan, PostSelectionMode mode,
                     const FringeFitOptions& opts) {
  if (scan.size() < 4) throw ValidationError("fringe fit needs at least 4 points");
  const double phi_x = scan.front().phi_x;
  double lo = HUGE_VAL;
  double hi = -HUGE_VAL;
  for (const auto& pt : scan) {
    if (pt.phi_x != phi_x) throw ValidationError("fringe fit expects a single fixed phi_x");
    lo = std::min(lo, pt.phi_y);
    hi = std::max(hi, pt.phi_y);
  }
  const double n = static_cast<double>(scan.size());
  if (hi - lo < 2.0 * pi * (1.0 - 1.0 / n) - 1e-9) {
    throw ValidationError("fringe scan must span a full fringe");
  }

  FringeProblem prob;
  if (mode == PostSelectionMode::NumberResolving) {
    prob.shape_a = 0.5;
    prob.shape_b = 0.5;
  }
  std::vector<const montecarlo::FringeScanPoint*> used;
  for (const auto& pt : scan) {
    if (pt.n_pp + pt.n_pm + pt.n_mp + pt.n_mm + pt.n_doubles == 0) continue;
    prob.phi.push_back(pt.phi_x + pt.phi_y);
    prob.y.push_back(fringe_point_correlation(pt, mode, opts.detector));
    prob.w.push_back(1.0);
    used.push_back(&pt);
  }
  if (prob.y.size() < 4) throw EstimationError("too few non-empty fringe points");

  auto res = solve_fringe(prob, fringe_start(prob));
  if (!res.converged) throw FitError("fringe fit did not converge", diagnostics(res));
  canonicalize_fringe(res.params, prob.shape_a);

  FitResult out;
  out.residual_sum_squares = res.rss;
  out.n_points = prob.y.size();
  out.iterations = res.iterations;

  std::vector<std::array<double, 3>> draws;
  Rng rng = make_stream(opts.resampling.seed, {0x66726e67});
  for (int r = 0; r < opts.resampling.resamples; ++r) {
    FringeProblem re = prob;
    for (std::size_t i = 0; i < used.size(); ++i) {
      const auto& pt = *used[i];
      // Multinomial over the five observed categories at fixed total.
      std::array<std::int64_t, 5> c{pt.n_pp, pt.n_pm, pt.n_mp, pt.n_mm, pt.n_doubles};
      std::int64_t remaining = std::accumulate(c.begin(), c.end(), std::int64_t{0});
      std::int64_t left_weight = remaining;
      montecarlo::FringeScanPoint fake = pt;
      std::array<std::int64_t*, 5> slots{&fake.n_pp, &fake.n_pm, &fake.n_mp, &fake.n_mm, &fake.n_doubles};
      for (std::size_t k = 0; k < 5; ++k) {
        std::int64_t take = remaining;
        if (k + 1 < 5 && left_weight > 0) {
          const double q = static_cast<double>(c[k]) / static_cast<double>(left_weight);
          take = std::binomial_distribution<std::int64_t>(remaining, std::clamp(q, 0.0, 1.0))(rng);
        }
        *slots[k] = take;
        remaining -= take;
        left_weight -= c[k];
      }
      try {
        re.y[i] = fringe_point_correlation(fake, mode, opts.detector);
      } catch (const EstimationError&) {
        re.y[i] = prob.y[i];
      }
    }
    auto rr = solve_fringe(re, res.params);
    if (!rr.converged) continue;
    canonicalize_fringe(rr.params, prob.shape_a);
    // Keep the phase on the same branch as the point estimate.
    rr.params[1] = res.params[1] + std::remainder(rr.params[1] - res.params[1], 2.0 * pi);
    draws.push_back({rr.params[0], rr.params[1], rr.params[2]});
  }
  out.resamples = static_cast<int>(draws.size());

  auto spread = [&](int k, double scale) {
    std::vector<double> xs;
    for (const auto& d : draws) xs.push_back(d[k] * scale);
    return sample_std(xs);
  };
  out.params.push_back({"amplitude", res.params[0], spread(0, 1.0)});
  out.params.push_back({"phase_offset", wrap_half_turn(0.5 * res.params[1]), spread(1, 0.5)});
  out.params.push_back({"baseline", res.params[2], spread(2, 1.0)});
  return out;
}

Setpoints derive_setpoints(std::span<const FringeFit> fits, double consistency_tolerance) {
  const double targets[2] = {pi / 8.0, -3.0 * pi / 8.0};
  double offsets[2] = {0.0, 0.0};
  for (int k = 0; k < 2; ++k) {
    auto it = std::find_if(fits.begin(), fits.end(),
                           [&](const FringeFit& f) { return std::abs(f.phi_x - targets[k]) < 1e-6; });
    if (it == fits.end()) {
      std::ostringstream msg;
      msg << "missing fringe fit for phi_x = " << targets[k];
      throw EstimationError(msg.str());
    }
    offsets[k] = it->fit.value("phase_offset");
  }
  Setpoints sp;
  // Offsets live on a half turn; average on the doubled circle.
  sp.offset = wrap_half_turn(0.5 * std::atan2(std::sin(2 * offsets[0]) + std::sin(2 * offsets[1]),
                                              std::cos(2 * offsets[0]) + std::cos(2 * offsets[1])));
  const double mismatch = wrap_half_turn(offsets[0] - offsets[1]);
  if (std::abs(mismatch) > consistency_tolerance) {
    std::ostringstream msg;
    msg << "fringe offsets disagree by " << mismatch << " rad (tolerance " << consistency_tolerance << ")";
    sp.warnings.push_back(msg.str());
  }
  const auto ideal = chsh::BasisAssignment::standard();
  sp.basis = chsh::BasisAssignment{ideal.phi_x0 - sp.offset, ideal.phi_x1 - sp.offset,
                                   ideal.phi_y0 - sp.offset, ideal.phi_y1 - sp.offset};
  return sp;
}

ChshEstimate estimate_chsh(std::span<const ClickRecord> records, PostSelectionMode mode,
                           const detectors::EfficiencyMap& eff, const ChshOptions& opts) {
  const double q = opts.detector.pair_resolution();
  if (mode == PostSelectionMode::NumberResolving && q <= 0.0) {
    throw ValidationError("number-resolving CHSH needs a detector that registers double clicks");
  }

  // Weighted group sums per window, grouped by setting.
  std::array<std::map<std::uint32_t, std::array<double, 4>>, 4> windows;
  ChshEstimate est;
  est.mode = mode;
  for (const auto& r : records) {
    if (r.x > 1 || r.y > 1) throw ValidationError("basis bits must be 0 or 1");
    const int setting = 2 * r.x + r.y;
    auto& slot = windows[setting][r.window_id];  // registers the window even if nothing is kept
    auto pat = montecarlo::as_pattern(r.observed);
    if (!pat || !mode_keeps(mode, pattern_kind(*pat))) continue;
    const double w = event_weight(*pat, eff, q > 0.0 ? q : 1.0);
    const int g = group_index(protocol::outcome_of(*pat));
    slot[g] += w;
    auto& tally = est.tallies[r.x][r.y];
    ++tally.kept_events;
    tally.weighted_total += w;
    tally.weighted_groups[g] += w;
  }

  std::array<std::vector<std::array<double, 4>>, 4> per_window;
  for (int s = 0; s < 4; ++s) {
    auto& tally = est.tallies[s / 2][s % 2];
    tally.windows = static_cast<int>(windows[s].size());
    if (tally.kept_events == 0) {
      std::ostringstream msg;
      msg << "setting (x=" << s / 2 << ", y=" << s % 2 << ") has no events kept by mode "
          << mode_name(mode);
      throw EstimationError(msg.str());
    }
    for (const auto& [id, g] : windows[s]) per_window[s].push_back(g);
    est.correlations[s / 2][s % 2] = correlation_of(tally.weighted_groups);
  }
  est.value = chsh::combine(est.correlations);

  // Bootstrap over windows within each setting.
  Rng rng = make_stream(opts.seed, {0x63687368});
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(std::max(opts.resamples, 0)));
  for (int r = 0; r < opts.resamples; ++r) {
    std::array<std::array<double, 2>, 2> c{};
    bool ok = true;
    for (int s = 0; s < 4; ++s) {
      const auto& ws = per_window[s];
      std::uniform_int_distribution<std::size_t> pick(0, ws.size() - 1);
      std::array<double, 4> g{};
      for (std::size_t k = 0; k < ws.size(); ++k) {
        const auto& wg = ws[pick(rng)];
        for (int j = 0; j < 4; ++j) g[j] += wg[j];
      }
      if (g[0] + g[1] + g[2] + g[3] <= 0.0) {
        ok = false;
        break;
      }
      c[s / 2][s % 2] = correlation_of(g);
    }
    if (ok) values.push_back(chsh::combine(c));
  }
  double var = 0.0;
  if (values.size() >= 2) var = sample_std(values) * sample_std(values);

  if (opts.phase_noise_prior_rad > 0.0) {
    const double vis = opts.visibility_prior;
    for (int s = 0; s < 4; ++s) {
      const double c = est.correlations[s / 2][s % 2];
      double slope2 = 0.0;
      if (mode == PostSelectionMode::NumberResolving) {
        // C = -V (1 + cos phi) / 2
        const double cos_phi = std::clamp(-2.0 * c / vis - 1.0, -1.0, 1.0);
        slope2 = 0.25 * vis * vis * (1.0 - cos_phi * cos_phi);
      } else {
        slope2 = std::max(vis * vis - c * c, 0.0);
      }
      var += slope2 * opts.phase_noise_prior_rad * opts.phase_noise_prior_rad;
    }
  }
  est.std = std::sqrt(var);
  return est;
}

}  // namespace twocopy::analysis
