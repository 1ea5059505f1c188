#include "twocopy/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "twocopy/chsh.hpp"
#include "twocopy/error.hpp"
#include "twocopy/io.hpp"

namespace twocopy::cli {
namespace {

using io::json;
using std::numbers::pi;

Format parse_format(const std::string& s) {
  if (s == "json") return Format::Json;
  if (s == "csv") return Format::Csv;
  throw UsageError("--format: expected json or csv, got '" + s + "'");
}

PostSelectionMode parse_mode_flag(const std::string& s) {
  try {
    return parse_mode(s);
  } catch (const ValidationError& e) {
    throw UsageError(std::string("--mode: ") + e.what());
  }
}

detectors::DetectorModel parse_detector_flag(const std::string& kind, double split_ratio) {
  detectors::DetectorKind k;
  try {
    k = detectors::parse_kind(kind);
  } catch (const ValidationError& e) {
    throw UsageError(std::string("--detector: ") + e.what());
  }
  if (k == detectors::DetectorKind::PseudoNumberResolving) return detectors::DetectorModel::pseudo(split_ratio);
  return {k, split_ratio};
}

// Accepts a bare basis object or a fit-fringe report carrying setpoints.basis.
chsh::BasisAssignment load_basis(const std::string& path) {
  const json j = io::read_json_file(path);
  if (j.is_object() && j.contains("setpoints")) {
    const auto& sp = j.at("setpoints");
    if (sp.is_null() || !sp.contains("basis")) throw ValidationError("'" + path + "' holds no setpoints");
    return io::basis_from_json(sp.at("basis"));
  }
  return io::basis_from_json(j);
}

void emit(const CommandConfig& c, std::ostream& out, const std::string& text) {
  if (c.out_path.empty()) {
    out << text;
  } else {
    io::write_text_file(c.out_path, text);
  }
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  return g;
}

std::string pattern_kind_name(PatternKind k) {
  switch (k) {
    case PatternKind::DoubleClick: return "double-click";
    case PatternKind::InLab: return "in-lab";
    case PatternKind::CrossLab: return "cross-lab";
  }
  return "";
}

constexpr PostSelectionMode kAllModes[3] = {PostSelectionMode::NumberResolving,
                                            PostSelectionMode::DiscardDoubles,
                                            PostSelectionMode::CrossLabOnly};

// ---- subcommands -----------------------------------------------------------

int run_table(const CommandConfig& c, std::ostream& out) {
  const auto dist = protocol::pattern_distribution(c.phases, c.overlap);
  const auto& pats = all_patterns();
  if (c.format == Format::Csv) {
    std::ostringstream os;
    os << "n_a1,n_a2,n_b1,n_b2,kind,probability,a,b\n";
    for (std::size_t i = 0; i < kNumPatterns; ++i) {
      const auto& p = pats[i];
      const auto o = protocol::outcome_of(p);
      os << int(p.n[0]) << ',' << int(p.n[1]) << ',' << int(p.n[2]) << ',' << int(p.n[3]) << ','
         << pattern_kind_name(pattern_kind(p)) << ',' << io::format_double(dist[i]) << ',' << o.a << ','
         << o.b << '\n';
    }
    emit(c, out, os.str());
    return 0;
  }
  json patterns = json::array();
  for (std::size_t i = 0; i < kNumPatterns; ++i) {
    const auto& p = pats[i];
    const auto o = protocol::outcome_of(p);
    patterns.push_back({{"pattern", {p.n[0], p.n[1], p.n[2], p.n[3]}},
                        {"kind", pattern_kind_name(pattern_kind(p))},
                        {"probability", dist[i]},
                        {"outcome", {{"a", o.a}, {"b", o.b}}}});
  }
  json groups = json::object();
  for (auto m : kAllModes) {
    const auto g = protocol::group_probabilities(dist, m);
    groups[std::string(mode_name(m))] = {{"pp", g.p_pp},
                                         {"pm", g.p_pm},
                                         {"mp", g.p_mp},
                                         {"mm", g.p_mm},
                                         {"correlation", chsh::correlation(g)}};
  }
  emit(c, out,
       dump({{"phi_x", c.phases.phi_x},
             {"phi_y", c.phases.phi_y},
             {"overlap", c.overlap},
             {"patterns", patterns},
             {"groups", groups}}));
  return 0;
}

constexpr PostSelectionMode kCurveModes[2] = {PostSelectionMode::CrossLabOnly,
                                              PostSelectionMode::NumberResolving};

int run_theory(const CommandConfig& c, std::ostream& out) {
  if (c.format == Format::Csv) {
    std::ostringstream os;
    os << "mode,v,b_max\n";
    for (auto m : kCurveModes) {
      for (const auto& [v, b] : chsh::theory_curve(m, c.v_grid)) {
        os << mode_name(m) << ',' << io::format_double(v) << ',' << io::format_double(b) << '\n';
      }
    }
    emit(c, out, os.str());
    return 0;
  }
  json curves = json::array();
  for (auto m : kCurveModes) {
    json pts = json::array();
    for (const auto& [v, b] : chsh::theory_curve(m, c.v_grid)) pts.push_back({{"v", v}, {"b_max", b}});
    curves.push_back({{"mode", std::string(mode_name(m))}, {"points", pts}});
  }
  emit(c, out, dump({{"curves", curves}}));
  return 0;
}

int run_optimize(const CommandConfig& c, std::ostream& out) {
  const auto opt = chsh::optimize_theta(c.overlap, c.mode);
  const auto basis = chsh::BasisAssignment::from_theta(opt.theta);
  emit(c, out,
       dump({{"mode", std::string(mode_name(c.mode))},
             {"overlap", c.overlap},
             {"theta", opt.theta},
             {"value", opt.value},
             {"threshold", chsh::violation_threshold(c.mode)},
             {"basis", io::to_json(basis)}}));
  return 0;
}

int run_simulate(const CommandConfig& c, std::ostream& out) {
  io::ClickFile file;
  file.distinguishable = c.run.distinguishable;
  file.acquisition_s = c.run.acquisition_s;
  file.records = montecarlo::simulate_run(c.run);
  std::ostringstream os;
  io::write_clicks_csv(os, file);
  emit(c, out, os.str());
  return 0;
}

int run_hom_scan(const CommandConfig& c, std::ostream& out) {
  const auto points = montecarlo::simulate_hom_scan(c.run, c.scan);
  std::ostringstream os;
  io::write_hom_csv(os, points);
  emit(c, out, os.str());
  return 0;
}

int run_fringe_scan(const CommandConfig& c, std::ostream& out) {
  io::FringeFile file;
  file.mode = c.mode;
  for (double phi_x : c.fringe_phi_x) {
    auto pts = montecarlo::simulate_fringe_scan(c.run, phi_x, c.fringe_phi_y, c.mode, c.run.acquisition_s);
    file.points.insert(file.points.end(), pts.begin(), pts.end());
  }
  std::ostringstream os;
  io::write_fringe_csv(os, file);
  emit(c, out, os.str());
  return 0;
}

io::ClickFile load_clicks(const std::string& path) {
  std::istringstream is(io::read_text_file(path));
  return io::read_clicks_csv(is);
}

int run_calibrate(const CommandConfig& c, std::ostream& out) {
  const auto file = load_clicks(c.in_path);
  if (!file.distinguishable) {
    throw ValidationError("calibration needs a distinguishable-photon file (header flag distinguishable=true)");
  }
  emit(c, out, dump(io::to_json(analysis::estimate_efficiencies(file.records))));
  return 0;
}

analysis::ResampleOptions resample_options(const CommandConfig& c, analysis::ResampleOptions r) {
  if (c.resamples > 0) r.resamples = c.resamples;
  if (c.seed_given) r.seed = c.seed;
  return r;
}

int run_fit_hom(const CommandConfig& c, std::ostream& out) {
  std::istringstream is(io::read_text_file(c.in_path));
  const auto scan = io::read_hom_csv(is);
  emit(c, out, dump(io::to_json(analysis::fit_hom_dip(scan, resample_options(c, {})))));
  return 0;
}

int run_fit_fringe(const CommandConfig& c, std::ostream& out) {
  std::istringstream is(io::read_text_file(c.in_path));
  const auto file = io::read_fringe_csv(is);
  const auto mode = c.mode_given ? c.mode : file.mode;
  std::vector<double> phi_xs;
  for (const auto& p : file.points) {
    if (std::find(phi_xs.begin(), phi_xs.end(), p.phi_x) == phi_xs.end()) phi_xs.push_back(p.phi_x);
  }
  if (phi_xs.empty()) throw ValidationError("fringe file holds no scan points");

  analysis::FringeFitOptions opts;
  opts.detector = c.detector;
  opts.resampling = resample_options(c, opts.resampling);
  std::vector<analysis::FringeFit> fits;
  json fits_json = json::array();
  for (double phi_x : phi_xs) {
    std::vector<montecarlo::FringeScanPoint> scan;
    for (const auto& p : file.points) {
      if (p.phi_x == phi_x) scan.push_back(p);
    }
    fits.push_back({phi_x, analysis::fit_fringe(scan, mode, opts)});
    fits_json.push_back({{"phi_x", phi_x}, {"fit", io::to_json(fits.back().fit)}});
  }

  json setpoints = nullptr;
  const auto has = [&](double target) {
    return std::any_of(phi_xs.begin(), phi_xs.end(), [&](double x) { return std::abs(x - target) < 1e-6; });
  };
  if (has(pi / 8.0) && has(-3.0 * pi / 8.0)) {
    const auto sp = analysis::derive_setpoints(fits, c.tolerance);
    setpoints = {{"basis", io::to_json(sp.basis)}, {"offset", sp.offset}, {"warnings", sp.warnings}};
  }
  emit(c, out, dump({{"mode", std::string(mode_name(mode))}, {"fits", fits_json}, {"setpoints", setpoints}}));
  return 0;
}

int run_chsh(const CommandConfig& c, std::ostream& out) {
  const auto file = load_clicks(c.in_path);
  analysis::ChshOptions opts;
  opts.detector = c.detector;
  if (c.resamples > 0) opts.resamples = c.resamples;
  if (c.seed_given) opts.seed = c.seed;
  opts.phase_noise_prior_rad = c.phase_noise_prior_rad;
  const auto eff = c.efficiency.value_or(detectors::EfficiencyMap{});
  emit(c, out, dump(io::to_json(analysis::estimate_chsh(file.records, c.mode, eff, opts))));
  return 0;
}

bool given_flag(CLI::App* sub, const std::string& name) {
  const auto* o = sub->get_option_no_throw(name);
  return o != nullptr && o->count() > 0;
}

void report(const Error& e, std::ostream& err) {
  json j{{"error", error_code_name(e.code())}, {"message", e.what()}};
  if (const auto* fe = dynamic_cast<const FitError*>(&e)) j["diagnostics"] = fe->diagnostics();
  err << j.dump() << "\n";
}

}  // namespace

CommandConfig parse_invocation(const std::vector<std::string>& argv) {
  CommandConfig c;
  c.phases = PhaseSettings{pi / 8.0, pi / 8.0};
  CLI::App app{"Two-copy single-photon Bell test: theory, simulation and analysis", "twocopy"};
  app.require_subcommand(1);

  std::string format;
  std::string mode = "cross-lab-only";
  std::string detector = "pseudo";
  double split_ratio = 0.5;
  std::string config_path;
  std::string basis_path;
  std::string efficiencies_path;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  double v0 = 0, pair_rate = 0, acquisition = 0, noise = 0, drift = 0, offset = 0;
  int windows = 0;
  std::vector<double> eff;
  std::string reading;
  double v_min = 0.0, v_max = 1.0;
  int points = 0;
  double delay_min = -3.0, delay_max = 3.0, coherence = 1.0, scan_acq = 1.0;
  std::vector<double> phi_x_list;
  double span = 2.0 * pi;

  auto add_out = [&](CLI::App* s) { s->add_option("--out,-o", c.out_path, "Output path (default stdout)"); };
  auto add_seed = [&](CLI::App* s) { return s->add_option("--seed", seed, "Master seed"); };
  auto add_in = [&](CLI::App* s) { s->add_option("--in,-i", c.in_path, "Input file")->required(); };
  std::vector<CLI::Option*> run_opts;
  auto add_run = [&](CLI::App* s) {
    s->add_option("--config", config_path, "RunConfig JSON document");
    run_opts = {
        s->add_option("--v0", v0, "Photon overlap"),
        s->add_option("--pair-rate", pair_rate, "Pairs per second"),
        s->add_option("--acquisition", acquisition, "Seconds per window or scan point"),
        s->add_option("--windows", windows, "Windows per setting"),
        s->add_option("--phase-noise", noise, "Phase noise as a fraction of a fringe"),
        s->add_option("--fringe-reading", reading, "full-turn or half-turn"),
        s->add_option("--drift", drift, "Phase drift in rad/s"),
        s->add_option("--phase-offset", offset, "Instrument offset on the average phase (rad)"),
        s->add_option("--efficiency", eff, "Four channel efficiencies DA1 DA2 DB1 DB2")->expected(4),
        s->add_option("--detector", detector, "ideal, click-only or pseudo"),
        s->add_option("--split-ratio", split_ratio, "Pseudo-number-resolving splitter ratio"),
        s->add_option("--threads", threads, "Worker threads"),
        s->add_option("--basis", basis_path, "Basis JSON or fit-fringe report"),
    };
    s->add_flag("--distinguishable", c.run.distinguishable, "Simulate distinguishable photons");
    add_seed(s);
    add_out(s);
  };

  auto* table = app.add_subcommand("table", "Pattern distribution and outcome groups");
  table->add_option("--phi-x", c.phases.phi_x, "Alice phase (rad)")->capture_default_str();
  table->add_option("--phi-y", c.phases.phi_y, "Bob phase (rad)")->capture_default_str();
  table->add_option("--overlap", c.overlap, "Overlap v in [0, 1]")->capture_default_str();
  table->add_option("--format", format, "json (default) or csv");
  add_out(table);

  auto* theory = app.add_subcommand("theory", "Optimal CHSH versus overlap for both modes");
  theory->add_option("--v-min", v_min, "Smallest overlap")->capture_default_str();
  theory->add_option("--v-max", v_max, "Largest overlap")->capture_default_str();
  auto* theory_points = theory->add_option("--points", points, "Grid points (default 101)");
  theory->add_option("--format", format, "csv (default) or json");
  add_out(theory);

  auto* optimize = app.add_subcommand("optimize", "Optimal basis angle, CHSH value and threshold");
  auto* opt_mode = optimize->add_option("--mode", mode, "cross-lab-only or number-resolving");
  optimize->add_option("--overlap", c.overlap, "Overlap v in [0, 1]")->capture_default_str();
  add_out(optimize);

  auto* simulate = app.add_subcommand("simulate", "Simulate a CHSH run (ClickRecord CSV)");
  add_run(simulate);
  auto simulate_run_opts = run_opts;

  auto* hom = app.add_subcommand("hom-scan", "Simulate a HOM delay scan");
  add_run(hom);
  auto hom_run_opts = run_opts;
  hom->add_option("--delay-min", delay_min, "First delay")->capture_default_str();
  hom->add_option("--delay-max", delay_max, "Last delay")->capture_default_str();
  auto* hom_points = hom->add_option("--points", points, "Grid points (default 41)");
  hom->add_option("--coherence-sigma", coherence, "Gaussian coherence width")->capture_default_str();
  hom->add_option("--scan-acquisition", scan_acq, "Seconds per delay point")->capture_default_str();

  auto* fringe = app.add_subcommand("fringe-scan", "Simulate fringe scans over phi_y");
  add_run(fringe);
  auto fringe_run_opts = run_opts;
  auto* fringe_mode = fringe->add_option("--mode", mode, "Post-selection mode");
  fringe->add_option("--phi-x", phi_x_list, "Fixed Alice phases (default pi/8 and -3pi/8)");
  auto* fringe_points = fringe->add_option("--points", points, "Points per scan (default 48)");
  fringe->add_option("--span", span, "Scanned phi_y range starting at 0")->capture_default_str();

  auto* calibrate = app.add_subcommand("calibrate", "Relative efficiencies from a calibration file");
  add_in(calibrate);
  add_out(calibrate);

  auto* fit_hom = app.add_subcommand("fit-hom", "Gaussian dip fit of a HOM scan");
  add_in(fit_hom);
  fit_hom->add_option("--resamples", c.resamples, "Monte Carlo resamples");
  add_seed(fit_hom);
  add_out(fit_hom);

  auto* fit_fringe = app.add_subcommand("fit-fringe", "Fringe fits and derived phase set points");
  add_in(fit_fringe);
  auto* ff_mode = fit_fringe->add_option("--mode", mode, "Override the file's mode");
  fit_fringe->add_option("--detector", detector, "Detector model used for double clicks");
  fit_fringe->add_option("--split-ratio", split_ratio, "Pseudo-number-resolving splitter ratio");
  fit_fringe->add_option("--resamples", c.resamples, "Bootstrap resamples");
  fit_fringe->add_option("--tolerance", c.tolerance, "Offset consistency tolerance (rad)");
  add_seed(fit_fringe);
  add_out(fit_fringe);

  auto* chsh_cmd = app.add_subcommand("chsh", "CHSH estimate from a ClickRecord file");
  add_in(chsh_cmd);
  chsh_cmd->add_option("--mode", mode, "Post-selection mode")->required();
  chsh_cmd->add_option("--efficiencies", efficiencies_path, "EfficiencyMap JSON from calibrate");
  chsh_cmd->add_option("--detector", detector, "Detector model");
  chsh_cmd->add_option("--split-ratio", split_ratio, "Pseudo-number-resolving splitter ratio");
  chsh_cmd->add_option("--resamples", c.resamples, "Bootstrap resamples");
  chsh_cmd->add_option("--phase-noise-prior", c.phase_noise_prior_rad, "Phase jitter prior (rad)");
  add_seed(chsh_cmd);
  add_out(chsh_cmd);

  if (argv.size() > 1 && !argv[1].empty() && argv[1][0] != '-' && app.get_subcommand_no_throw(argv[1]) == nullptr) {
    throw UsageError("unknown command '" + argv[1] + "'");
  }
  std::vector<std::string> args(argv.size() > 1 ? argv.begin() + 1 : argv.end(), argv.end());
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    const auto subs = app.get_subcommands();
    c.command = "help";
    c.help_text = subs.empty() ? app.help() : subs.front()->help();
    return c;
  } catch (const CLI::CallForAllHelp&) {
    c.command = "help";
    c.help_text = app.help("", CLI::AppFormatMode::All);
    return c;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  CLI::App* sub = app.get_subcommands().front();
  c.command = sub->get_name();
  if (given_flag(sub, "--seed")) {
    c.seed = seed;
    c.seed_given = true;
  }
  if (given_flag(sub, "--mode")) {
    c.mode = parse_mode_flag(mode);
    c.mode_given = true;
  }
  if (given_flag(sub, "--detector") || given_flag(sub, "--split-ratio")) {
    c.detector = parse_detector_flag(detector, split_ratio);
  }

  if (sub == table) {
    c.format = format.empty() ? Format::Json : parse_format(format);
    if (!(c.overlap >= 0.0 && c.overlap <= 1.0)) throw ValidationError("--overlap must lie in [0, 1]");
  } else if (sub == theory) {
    c.format = format.empty() ? Format::Csv : parse_format(format);
    const int n = theory_points->count() > 0 ? points : 101;
    if (n < 1) throw UsageError("--points must be positive");
    if (!(v_min >= 0.0 && v_max <= 1.0 && v_min <= v_max)) throw ValidationError("--v-min/--v-max must satisfy 0 <= min <= max <= 1");
    c.v_grid = linspace(v_min, v_max, n);
  } else if (sub == optimize) {
    (void)opt_mode;
    if (c.mode == PostSelectionMode::DiscardDoubles) {
      throw UsageError("--mode: optimize supports cross-lab-only and number-resolving");
    }
    if (!(c.overlap >= 0.0 && c.overlap <= 1.0)) throw ValidationError("--overlap must lie in [0, 1]");
  } else if (sub == simulate || sub == hom || sub == fringe) {
    if (!config_path.empty()) c.run = io::run_config_from_json(io::read_json_file(config_path), c.run);
    const auto& opts = sub == simulate ? simulate_run_opts : sub == hom ? hom_run_opts : fringe_run_opts;
    const auto given = [&](std::size_t k) { return opts[k]->count() > 0; };
    if (given(0)) c.run.v0 = v0;
    if (given(1)) c.run.pair_rate = pair_rate;
    if (given(2)) c.run.acquisition_s = acquisition;
    if (given(3)) c.run.windows_per_setting = windows;
    if (given(4)) c.run.phase_noise_frac = noise;
    if (given(5)) {
      if (reading == "full-turn") {
        c.run.fringe_reading = montecarlo::FringeReading::FullTurn;
      } else if (reading == "half-turn") {
        c.run.fringe_reading = montecarlo::FringeReading::HalfTurn;
      } else {
        throw UsageError("--fringe-reading: expected full-turn or half-turn");
      }
    }
    if (given(6)) c.run.drift_rad_per_s = drift;
    if (given(7)) c.run.phase_offset_rad = offset;
    if (given(8)) c.run.efficiency = detectors::EfficiencyMap({eff[0], eff[1], eff[2], eff[3]});
    if (given(9) || given(10)) c.run.detector = c.detector;
    if (given(11)) c.run.threads = threads;
    if (given(12)) c.run.basis = load_basis(basis_path);
    if (given_flag(sub, "--distinguishable")) c.run.distinguishable = true;
    if (c.seed_given) c.run.seed = c.seed;
    montecarlo::validate(c.run);

    if (sub == hom) {
      const int n = hom_points->count() > 0 ? points : 41;
      if (n < 2) throw UsageError("--points must be at least 2");
      if (!(delay_min < delay_max)) throw UsageError("--delay-min must be below --delay-max");
      c.scan.grid = linspace(delay_min, delay_max, n);
      c.scan.coherence_sigma = coherence;
      c.scan.acquisition_s = scan_acq;
      montecarlo::validate(c.scan);
    }
    if (sub == fringe) {
      (void)fringe_mode;
      c.fringe_phi_x = phi_x_list.empty() ? std::vector<double>{pi / 8.0, -3.0 * pi / 8.0} : phi_x_list;
      const int n = fringe_points->count() > 0 ? points : 48;
      if (n < 2) throw UsageError("--points must be at least 2");
      if (!(span > 0.0)) throw UsageError("--span must be positive");
      c.fringe_phi_y.resize(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) c.fringe_phi_y[static_cast<std::size_t>(i)] = span * i / n;
    }
  } else if (sub == chsh_cmd) {
    if (!efficiencies_path.empty()) c.efficiency = io::efficiency_from_json(io::read_json_file(efficiencies_path));
  } else if (sub == fit_fringe) {
    (void)ff_mode;
  }
  (void)calibrate;
  (void)fit_hom;
  if (c.resamples < 0) throw UsageError("--resamples must be positive");
  return c;
}

int execute(const CommandConfig& c, std::ostream& out, std::ostream& err) {
  try {
    if (c.command == "help") {
      out << c.help_text;
      return 0;
    }
    if (c.command == "table") return run_table(c, out);
    if (c.command == "theory") return run_theory(c, out);
    if (c.command == "optimize") return run_optimize(c, out);
    if (c.command == "simulate") return run_simulate(c, out);
    if (c.command == "hom-scan") return run_hom_scan(c, out);
    if (c.command == "fringe-scan") return run_fringe_scan(c, out);
    if (c.command == "calibrate") return run_calibrate(c, out);
    if (c.command == "fit-hom") return run_fit_hom(c, out);
    if (c.command == "fit-fringe") return run_fit_fringe(c, out);
    if (c.command == "chsh") return run_chsh(c, out);
    throw UsageError("unknown command '" + c.command + "'");
  } catch (const Error& e) {
    report(e, err);
    return exit_status(e.code());
  } catch (const std::exception& e) {
    err << json{{"error", "internal"}, {"message", e.what()}}.dump() << "\n";
    return 1;
  }
}

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CommandConfig config;
  try {
    config = parse_invocation(argv);
  } catch (const Error& e) {
    report(e, err);
    return exit_status(e.code());
  } catch (const std::exception& e) {
    err << json{{"error", "internal"}, {"message", e.what()}}.dump() << "\n";
    return 1;
  }
  return execute(config, out, err);
}

}  // namespace twocopy::cli
