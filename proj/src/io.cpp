#include "twocopy/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "twocopy/error.hpp"

namespace twocopy::io {
namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, std::size_t line_no) {
  double x = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw IoError("line " + std::to_string(line_no) + ": malformed number '" + s + "'");
  }
  return x;
}

std::int64_t parse_int(const std::string& s, std::size_t line_no) {
  std::int64_t x = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw IoError("line " + std::to_string(line_no) + ": malformed integer '" + s + "'");
  }
  return x;
}

// Parses "# twocopy <kind> v1 k=v ..." and checks the column header line.
std::map<std::string, std::string> read_preamble(std::istream& is, const std::string& kind,
                                                 const char* columns) {
  std::string line;
  if (!std::getline(is, line)) throw IoError("empty " + kind + " file");
  auto words = split(line, ' ');
  if (words.size() < 4 || words[0] != "#" || words[1] != "twocopy" || words[2] != kind) {
    throw IoError("not a twocopy " + kind + " file (bad first line)");
  }
  if (words[3] != "v1") throw IoError("unsupported " + kind + " format version '" + words[3] + "'");
  std::map<std::string, std::string> flags;
  for (std::size_t i = 4; i < words.size(); ++i) {
    auto eq = words[i].find('=');
    if (eq == std::string::npos) throw IoError("malformed header flag '" + words[i] + "'");
    flags[words[i].substr(0, eq)] = words[i].substr(eq + 1);
  }
  if (!std::getline(is, line) || split(line, '\n')[0] != columns) {
    throw IoError(kind + " file: expected columns '" + std::string(columns) + "'");
  }
  return flags;
}

template <typename Fn>
void for_each_row(std::istream& is, std::size_t n_cols, Fn&& fn) {
  std::string line;
  std::size_t line_no = 2;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split(line, ',');
    if (cells.size() != n_cols) {
      throw IoError("line " + std::to_string(line_no) + ": expected " + std::to_string(n_cols) + " columns");
    }
    fn(cells, line_no);
  }
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ValidationError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read_field(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(std::string("config key '") + key + "' has the wrong type");
  }
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

void write_clicks_csv(std::ostream& os, const ClickFile& file) {
  os << "# twocopy clicks v1 distinguishable=" << (file.distinguishable ? "true" : "false")
     << " acquisition_s=" << format_double(file.acquisition_s) << "\n";
  os << kClickColumns << "\n";
  for (const auto& r : file.records) {
    os << r.window_id << ',' << int(r.x) << ',' << int(r.y);
    for (auto c : r.observed.counts) os << ',' << int(c);
    os << '\n';
  }
}

ClickFile read_clicks_csv(std::istream& is) {
  auto flags = read_preamble(is, "clicks", kClickColumns);
  ClickFile file;
  if (flags.count("distinguishable")) {
    const auto& d = flags["distinguishable"];
    if (d != "true" && d != "false") throw IoError("distinguishable flag must be true or false");
    file.distinguishable = d == "true";
  }
  if (flags.count("acquisition_s")) file.acquisition_s = parse_double(flags["acquisition_s"], 1);
  for_each_row(is, 7, [&](const std::vector<std::string>& c, std::size_t line_no) {
    montecarlo::ClickRecord r;
    const auto id = parse_int(c[0], line_no);
    const auto x = parse_int(c[1], line_no);
    const auto y = parse_int(c[2], line_no);
    if (id < 0 || x < 0 || x > 1 || y < 0 || y > 1) {
      throw IoError("line " + std::to_string(line_no) + ": window/basis fields out of range");
    }
    r.window_id = static_cast<std::uint32_t>(id);
    r.x = static_cast<std::uint8_t>(x);
    r.y = static_cast<std::uint8_t>(y);
    int total = 0;
    for (int ch = 0; ch < 4; ++ch) {
      const auto n = parse_int(c[3 + ch], line_no);
      if (n < 0 || n > 2) throw IoError("line " + std::to_string(line_no) + ": count out of range");
      r.observed.counts[ch] = static_cast<std::uint8_t>(n);
      total += static_cast<int>(n);
    }
    if (total > 2) throw IoError("line " + std::to_string(line_no) + ": more than two photons");
    r.observed.lost = static_cast<std::uint8_t>(2 - total);
    r.wall_time_s = static_cast<double>(r.window_id) * file.acquisition_s;
    file.records.push_back(r);
  });
  return file;
}

void write_hom_csv(std::ostream& os, const std::vector<montecarlo::HomScanPoint>& points) {
  os << "# twocopy hom-scan v1\n" << kHomColumns << "\n";
  for (const auto& p : points) {
    os << format_double(p.delay) << ',' << p.inlab_coinc << ',' << p.double_clicks << ','
       << p.total_pairs << '\n';
  }
}

std::vector<montecarlo::HomScanPoint> read_hom_csv(std::istream& is) {
  read_preamble(is, "hom-scan", kHomColumns);
  std::vector<montecarlo::HomScanPoint> out;
  for_each_row(is, 4, [&](const std::vector<std::string>& c, std::size_t line_no) {
    out.push_back({parse_double(c[0], line_no), parse_int(c[1], line_no), parse_int(c[2], line_no),
                   parse_int(c[3], line_no)});
  });
  return out;
}

void write_fringe_csv(std::ostream& os, const FringeFile& file) {
  os << "# twocopy fringe-scan v1 mode=" << mode_name(file.mode) << "\n" << kFringeColumns << "\n";
  for (const auto& p : file.points) {
    os << format_double(p.phi_y) << ',' << format_double(p.phi_x) << ',' << p.n_pp << ',' << p.n_pm
       << ',' << p.n_mp << ',' << p.n_mm << ',' << p.n_doubles << '\n';
  }
}

FringeFile read_fringe_csv(std::istream& is) {
  auto flags = read_preamble(is, "fringe-scan", kFringeColumns);
  FringeFile file;
  if (flags.count("mode")) {
    try {
      file.mode = parse_mode(flags["mode"]);
    } catch (const ValidationError& e) {
      throw IoError(e.what());
    }
  }
  for_each_row(is, 7, [&](const std::vector<std::string>& c, std::size_t line_no) {
    montecarlo::FringeScanPoint p;
    p.phi_y = parse_double(c[0], line_no);
    p.phi_x = parse_double(c[1], line_no);
    p.n_pp = parse_int(c[2], line_no);
    p.n_pm = parse_int(c[3], line_no);
    p.n_mp = parse_int(c[4], line_no);
    p.n_mm = parse_int(c[5], line_no);
    p.n_doubles = parse_int(c[6], line_no);
    file.points.push_back(p);
  });
  return file;
}

json to_json(const detectors::EfficiencyMap& eff) {
  const auto& e = eff.values();
  return json{{"DA1", e[0]}, {"DA2", e[1]}, {"DB1", e[2]}, {"DB2", e[3]}};
}

detectors::EfficiencyMap efficiency_from_json(const json& j) {
  if (j.is_array()) {
    if (j.size() != 4) throw ValidationError("efficiency array needs 4 entries");
    try {
      return detectors::EfficiencyMap({j[0].get<double>(), j[1].get<double>(), j[2].get<double>(),
                                       j[3].get<double>()});
    } catch (const json::exception&) {
      throw ValidationError("efficiency entries must be numbers");
    }
  }
  reject_unknown(j, {"DA1", "DA2", "DB1", "DB2"}, "efficiency map");
  std::array<double, 4> e{};
  const char* keys[4] = {"DA1", "DA2", "DB1", "DB2"};
  for (int k = 0; k < 4; ++k) {
    if (!j.contains(keys[k])) throw ValidationError(std::string("efficiency map lacks ") + keys[k]);
    read_field(j, keys[k], e[k]);
  }
  return detectors::EfficiencyMap(e);
}

json to_json(const analysis::FitResult& fit) {
  json params = json::array();
  for (const auto& p : fit.params) params.push_back({{"name", p.name}, {"value", p.value}, {"std", p.std}});
  return json{{"params", params},
              {"residual_sum_squares", fit.residual_sum_squares},
              {"n_points", fit.n_points},
              {"iterations", fit.iterations},
              {"resamples", fit.resamples}};
}

analysis::FitResult fit_from_json(const json& j) {
  reject_unknown(j, {"params", "residual_sum_squares", "n_points", "iterations", "resamples"}, "fit result");
  analysis::FitResult fit;
  try {
    for (const auto& p : j.at("params")) {
      fit.params.push_back({p.at("name").get<std::string>(), p.at("value").get<double>(),
                            p.at("std").get<double>()});
    }
    fit.residual_sum_squares = j.at("residual_sum_squares").get<double>();
    fit.n_points = j.at("n_points").get<std::size_t>();
    fit.iterations = j.at("iterations").get<int>();
    fit.resamples = j.at("resamples").get<int>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed fit result: ") + e.what());
  }
  return fit;
}

json to_json(const analysis::ChshEstimate& est) {
  json settings = json::array();
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      const auto& t = est.tallies[x][y];
      settings.push_back({{"x", x},
                          {"y", y},
                          {"correlation", est.correlations[x][y]},
                          {"kept_events", t.kept_events},
                          {"windows", t.windows},
                          {"weighted_groups",
                           {{"pp", t.weighted_groups[0]},
                            {"pm", t.weighted_groups[1]},
                            {"mp", t.weighted_groups[2]},
                            {"mm", t.weighted_groups[3]}}}});
    }
  }
  return json{{"mode", std::string(mode_name(est.mode))},
              {"value", est.value},
              {"std", est.std},
              {"settings", settings}};
}

json to_json(const chsh::BasisAssignment& b) {
  return json{{"phi_x0", b.phi_x0}, {"phi_x1", b.phi_x1}, {"phi_y0", b.phi_y0}, {"phi_y1", b.phi_y1}};
}

chsh::BasisAssignment basis_from_json(const json& j) {
  reject_unknown(j, {"phi_x0", "phi_x1", "phi_y0", "phi_y1"}, "basis");
  for (const char* key : {"phi_x0", "phi_x1", "phi_y0", "phi_y1"}) {
    if (!j.contains(key)) throw ValidationError(std::string("basis lacks ") + key);
  }
  chsh::BasisAssignment b;
  read_field(j, "phi_x0", b.phi_x0);
  read_field(j, "phi_x1", b.phi_x1);
  read_field(j, "phi_y0", b.phi_y0);
  read_field(j, "phi_y1", b.phi_y1);
  return b;
}

json to_json(const montecarlo::RunConfig& c) {
  const auto& e = c.efficiency.values();
  return json{{"v0", c.v0},
              {"pair_rate", c.pair_rate},
              {"acquisition_s", c.acquisition_s},
              {"windows_per_setting", c.windows_per_setting},
              {"basis", to_json(c.basis)},
              {"detector", {{"kind", std::string(detectors::kind_name(c.detector.kind))},
                            {"split_ratio", c.detector.split_ratio}}},
              {"efficiency", {e[0], e[1], e[2], e[3]}},
              {"phase_noise_frac", c.phase_noise_frac},
              {"fringe_reading",
               c.fringe_reading == montecarlo::FringeReading::FullTurn ? "full-turn" : "half-turn"},
              {"drift_rad_per_s", c.drift_rad_per_s},
              {"phase_offset_rad", c.phase_offset_rad},
              {"distinguishable", c.distinguishable},
              {"seed", c.seed},
              {"threads", c.threads}};
}

montecarlo::RunConfig run_config_from_json(const json& j, montecarlo::RunConfig c) {
  reject_unknown(j,
                 {"v0", "pair_rate", "acquisition_s", "windows_per_setting", "basis", "detector",
                  "efficiency", "phase_noise_frac", "fringe_reading", "drift_rad_per_s",
                  "phase_offset_rad", "distinguishable", "seed", "threads"},
                 "run config");
  read_field(j, "v0", c.v0);
  read_field(j, "pair_rate", c.pair_rate);
  read_field(j, "acquisition_s", c.acquisition_s);
  read_field(j, "windows_per_setting", c.windows_per_setting);
  if (j.contains("basis")) c.basis = basis_from_json(j.at("basis"));
  if (j.contains("detector")) {
    const auto& d = j.at("detector");
    reject_unknown(d, {"kind", "split_ratio"}, "detector");
    std::string kind(detectors::kind_name(c.detector.kind));
    read_field(d, "kind", kind);
    c.detector.kind = detectors::parse_kind(kind);
    read_field(d, "split_ratio", c.detector.split_ratio);
  }
  if (j.contains("efficiency")) c.efficiency = efficiency_from_json(j.at("efficiency"));
  read_field(j, "phase_noise_frac", c.phase_noise_frac);
  if (j.contains("fringe_reading")) {
    std::string r;
    read_field(j, "fringe_reading", r);
    if (r == "full-turn") {
      c.fringe_reading = montecarlo::FringeReading::FullTurn;
    } else if (r == "half-turn") {
      c.fringe_reading = montecarlo::FringeReading::HalfTurn;
    } else {
      throw ValidationError("fringe_reading must be full-turn or half-turn");
    }
  }
  read_field(j, "drift_rad_per_s", c.drift_rad_per_s);
  read_field(j, "phase_offset_rad", c.phase_offset_rad);
  read_field(j, "distinguishable", c.distinguishable);
  read_field(j, "seed", c.seed);
  read_field(j, "threads", c.threads);
  montecarlo::validate(c);
  return c;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "': file not found or unreadable");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json_file(const std::string& path) {
  const auto text = read_text_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw IoError("malformed JSON in '" + path + "': " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << contents;
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace twocopy::io
