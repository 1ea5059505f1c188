#pragma once

// File formats shared by the CLI and by downstream consumers.
//
// CSV files start with one comment line "# twocopy <kind> v1 key=value ...",
// followed by a fixed column header. Angles are radians; doubles are written
// in shortest round-trip form.

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "twocopy/analysis.hpp"
#include "twocopy/montecarlo.hpp"

namespace twocopy::io {

using nlohmann::json;

std::string format_double(double x);

struct ClickFile {
  bool distinguishable = false;
  double acquisition_s = 1.0;
  std::vector<montecarlo::ClickRecord> records;
};

inline constexpr const char* kClickColumns = "window_id,x,y,n_a1,n_a2,n_b1,n_b2";
inline constexpr const char* kHomColumns = "delay,inlab_coinc,double_clicks,total_pairs";
inline constexpr const char* kFringeColumns = "phi_y,phi_x,n_pp,n_pm,n_mp,n_mm,n_doubles";

void write_clicks_csv(std::ostream& os, const ClickFile& file);
ClickFile read_clicks_csv(std::istream& is);

void write_hom_csv(std::ostream& os, const std::vector<montecarlo::HomScanPoint>& points);
std::vector<montecarlo::HomScanPoint> read_hom_csv(std::istream& is);

struct FringeFile {
  PostSelectionMode mode = PostSelectionMode::CrossLabOnly;
  std::vector<montecarlo::FringeScanPoint> points;
};

void write_fringe_csv(std::ostream& os, const FringeFile& file);
FringeFile read_fringe_csv(std::istream& is);

json to_json(const detectors::EfficiencyMap& eff);
detectors::EfficiencyMap efficiency_from_json(const json& j);

json to_json(const analysis::FitResult& fit);
analysis::FitResult fit_from_json(const json& j);

json to_json(const analysis::ChshEstimate& est);
json to_json(const chsh::BasisAssignment& basis);
chsh::BasisAssignment basis_from_json(const json& j);

json to_json(const montecarlo::RunConfig& config);
/// Strict: unknown keys and wrong types are rejected; absent keys keep defaults.
montecarlo::RunConfig run_config_from_json(const json& j, montecarlo::RunConfig base = {});

json read_json_file(const std::string& path);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& contents);

}  // namespace twocopy::io
