#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gdp/diagnostics.hpp"
#include "gdp/params.hpp"
#include "gdp/pdesim.hpp"
#include "gdp/twave.hpp"

namespace gdp {

/// Shortest decimal that reads back to the same double.
std::string format_double(double v);

/// Columns eta, omega, u with u = A omega.
void write_profile_csv(std::ostream& os, const Profile& profile);
/// Reads the eta and omega columns back; derivatives by central differences.
Profile read_profile_csv(const std::filesystem::path& path);

nlohmann::json to_json(const StructuralParams& params);
nlohmann::json to_json(const WaveSpec& wave);
nlohmann::json profile_metadata(const Profile& profile, const WaveSpec& wave);
nlohmann::json to_json(const CollisionReport& report);

/// Columns t, x, u.
void write_snapshot_csv(std::ostream& os, const Snapshot& snap, const Grid& grid, bool header);
/// Columns t, mass, E, D, peak1_x, peak1_u, peak2_x, peak2_u (missing peaks empty).
void write_diagnostics_header(std::ostream& os);
void write_diagnostics_row(std::ostream& os, const DiagnosticsRecord& rec);
nlohmann::json trajectory_json(const Trajectory& traj);

struct Scenario {
    ModelCoefficients coefficients;
    std::optional<double> amplitude;
    std::optional<double> grid_length;
    std::optional<int> grid_nodes;
    std::optional<double> t_end;
    double cfl = 0.5;
    double snapshot_interval = 0.1;
    std::vector<WaveSeed> waves;
    ProfileOptions profile;
    double filter_strength = 0.0;
    double seam_tol = 1e-8;
    double peak_threshold = 0.0;
    std::optional<CollisionWindows> windows;
    std::string output_dir;
    std::string format = "csv";
    int fscan_points = 1000;

    StructuralParams params() const { return StructuralParams(coefficients); }
    /// Throws ConfigError when the grid, time or wave sections are missing.
    SimConfig sim_config() const;
};

/// Parses a JSON or TOML (by extension) scenario. Unknown keys and wrong
/// types raise ConfigError. Relative profile_csv paths resolve against the
/// scenario's directory.
Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
nlohmann::json toml_to_json(const std::string& toml_text);

} // namespace gdp
