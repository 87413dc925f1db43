#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "svo/oracle.hpp"
#include "svo/propagation.hpp"
#include "svo/trajectory.hpp"

namespace svo {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Tolerances {
    double alignment{1e-9};
    double geometry{1e-9};
    double lp_feas{1e-8};
    double lp_opt{1e-9};
    double defect_rel{1e-6};
};

struct RunConfig {
    Vec n, d;
    Vec x0;
    int horizon{0};
    std::vector<double> measurements;  // explicit, or generated from seed/law
    bool seeded{false};
    std::uint64_t seed{0};
    DisturbanceLaw law{DisturbanceLaw::Uniform};
    bool bounds_check{true};
    bool oracle{true};
    int sample_density{64};
    Tolerances tol;
};

// Parses a config JSON document; error messages carry the offending field.
// Tolerances may be overridden by SVO_TOL_* environment variables.
RunConfig load_config(const std::string& json_text);
RunConfig load_config_file(const std::filesystem::path& path);

struct StepRecord {
    int k{0};
    double z{0.0};
    bool warmup{false};
    std::vector<Vec> vertices;
    std::vector<Halfspace> halfspaces;
    std::vector<BoundaryPoint> boundary_points;
    std::vector<Vec> oracle_vertices;
    std::vector<Vec> defects;
    std::optional<Vec> true_state;
};

struct RunReport {
    RunConfig config;
    std::vector<StepRecord> steps;
    int exit_code{0};  // 0 ok, 2 empty front, 3 degenerate front
    std::string stop_reason;
};

RunReport run(const RunConfig& config);

std::string report_to_json(const RunReport& report);
RunReport report_from_json(const std::string& json_text);

// Writes polygons.csv (closed vertex loops) and cones.csv (one ray per cone
// generator) under out_dir; column layout documented in the README.
void export_plot(const RunReport& report, const std::filesystem::path& out_dir);

}  // namespace svo
