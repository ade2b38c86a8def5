#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fluxq/analysis.hpp"
#include "fluxq/propagator.hpp"

namespace fluxq {

/// Flat run configuration. Each member corresponds to one command-line flag and
/// to one key of the JSON config file, both named as in run_config_fields().
struct RunConfig {
    std::string field = "f1";
    double delta = 1.0;
    double omega = 0.105;
    double phi = 0.0;
    double eps = 0.5;
    double rsj_current = 2.0;
    double rsj_critical = 1.0;
    double rsj_omega = 1.0;
    double rsj_offset = 0.5;
    double rsj_scale = -0.5;
    double gamma_phi = 0.0;
    double gamma_r = 0.0;
    std::string bloch_init = "pure";
    std::optional<double> z_eq;
    double t_max = 50.0;
    std::string method = "dop853";
    double dt = 1e-3;
    double rtol = 1e-12;
    double atol = 1e-12;
    std::int64_t max_steps = 100'000'000;
    double sample = 0.01;
    std::string out;
    double threshold = 0.5;
    std::string scan_param = "delta";
    double scan_min = 0.1;
    double scan_max = 2.0;
    std::int64_t scan_steps = 20;
    std::string metric = "avg";
    double window_start = 0.0;
    std::optional<double> window_end;
    double amp_start = 0.0;
    bool closed_form = false;
    std::int64_t workers = 0;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

using ConfigMember =
    std::variant<double RunConfig::*, std::optional<double> RunConfig::*,
                 std::string RunConfig::*, std::int64_t RunConfig::*, bool RunConfig::*>;

struct ConfigField {
    std::string_view key;  // flag name without the leading "--"
    ConfigMember member;
    std::string_view help;
};

const std::vector<ConfigField>& run_config_fields();

/// Parses a flat JSON object. Unknown keys, wrong types and invalid enumeration
/// values throw ConfigError.
RunConfig parse_config(std::string_view json_text);
RunConfig load_config(const std::string& path);
std::string dump_config(const RunConfig& config);

/// Throws ConfigError when an enumerated string is not recognised.
void check_enumerations(const RunConfig& config);

FieldSpec field_from_config(const RunConfig& config);
IntegratorSettings integrator_from_config(const RunConfig& config);
SimulationSetup setup_from_config(const RunConfig& config);
MetricSpec metric_from_config(const RunConfig& config);
/// scan-steps points evenly spaced over [scan-min, scan-max].
std::vector<double> scan_grid_from_config(const RunConfig& config);

}  // namespace fluxq
