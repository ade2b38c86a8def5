#pragma once

#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "fluxq/analysis.hpp"
#include "fluxq/config.hpp"

namespace fluxq {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,  // validation or integration failure
    kExitUsage = 2,    // usage or config error
};

/// Writes the trajectory CSV to config.out (default "trajectory.csv") and a
/// one-line summary to `out`. On failure no partial file is left behind.
int cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Writes param_value,metric_value,status rows to config.out (default
/// "scan.csv"). Succeeds when at least one grid point succeeded.
int cmd_scan(const RunConfig& config, std::ostream& out, std::ostream& err);

struct ValidationCell {
    FieldSpec field;
    double delta;
};

/// F1 and F3 over delta in {0.1, 0.34, sqrt(3)/2, sqrt(3)/2 + 0.1, 1.0, 1.54},
/// F2 over delta in {0.1, sqrt(3)/2 + 0.1} x omega in {0.105, 0.205, 0.314, 0.49},
/// and the constant-bias Rabi case at delta in {0.1, 0.5}.
std::vector<ValidationCell> default_validation_grid();

struct ValidateOptions {
    double t_max = 50.0;
    /// Defaults to 1e-6 for t_max <= 50 and 1e-5 beyond.
    std::optional<double> tolerance;
    IntegratorSettings integrator;
    ClosedForm closed_form;  // empty means closed_form_p_down
};

int cmd_validate(const ValidateOptions& options, std::ostream& out, std::ostream& err);

/// Prints exact critical theta/delta values next to bisection estimates.
int cmd_critical(std::string_view field, std::ostream& out, std::ostream& err);

/// Entry point of the `fluxq` executable.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fluxq
