#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fluxq/analysis.hpp"
#include "fluxq/trajectory.hpp"

namespace fluxq {

/// Shortest form that survives a round trip, at most 17 significant digits.
std::string format_double(double value);

/// Parses a number written by format_double (including "nan", "inf").
double parse_double(std::string_view text);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(std::string_view name) const;
    std::vector<double> numeric_column(std::string_view name) const;
};

/// Comma-separated, header row, '\n' line endings, no quoting.
CsvTable read_csv(std::istream& in);

inline constexpr std::string_view kTrajectoryHeader = "tau,epsilon,p_down,p_up,x,y,z,norm_error";

/// Writes the trajectory; `analytic`, when given, adds a p_down_analytic column.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                          const std::optional<std::vector<double>>& analytic = std::nullopt);

void write_scan_csv(std::ostream& out, const ScanResult& result);

}  // namespace fluxq
