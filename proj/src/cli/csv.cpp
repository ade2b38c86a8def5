#include "fluxq/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

#include "fluxq/errors.hpp"

namespace fluxq {

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
    if (text == "nan") return std::nan("");
    if (text == "inf") return INFINITY;
    if (text == "-inf") return -INFINITY;
    double v = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw ParameterError("not a number: '" + std::string(text) + "'");
    }
    return v;
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        out.push_back(line.substr(start, pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string sanitize(std::string s) {
    for (char& c : s) {
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    }
    return s;
}

}  // namespace

std::size_t CsvTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw RangeError("no CSV column '" + std::string(name) + "'");
}

std::vector<double> CsvTable::numeric_column(std::string_view name) const {
    const std::size_t c = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.push_back(parse_double(row.at(c)));
    return out;
}

CsvTable read_csv(std::istream& in) {
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) {
        throw ParameterError("CSV input is empty");
    }
    t.header = split(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto row = split(line);
        if (row.size() != t.header.size()) {
            throw ParameterError("CSV row width differs from header");
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                          const std::optional<std::vector<double>>& analytic) {
    if (analytic && analytic->size() != traj.size()) {
        throw ParameterError("analytic column length differs from trajectory");
    }
    out << kTrajectoryHeader;
    if (analytic) out << ",p_down_analytic";
    out << '\n';
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const auto& s = traj[k];
        out << format_double(s.tau) << ',' << format_double(s.epsilon) << ','
            << format_double(s.p_down) << ',' << format_double(s.p_up) << ','
            << format_double(s.x) << ',' << format_double(s.y) << ',' << format_double(s.z)
            << ',' << format_double(s.norm_error);
        if (analytic) out << ',' << format_double((*analytic)[k]);
        out << '\n';
    }
}

void write_scan_csv(std::ostream& out, const ScanResult& result) {
    out << "param_value,metric_value,status\n";
    for (std::size_t i = 0; i < result.size(); ++i) {
        out << format_double(result.values[i]) << ',' << format_double(result.metrics[i]) << ','
            << sanitize(result.status[i]) << '\n';
    }
}

}  // namespace fluxq
