#include "fluxq/config.hpp"

#include <fstream>
#include <sstream>

#include "fluxq/errors.hpp"
#include "json.hpp"

namespace fluxq {

using nlohmann::json;

const std::vector<ConfigField>& run_config_fields() {
    static const std::vector<ConfigField> fields{
        {"field", &RunConfig::field, "control field family: f1|f2|f3|const|rsj"},
        {"delta", &RunConfig::delta, "dimensionless tunnel frequency"},
        {"omega", &RunConfig::omega, "f2 angular frequency, 0 < omega < 1/2"},
        {"phi", &RunConfig::phi, "f2 phase"},
        {"eps", &RunConfig::eps, "constant bias for the const family"},
        {"rsj-current", &RunConfig::rsj_current, "RSJ applied current I"},
        {"rsj-critical", &RunConfig::rsj_critical, "RSJ critical current I_c"},
        {"rsj-omega", &RunConfig::rsj_omega, "RSJ dimensionless drive frequency"},
        {"rsj-offset", &RunConfig::rsj_offset, "offset of the current-to-bias map"},
        {"rsj-scale", &RunConfig::rsj_scale, "scale of the current-to-bias map"},
        {"gamma-phi", &RunConfig::gamma_phi, "dephasing rate"},
        {"gamma-r", &RunConfig::gamma_r, "relaxation rate"},
        {"bloch-init", &RunConfig::bloch_init, "initial state: pure|mixed"},
        {"z-eq", &RunConfig::z_eq, "relaxation target (defaults to Z(0))"},
        {"t-max", &RunConfig::t_max, "end of the time window"},
        {"method", &RunConfig::method, "integrator: dop853|rk45|rk4"},
        {"dt", &RunConfig::dt, "rk4 step"},
        {"rtol", &RunConfig::rtol, "adaptive relative tolerance"},
        {"atol", &RunConfig::atol, "adaptive absolute tolerance"},
        {"max-steps", &RunConfig::max_steps, "integrator step budget"},
        {"sample", &RunConfig::sample, "sample spacing"},
        {"out", &RunConfig::out, "output CSV path"},
        {"threshold", &RunConfig::threshold, "hold-time threshold"},
        {"scan-param", &RunConfig::scan_param,
         "scanned parameter: delta|omega|phi|eps|gamma-phi|gamma-r"},
        {"scan-min", &RunConfig::scan_min, "first grid value"},
        {"scan-max", &RunConfig::scan_max, "last grid value"},
        {"scan-steps", &RunConfig::scan_steps, "number of grid points"},
        {"metric", &RunConfig::metric, "scan metric: avg|hold|amp|avg-exact"},
        {"window-start", &RunConfig::window_start, "averaging window start"},
        {"window-end", &RunConfig::window_end, "averaging window end (defaults to t-max)"},
        {"amp-start", &RunConfig::amp_start, "amplitude window start"},
        {"closed-form", &RunConfig::closed_form, "scan closed-form curves instead of integrating"},
        {"workers", &RunConfig::workers, "scan worker threads (0 = all cores)"},
    };
    return fields;
}

void check_enumerations(const RunConfig& c) {
    try {
        parse_field_kind(c.field);
        parse_method(c.method);
        parse_bloch_init(c.bloch_init);
        parse_scan_param(c.scan_param);
        parse_metric(c.metric);
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
}

RunConfig parse_config(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ConfigError("config must be a flat JSON object");
    }
    RunConfig cfg;
    const auto& fields = run_config_fields();
    for (const auto& [key, value] : doc.items()) {
        auto it = std::find_if(fields.begin(), fields.end(),
                               [&](const ConfigField& f) { return f.key == key; });
        if (it == fields.end()) {
            throw ConfigError("unknown config key '" + key + "'");
        }
        try {
            std::visit(
                [&](auto member) {
                    using T = std::remove_reference_t<decltype(cfg.*member)>;
                    if constexpr (std::is_same_v<T, std::optional<double>>) {
                        cfg.*member = value.is_null() ? std::nullopt
                                                      : std::optional<double>(value.get<double>());
                    } else if constexpr (std::is_same_v<T, double>) {
                        if (!value.is_number()) throw ConfigError("expected a number");
                        cfg.*member = value.get<double>();
                    } else if constexpr (std::is_same_v<T, std::int64_t>) {
                        if (!value.is_number_integer()) throw ConfigError("expected an integer");
                        cfg.*member = value.get<std::int64_t>();
                    } else if constexpr (std::is_same_v<T, bool>) {
                        if (!value.is_boolean()) throw ConfigError("expected a boolean");
                        cfg.*member = value.get<bool>();
                    } else {
                        if (!value.is_string()) throw ConfigError("expected a string");
                        cfg.*member = value.get<std::string>();
                    }
                },
                it->member);
        } catch (const ConfigError& e) {
            throw ConfigError("config key '" + key + "': " + e.what());
        } catch (const json::exception& e) {
            throw ConfigError("config key '" + key + "': " + e.what());
        }
    }
    check_enumerations(cfg);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string dump_config(const RunConfig& config) {
    json doc = json::object();
    for (const auto& f : run_config_fields()) {
        std::visit(
            [&](auto member) {
                using T = std::remove_cvref_t<decltype(config.*member)>;
                if constexpr (std::is_same_v<T, std::optional<double>>) {
                    const auto& v = config.*member;
                    doc[std::string(f.key)] = v ? json(*v) : json(nullptr);
                } else {
                    doc[std::string(f.key)] = config.*member;
                }
            },
            f.member);
    }
    return doc.dump(2);
}

FieldSpec field_from_config(const RunConfig& c) {
    switch (parse_field_kind(c.field)) {
        case FieldKind::F1: return FieldSpec::f1();
        case FieldKind::F2: return FieldSpec::f2(c.omega, c.phi);
        case FieldKind::F3: return FieldSpec::f3();
        case FieldKind::Const: return FieldSpec::constant(c.eps);
        case FieldKind::Rsj:
            return FieldSpec::rsj(c.rsj_current, c.rsj_critical, c.rsj_omega, c.rsj_offset,
                                  c.rsj_scale);
    }
    throw ConfigError("unknown field");
}

IntegratorSettings integrator_from_config(const RunConfig& c) {
    if (c.max_steps <= 0) {
        throw ParameterError("max-steps must be positive");
    }
    IntegratorSettings s;
    s.method = parse_method(c.method);
    s.dt = c.dt;
    s.rtol = c.rtol;
    s.atol = c.atol;
    s.max_steps = static_cast<std::size_t>(c.max_steps);
    s.sample_spacing = c.sample;
    s.validate();
    return s;
}

SimulationSetup setup_from_config(const RunConfig& c) {
    SimulationSetup s;
    s.field = validate_field_spec(field_from_config(c));
    derive_theta(c.delta);
    s.delta = c.delta;
    s.dissipation = {c.gamma_phi, c.gamma_r};
    s.dissipation.validate();
    s.init = parse_bloch_init(c.bloch_init);
    s.z_eq = c.z_eq;
    if (!(c.t_max > 0.0)) {
        throw ParameterError("t-max must be positive");
    }
    s.t_max = c.t_max;
    s.integrator = integrator_from_config(c);
    return s;
}

MetricSpec metric_from_config(const RunConfig& c) {
    MetricSpec m;
    m.kind = parse_metric(c.metric);
    m.window_start = c.window_start;
    m.window_end = c.window_end;
    m.threshold = c.threshold;
    m.amplitude_start = c.amp_start;
    m.closed_form = c.closed_form;
    return m;
}

std::vector<double> scan_grid_from_config(const RunConfig& c) {
    if (c.scan_steps < 1) {
        throw ParameterError("scan-steps must be at least 1");
    }
    if (c.scan_steps == 1) {
        return {c.scan_min};
    }
    if (!(c.scan_max > c.scan_min)) {
        throw ParameterError("scan-max must exceed scan-min");
    }
    std::vector<double> grid(static_cast<std::size_t>(c.scan_steps));
    const double step = (c.scan_max - c.scan_min) / static_cast<double>(c.scan_steps - 1);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        grid[i] = c.scan_min + static_cast<double>(i) * step;
    }
    grid.back() = c.scan_max;
    return grid;
}

}  // namespace fluxq
