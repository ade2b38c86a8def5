#include "fluxq/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>

#include "CLI11.hpp"
#include "fluxq/analytic.hpp"
#include "fluxq/csv.hpp"
#include "fluxq/errors.hpp"

namespace fluxq {

namespace {

/// Maps library exceptions onto the exit-code contract.
int report(const std::exception& e, std::ostream& err) {
    err << "error: " << e.what() << '\n';
    if (dynamic_cast<const ParameterError*>(&e) || dynamic_cast<const ConfigError*>(&e) ||
        dynamic_cast<const ContractViolation*>(&e) ||
        dynamic_cast<const UnsupportedFieldError*>(&e) ||
        dynamic_cast<const RangeError*>(&e)) {
        return kExitUsage;
    }
    return kExitFailure;
}

/// Writes via a sibling temporary file so that a failed write leaves nothing.
void write_atomically(const std::string& path, const std::function<void(std::ostream&)>& body) {
    const std::string tmp = path + ".partial";
    try {
        {
            std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
            if (!f) throw IntegrationError("cannot open '" + tmp + "' for writing");
            body(f);
            f.flush();
            if (!f) throw IntegrationError("failed writing '" + tmp + "'");
        }
        std::filesystem::rename(tmp, path);
    } catch (...) {
        std::error_code ec;
        std::filesystem::remove(tmp, ec);
        throw;
    }
}

double bisect(const std::function<double(double)>& f, double lo, double hi) {
    double flo = f(lo);
    for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

std::string describe(const FieldSpec& spec) {
    std::string s(to_string(spec.kind()));
    if (spec.kind() == FieldKind::F2) {
        s += " omega=" + format_double(spec.as<F2Field>().omega);
    } else if (spec.kind() == FieldKind::Const) {
        s += " eps=" + format_double(spec.as<ConstField>().value);
    }
    return s;
}

}  // namespace

int cmd_simulate(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        check_enumerations(config);
        const SimulationSetup setup = setup_from_config(config);
        const Trajectory traj = simulate(setup);

        std::optional<std::vector<double>> analytic;
        if (setup.is_closed() && has_closed_form(setup.field)) {
            std::vector<double> col;
            col.reserve(traj.size());
            for (const auto& s : traj.samples()) {
                col.push_back(closed_form_p_down(setup.field, setup.delta, s.tau));
            }
            analytic = std::move(col);
        }

        const std::string path = config.out.empty() ? "trajectory.csv" : config.out;
        write_atomically(path, [&](std::ostream& f) { write_trajectory_csv(f, traj, analytic); });

        const HoldInterval hold = hold_time(traj, config.threshold, Channel::PDown);
        const auto& last = traj.samples().back();
        out << "field=" << describe(setup.field) << " delta=" << format_double(setup.delta)
            << " samples=" << traj.size() << " threshold=" << format_double(config.threshold)
            << " hold_start=" << format_double(hold.start)
            << " hold_duration=" << format_double(hold.duration)
            << " final_p_down=" << format_double(last.p_down)
            << " final_p_up=" << format_double(last.p_up);
        if (analytic) {
            double worst = 0.0;
            for (std::size_t k = 0; k < traj.size(); ++k) {
                worst = std::max(worst, std::abs(traj[k].p_down - (*analytic)[k]));
            }
            out << " max_residual=" << format_double(worst);
        }
        out << " out=" << path << '\n';
        return kExitOk;
    } catch (const std::exception& e) {
        return report(e, err);
    }
}

int cmd_scan(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        check_enumerations(config);
        const SimulationSetup base = setup_from_config(config);
        const std::vector<double> grid = scan_grid_from_config(config);
        if (config.workers < 0) throw ParameterError("workers must be nonnegative");
        const ScanResult result = scan(parse_scan_param(config.scan_param), grid,
                                       metric_from_config(config), base,
                                       static_cast<unsigned>(config.workers));

        const std::string path = config.out.empty() ? "scan.csv" : config.out;
        write_atomically(path, [&](std::ostream& f) { write_scan_csv(f, result); });

        out << "scan " << result.parameter << " metric=" << result.metric
            << " points=" << result.size() << " ok=" << result.succeeded();
        if (auto best = result.argmax()) {
            out << " max=" << format_double(result.metrics[*best])
                << " at=" << format_double(result.values[*best]);
        }
        out << " out=" << path << '\n';
        if (result.succeeded() == 0) {
            err << "error: every scan point failed; first failure: " << result.status.front()
                << '\n';
            return kExitFailure;
        }
        return kExitOk;
    } catch (const std::exception& e) {
        return report(e, err);
    }
}

std::vector<ValidationCell> default_validation_grid() {
    const double crit = std::sqrt(3.0) / 2.0;
    std::vector<ValidationCell> cells;
    for (const auto& spec : {FieldSpec::f1(), FieldSpec::f3()}) {
        for (double d : {0.1, 0.34, crit, crit + 0.1, 1.0, 1.54}) {
            cells.push_back({validate_field_spec(spec), d});
        }
    }
    for (double d : {0.1, crit + 0.1}) {
        for (double w : {0.105, 0.205, 0.314, 0.49}) {
            cells.push_back({validate_field_spec(FieldSpec::f2(w)), d});
        }
    }
    for (double d : {0.1, 0.5}) {
        cells.push_back({validate_field_spec(FieldSpec::constant(0.5)), d});
    }
    return cells;
}

int cmd_validate(const ValidateOptions& options, std::ostream& out, std::ostream& err) {
    try {
        const double tol = options.tolerance.value_or(options.t_max <= 50.0 ? 1e-6 : 1e-5);
        const ClosedForm closed = options.closed_form ? options.closed_form
                                                      : ClosedForm(closed_form_p_down);
        double worst = -1.0;
        std::string worst_cell;
        std::size_t failures = 0;
        for (const auto& cell : default_validation_grid()) {
            const double r = residual_report(cell.field, TunnelParams(cell.delta), options.t_max,
                                             options.integrator, closed);
            const bool ok = r <= tol;
            const std::string label = describe(cell.field) + " delta=" + format_double(cell.delta);
            out << label << " residual=" << format_double(r) << (ok ? " ok" : " FAIL") << '\n';
            if (!ok) ++failures;
            if (r > worst) {
                worst = r;
                worst_cell = label;
            }
        }
        if (failures > 0) {
            err << "validation failed: " << failures << " cell(s) above " << format_double(tol)
                << "; worst " << worst_cell << " residual=" << format_double(worst) << '\n';
            return kExitFailure;
        }
        out << "all cells within " << format_double(tol) << " (worst " << worst_cell
            << " residual=" << format_double(worst) << ")\n";
        return kExitOk;
    } catch (const std::exception& e) {
        return report(e, err);
    }
}

int cmd_critical(std::string_view field, std::ostream& out, std::ostream& err) {
    try {
        const FieldKind kind = parse_field_kind(field);
        const CriticalSet set = critical_thetas(kind);
        std::function<double(double)> coefficient;
        std::vector<std::pair<double, double>> brackets;
        if (kind == FieldKind::F1) {
            coefficient = [](double th) { return th * th - 4.0; };
            brackets = {{1.0, 3.0}};
        } else {
            coefficient = q1_coefficient;
            brackets = {{1.0, 2.0}, {2.0, 5.0}};
        }
        for (std::size_t i = 0; i < set.points.size(); ++i) {
            const auto& p = set.points[i];
            const double th_num = bisect(coefficient, brackets[i].first, brackets[i].second);
            out << "theta=" << format_double(p.theta) << " delta=" << format_double(p.delta)
                << " theta_bisection=" << format_double(th_num)
                << " theta_diff=" << format_double(std::abs(th_num - p.theta))
                << " coefficient_residual=" << format_double(std::abs(coefficient(p.theta)))
                << '\n';
        }
        return kExitOk;
    } catch (const std::exception& e) {
        return report(e, err);
    }
}

namespace {

struct RunFlags {
    RunConfig values;
    std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&, const RunConfig&)>>>
        bindings;
    std::string config_path;
};

void add_run_options(CLI::App& sub, RunFlags& flags) {
    sub.add_option("--config", flags.config_path, "flat JSON run config; flags override it");
    for (const auto& f : run_config_fields()) {
        const std::string name = "--" + std::string(f.key);
        const std::string help(f.help);
        std::visit(
            [&](auto member) {
                using T = std::remove_reference_t<decltype(flags.values.*member)>;
                CLI::Option* opt = nullptr;
                if constexpr (std::is_same_v<T, bool>) {
                    opt = sub.add_flag(name, flags.values.*member, help);
                } else {
                    opt = sub.add_option(name, flags.values.*member, help);
                }
                flags.bindings.emplace_back(
                    opt, [member](RunConfig& dst, const RunConfig& src) {
                        dst.*member = src.*member;
                    });
            },
            f.member);
    }
}

RunConfig resolve(const RunFlags& flags) {
    RunConfig cfg = flags.config_path.empty() ? RunConfig{} : load_config(flags.config_path);
    for (const auto& [opt, copy] : flags.bindings) {
        if (opt->count() > 0) copy(cfg, flags.values);
    }
    return cfg;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Two-level flux qubit dynamics: exact control fields, propagation, scans"};
    app.require_subcommand(1);

    RunFlags sim_flags;
    CLI::App* sim = app.add_subcommand("simulate", "propagate one run and write a CSV trajectory");
    add_run_options(*sim, sim_flags);

    RunFlags scan_flags;
    CLI::App* scn = app.add_subcommand("scan", "evaluate a metric over a parameter grid");
    add_run_options(*scn, scan_flags);

    ValidateOptions vopts;
    double v_tol = 0.0;
    std::string v_method = "dop853";
    CLI::App* val = app.add_subcommand("validate", "compare closed forms with propagation");
    val->add_option("--t-max", vopts.t_max, "end of the time window");
    CLI::Option* tol_opt = val->add_option("--tol", v_tol, "residual tolerance");
    val->add_option("--rtol", vopts.integrator.rtol, "adaptive relative tolerance");
    val->add_option("--atol", vopts.integrator.atol, "adaptive absolute tolerance");
    val->add_option("--method", v_method, "integrator: dop853|rk45|rk4");
    val->add_option("--dt", vopts.integrator.dt, "rk4 step");
    val->add_option("--sample", vopts.integrator.sample_spacing, "sample spacing");

    std::string crit_field;
    CLI::App* crit = app.add_subcommand("critical", "print critical tunnel frequencies");
    crit->add_option("--field", crit_field, "f1|f3")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (sim->parsed()) return cmd_simulate(resolve(sim_flags), out, err);
        if (scn->parsed()) return cmd_scan(resolve(scan_flags), out, err);
        if (val->parsed()) {
            if (tol_opt->count() > 0) vopts.tolerance = v_tol;
            vopts.integrator.method = parse_method(v_method);
            vopts.integrator.validate();
            return cmd_validate(vopts, out, err);
        }
        if (crit->parsed()) return cmd_critical(crit_field, out, err);
    } catch (const std::exception& e) {
        return report(e, err);
    }
    return kExitUsage;
}

}  // namespace fluxq
