#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "fluxq/analysis.hpp"
#include "fluxq/analytic.hpp"
#include "fluxq/errors.hpp"
#include "fluxq/fields.hpp"
#include "fluxq/propagator.hpp"

namespace py = pybind11;
using namespace fluxq;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Array to_array(const std::vector<double>& v) {
    Array out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

std::vector<double> to_vector(const Array& a) {
    return {a.data(), a.data() + a.size()};
}

IntegratorSettings make_settings(const std::string& method, double rtol, double atol, double dt,
                                 double sample) {
    IntegratorSettings s;
    s.method = parse_method(method);
    s.rtol = rtol;
    s.atol = atol;
    s.dt = dt;
    s.sample_spacing = sample;
    return s;
}

SimulationSetup make_setup(const FieldSpec& field, double delta, double t_max, double gamma_phi,
                           double gamma_r, const std::string& bloch_init,
                           std::optional<double> z_eq, const IntegratorSettings& settings) {
    SimulationSetup s;
    s.field = field;
    s.delta = delta;
    s.t_max = t_max;
    s.dissipation = {gamma_phi, gamma_r};
    s.init = parse_bloch_init(bloch_init);
    s.z_eq = z_eq;
    s.integrator = settings;
    return s;
}

py::dict trajectory_dict(const Trajectory& t) {
    py::dict d;
    for (Channel c : {Channel::Epsilon, Channel::PDown, Channel::PUp, Channel::X, Channel::Y,
                      Channel::Z, Channel::NormError}) {
        d[py::str(std::string(to_string(c)))] = to_array(t.channel(c));
    }
    d["tau"] = to_array(t.taus());
    d["propagator"] =
        t.metadata().propagator == Propagator::Schrodinger ? "schrodinger" : "bloch";
    return d;
}

std::string describe(const FieldSpec& f) {
    std::string s = "FieldSpec(" + std::string(to_string(f.kind()));
    if (f.kind() == FieldKind::F2) {
        s += ", omega=" + py::repr(py::float_(f.as<F2Field>().omega)).cast<std::string>() +
             ", phi=" + py::repr(py::float_(f.as<F2Field>().phi)).cast<std::string>();
    } else if (f.kind() == FieldKind::Const) {
        s += ", value=" + py::repr(py::float_(f.as<ConstField>().value)).cast<std::string>();
    }
    return s + ")";
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Two-level flux qubit dynamics: exact control fields, propagation, metrics";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<RangeError>(m, "RangeError", PyExc_ValueError);
    py::register_exception<ContractViolation>(m, "ContractViolation", base.ptr());
    py::register_exception<ConsistencyError>(m, "ConsistencyError", base.ptr());
    auto integ = py::register_exception<IntegrationError>(m, "IntegrationError", base.ptr());
    py::register_exception<DivergenceError>(m, "DivergenceError", integ.ptr());
    py::register_exception<UnsupportedFieldError>(m, "UnsupportedFieldError", base.ptr());
    py::register_exception<InsufficientDataError>(m, "InsufficientDataError", base.ptr());

    py::class_<FieldSpec>(m, "FieldSpec")
        .def_static("f1", &FieldSpec::f1)
        .def_static("f2", &FieldSpec::f2, py::arg("omega"), py::arg("phi") = 0.0)
        .def_static("f3", &FieldSpec::f3)
        .def_static("constant", &FieldSpec::constant, py::arg("value"))
        .def_static("rsj", &FieldSpec::rsj, py::arg("current"), py::arg("critical_current"),
                    py::arg("omega_tilde"), py::arg("offset"), py::arg("scale"))
        .def_property_readonly("kind", [](const FieldSpec& f) { return std::string(to_string(f.kind())); })
        .def_property_readonly("b", [](const FieldSpec& f) -> std::optional<double> {
            if (f.kind() != FieldKind::F2) return std::nullopt;
            return validate_field_spec(f).as<F2Field>().b;
        })
        .def("validated", [](const FieldSpec& f) { return validate_field_spec(f); })
        .def("__eq__", [](const FieldSpec& a, const FieldSpec& b) { return a == b; })
        .def("__repr__", &describe);

    m.def("derive_theta", &derive_theta, py::arg("delta"));
    m.def(
        "eval_field",
        [](const FieldSpec& f, const Array& tau) {
            const FieldSpec v = validate_field_spec(f);
            std::vector<double> out;
            out.reserve(static_cast<std::size_t>(tau.size()));
            for (double t : to_vector(tau)) out.push_back(eval_field(v, t));
            return to_array(out);
        },
        py::arg("field"), py::arg("tau"));
    m.def("f2_limit_phase", &f2_limit_phase, py::arg("omega"));
    m.def("rsj_current", py::vectorize(&rsj_current), py::arg("t"), py::arg("current"),
          py::arg("critical_current"), py::arg("omega_tilde"));
    m.def("rsj_omega_tilde", &rsj_omega_tilde, py::arg("current"), py::arg("critical_current"),
          py::arg("resistance"), py::arg("flux_quantum_factor"));

    m.def("p1_down", py::vectorize(&p1_down), py::arg("tau"), py::arg("delta"));
    m.def("p2_down", py::vectorize([](double tau, double delta, double omega) {
              return p2_down(tau, delta, omega);
          }),
          py::arg("tau"), py::arg("delta"), py::arg("omega"));
    m.def("p3_down", py::vectorize(&p3_down), py::arg("tau"), py::arg("delta"));
    m.def("rabi_p_down", py::vectorize(&rabi_p_down), py::arg("tau"), py::arg("delta"),
          py::arg("bias"));
    m.def("avg_p1_down", py::vectorize(&avg_p1_down), py::arg("delta"));
    m.def("avg_p3_down", py::vectorize(&avg_p3_down), py::arg("delta"));
    m.def("q1_coefficient", py::vectorize(&q1_coefficient), py::arg("theta"));
    m.def(
        "critical_thetas",
        [](const std::string& field) {
            std::vector<std::pair<double, double>> out;
            for (const auto& p : critical_thetas(parse_field_kind(field)).points) {
                out.emplace_back(p.theta, p.delta);
            }
            return out;
        },
        py::arg("field"), "List of (theta, delta) pairs.");

    m.def(
        "simulate",
        [](const FieldSpec& field, double delta, double t_max, double gamma_phi, double gamma_r,
           const std::string& bloch_init, std::optional<double> z_eq, const std::string& method,
           double rtol, double atol, double dt, double sample) {
            const auto setup = make_setup(field, delta, t_max, gamma_phi, gamma_r, bloch_init,
                                          z_eq, make_settings(method, rtol, atol, dt, sample));
            Trajectory t = [&] {
                py::gil_scoped_release release;
                return simulate(setup);
            }();
            return trajectory_dict(t);
        },
        py::arg("field"), py::arg("delta"), py::arg("t_max") = 50.0, py::arg("gamma_phi") = 0.0,
        py::arg("gamma_r") = 0.0, py::arg("bloch_init") = "pure", py::arg("z_eq") = py::none(),
        py::arg("method") = "dop853", py::arg("rtol") = 1e-12, py::arg("atol") = 1e-12,
        py::arg("dt") = 1e-3, py::arg("sample") = 0.01,
        "Propagates from the up state; returns a dict of numpy arrays keyed by channel.");

    m.def(
        "residual_report",
        [](const FieldSpec& field, double delta, double t_max) {
            py::gil_scoped_release release;
            return residual_report(field, TunnelParams(delta), t_max);
        },
        py::arg("field"), py::arg("delta"), py::arg("t_max") = 50.0);

    m.def(
        "time_average",
        [](const Array& tau, const Array& values, double t0, double t1) {
            return time_average(to_vector(tau), to_vector(values), t0, t1);
        },
        py::arg("tau"), py::arg("values"), py::arg("t0"), py::arg("t1"));
    m.def(
        "hold_time",
        [](const Array& tau, const Array& values, double threshold) {
            const HoldInterval h = hold_time(to_vector(tau), to_vector(values), threshold);
            return py::make_tuple(h.start, h.duration, h.found);
        },
        py::arg("tau"), py::arg("values"), py::arg("threshold") = 0.5,
        "Returns (start, duration, found) of the longest interval at or above threshold.");
    m.def(
        "dominant_frequency",
        [](const Array& tau, const Array& values) {
            return dominant_frequency(to_vector(tau), to_vector(values));
        },
        py::arg("tau"), py::arg("values"));
    m.def(
        "beat_frequency",
        [](const Array& tau, const Array& values) {
            const BeatResult b = beat_frequency(to_vector(tau), to_vector(values));
            py::dict d;
            d["angular_frequency"] = b.angular_frequency;
            d["envelope_max"] = b.envelope_max;
            d["envelope_min"] = b.envelope_min;
            d["peaks"] = b.peaks;
            return d;
        },
        py::arg("tau"), py::arg("values"));

    m.def(
        "scan",
        [](const std::string& param, const Array& grid, const FieldSpec& field, double delta,
           const std::string& metric, double t_max, double threshold, double window_start,
           std::optional<double> window_end, double gamma_phi, double gamma_r,
           bool closed_form, unsigned workers) {
            MetricSpec spec;
            spec.kind = parse_metric(metric);
            spec.threshold = threshold;
            spec.window_start = window_start;
            spec.window_end = window_end;
            spec.closed_form = closed_form;
            const auto setup = make_setup(field, delta, t_max, gamma_phi, gamma_r, "pure",
                                          std::nullopt, IntegratorSettings{});
            const auto g = to_vector(grid);
            ScanResult r = [&] {
                py::gil_scoped_release release;
                return scan(parse_scan_param(param), g, spec, setup, workers);
            }();
            py::dict d;
            d["values"] = to_array(r.values);
            d["metrics"] = to_array(r.metrics);
            d["status"] = r.status;
            return d;
        },
        py::arg("param"), py::arg("grid"), py::arg("field"), py::arg("delta") = 1.0,
        py::arg("metric") = "avg", py::arg("t_max") = 50.0, py::arg("threshold") = 0.5,
        py::arg("window_start") = 0.0, py::arg("window_end") = py::none(),
        py::arg("gamma_phi") = 0.0, py::arg("gamma_r") = 0.0, py::arg("closed_form") = false,
        py::arg("workers") = 0u);
}
