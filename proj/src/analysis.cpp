#include "fluxq/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "fluxq/analytic.hpp"
#include "fluxq/errors.hpp"

namespace fluxq {

namespace {

void check_series(std::span<const double> tau, std::span<const double> values) {
    if (tau.size() != values.size()) {
        throw ParameterError("tau and value series differ in length");
    }
    if (tau.empty()) {
        throw InsufficientDataError("empty series");
    }
}

double span_slack(std::span<const double> tau) {
    return 1e-9 * std::max(1.0, std::abs(tau.back() - tau.front()));
}

double lerp_at(double t, double t0, double t1, double v0, double v1) {
    if (t1 == t0) return v0;
    return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
}

/// Crossing times of the series through `level` by linear interpolation.
std::vector<double> crossings(std::span<const double> tau, std::span<const double> values,
                              double level) {
    std::vector<double> out;
    for (std::size_t i = 1; i < values.size(); ++i) {
        const bool a = values[i - 1] >= level;
        const bool b = values[i] >= level;
        if (a != b) {
            const double frac = (level - values[i - 1]) / (values[i] - values[i - 1]);
            out.push_back(tau[i - 1] + frac * (tau[i] - tau[i - 1]));
        }
    }
    return out;
}

double crossing_frequency(const std::vector<double>& cross) {
    if (cross.size() < 3) {
        throw InsufficientDataError("fewer than three zero crossings");
    }
    return std::numbers::pi * static_cast<double>(cross.size() - 1) /
           (cross.back() - cross.front());
}

std::vector<double> closed_form_series(const SimulationSetup& setup,
                                       std::vector<double>& taus) {
    const FieldSpec spec = validate_field_spec(setup.field);
    if (!setup.is_closed()) {
        throw UnsupportedFieldError("closed forms describe the closed system from a pure start");
    }
    const double spacing = setup.integrator.sample_spacing;
    const auto n = static_cast<std::size_t>(std::floor(setup.t_max / spacing + 1e-9)) + 1;
    taus.resize(n);
    std::vector<double> p(n);
    for (std::size_t k = 0; k < n; ++k) {
        taus[k] = static_cast<double>(k) * spacing;
        p[k] = closed_form_p_down(spec, setup.delta, taus[k]);
    }
    return p;
}

}  // namespace

double time_average(std::span<const double> tau, std::span<const double> values, double t0,
                    double t1) {
    check_series(tau, values);
    const double slack = span_slack(tau);
    if (!(t1 > t0) || t0 < tau.front() - slack || t1 > tau.back() + slack) {
        throw RangeError("averaging window lies outside the series span");
    }
    if (tau.size() == 1) return values.front();
    double integral = 0.0;
    for (std::size_t i = 0; i + 1 < tau.size(); ++i) {
        const double a = std::max(t0, tau[i]);
        const double b = std::min(t1, tau[i + 1]);
        if (b <= a) continue;
        const double va = lerp_at(a, tau[i], tau[i + 1], values[i], values[i + 1]);
        const double vb = lerp_at(b, tau[i], tau[i + 1], values[i], values[i + 1]);
        integral += 0.5 * (b - a) * (va + vb);
    }
    const double lo = std::max(t0, tau.front());
    const double hi = std::min(t1, tau.back());
    return integral / (hi - lo);
}

double time_average(const Trajectory& traj, double t0, double t1, Channel channel) {
    // Complement keeps avg(p_down) + avg(p_up) == 1 exactly.
    if (channel == Channel::PUp) return 1.0 - time_average(traj, t0, t1, Channel::PDown);
    const auto tau = traj.taus();
    const auto v = traj.channel(channel);
    return time_average(tau, v, t0, t1);
}

HoldInterval hold_time(std::span<const double> tau, std::span<const double> values,
                       double threshold) {
    check_series(tau, values);
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw ParameterError("hold threshold must lie in (0, 1)");
    }
    HoldInterval best;
    const std::size_t n = values.size();
    std::size_t i = 0;
    while (i < n) {
        if (values[i] < threshold) {
            ++i;
            continue;
        }
        std::size_t j = i;
        while (j + 1 < n && values[j + 1] >= threshold) ++j;
        const double start =
            i == 0 ? tau[0]
                   : tau[i - 1] + (threshold - values[i - 1]) / (values[i] - values[i - 1]) *
                                      (tau[i] - tau[i - 1]);
        const double end =
            j + 1 == n ? tau[j]
                       : tau[j] + (values[j] - threshold) / (values[j] - values[j + 1]) *
                                      (tau[j + 1] - tau[j]);
        const double duration = end - start;
        if (!best.found || duration > best.duration) {
            best = {start, duration, true};
        }
        i = j + 1;
    }
    return best;
}

HoldInterval hold_time(const Trajectory& traj, double threshold, Channel channel) {
    const auto tau = traj.taus();
    const auto v = traj.channel(channel);
    return hold_time(tau, v, threshold);
}

AmplitudeResult oscillation_amplitude(std::span<const double> tau,
                                      std::span<const double> values, double t0,
                                      double expected_period) {
    check_series(tau, values);
    if (t0 < tau.front() - span_slack(tau) || t0 > tau.back()) {
        throw RangeError("amplitude window start lies outside the series span");
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < tau.size(); ++i) {
        if (tau[i] < t0) continue;
        lo = std::min(lo, values[i]);
        hi = std::max(hi, values[i]);
    }
    AmplitudeResult r;
    r.amplitude = hi - lo;
    r.window_too_short = (tau.back() - t0) < 2.0 * expected_period;
    return r;
}

double slowest_expected_period(const TrajectoryMetadata& meta) {
    const double delta = meta.tunnel.delta();
    const double intrinsic = 2.0 * std::numbers::pi / meta.tunnel.theta();
    switch (meta.field.kind()) {
        case FieldKind::F1:
        case FieldKind::F3:
            return intrinsic;
        case FieldKind::F2:
            return std::max(intrinsic, std::numbers::pi / meta.field.as<F2Field>().omega);
        case FieldKind::Const: {
            const double v = meta.field.as<ConstField>().value;
            const double r = std::sqrt(delta * delta + v * v);
            return r > 0.0 ? std::numbers::pi / r : std::numeric_limits<double>::infinity();
        }
        case FieldKind::Rsj: {
            const double w = meta.field.as<RsjField>().omega_tilde;
            return w > 0.0 ? std::max(intrinsic, 2.0 * std::numbers::pi / w) : intrinsic;
        }
    }
    return intrinsic;
}

AmplitudeResult oscillation_amplitude(const Trajectory& traj, double t0, Channel channel) {
    const auto tau = traj.taus();
    const auto v = traj.channel(channel);
    return oscillation_amplitude(tau, v, t0, slowest_expected_period(traj.metadata()));
}

double dominant_frequency(std::span<const double> tau, std::span<const double> values) {
    check_series(tau, values);
    if (tau.size() < 2) throw InsufficientDataError("series too short");
    const double mean = time_average(tau, values, tau.front(), tau.back());
    return crossing_frequency(crossings(tau, values, mean));
}

double dominant_frequency(const Trajectory& traj, Channel channel) {
    const auto tau = traj.taus();
    const auto v = traj.channel(channel);
    return dominant_frequency(tau, v);
}

BeatResult beat_frequency(std::span<const double> tau, std::span<const double> values) {
    check_series(tau, values);
    std::vector<double> peak_t;
    std::vector<double> peak_v;
    for (std::size_t i = 1; i + 1 < values.size(); ++i) {
        const double a = values[i - 1];
        const double b = values[i];
        const double c = values[i + 1];
        if (!(b > a && b >= c)) continue;
        // Vertex of the parabola through the three samples (uniform spacing).
        const double curv = a - 2.0 * b + c;
        double offset = 0.0;
        double value = b;
        if (curv < 0.0) {
            offset = 0.5 * (a - c) / curv;
            value = b - 0.25 * (a - c) * offset;
        }
        const double h = tau[i + 1] - tau[i];
        peak_t.push_back(tau[i] + offset * h);
        peak_v.push_back(value);
    }
    if (peak_v.size() < 3) {
        throw InsufficientDataError("too few local maxima for an envelope");
    }
    double mean = 0.0;
    for (double v : peak_v) mean += v;
    mean /= static_cast<double>(peak_v.size());

    BeatResult r;
    r.angular_frequency = crossing_frequency(crossings(peak_t, peak_v, mean));
    r.envelope_max = *std::max_element(peak_v.begin(), peak_v.end());
    r.envelope_min = *std::min_element(peak_v.begin(), peak_v.end());
    r.peaks = peak_v.size();
    return r;
}

BeatResult beat_frequency(const Trajectory& traj, Channel channel) {
    const auto tau = traj.taus();
    const auto v = traj.channel(channel);
    return beat_frequency(tau, v);
}

std::string_view to_string(ScanParam p) {
    switch (p) {
        case ScanParam::Delta: return "delta";
        case ScanParam::Omega: return "omega";
        case ScanParam::Phi: return "phi";
        case ScanParam::Eps: return "eps";
        case ScanParam::GammaPhi: return "gamma-phi";
        case ScanParam::GammaR: return "gamma-r";
    }
    return "?";
}

ScanParam parse_scan_param(std::string_view name) {
    for (auto p : {ScanParam::Delta, ScanParam::Omega, ScanParam::Phi, ScanParam::Eps,
                   ScanParam::GammaPhi, ScanParam::GammaR}) {
        if (to_string(p) == name) return p;
    }
    throw ParameterError("unknown scan parameter '" + std::string(name) + "'");
}

std::string_view to_string(MetricKind m) {
    switch (m) {
        case MetricKind::Average: return "avg";
        case MetricKind::HoldDuration: return "hold";
        case MetricKind::Amplitude: return "amp";
        case MetricKind::ExactAverage: return "avg-exact";
    }
    return "?";
}

MetricKind parse_metric(std::string_view name) {
    for (auto m : {MetricKind::Average, MetricKind::HoldDuration, MetricKind::Amplitude,
                   MetricKind::ExactAverage}) {
        if (to_string(m) == name) return m;
    }
    throw ParameterError("unknown metric '" + std::string(name) + "'");
}

double evaluate_metric(const MetricSpec& metric, const SimulationSetup& setup) {
    if (metric.kind == MetricKind::ExactAverage) {
        if (!setup.is_closed()) {
            throw UnsupportedFieldError("closed-form averages describe the closed system");
        }
        double p = 0.0;
        switch (setup.field.kind()) {
            case FieldKind::F1: p = avg_p1_down(setup.delta); break;
            case FieldKind::F3: p = avg_p3_down(setup.delta); break;
            default:
                throw UnsupportedFieldError("closed-form average exists for f1 and f3 only");
        }
        if (metric.channel == Channel::PDown) return p;
        if (metric.channel == Channel::PUp) return 1.0 - p;
        throw ParameterError("closed-form average is defined for p_down and p_up");
    }

    std::vector<double> tau;
    std::vector<double> values;
    double expected_period = 0.0;
    if (metric.closed_form) {
        if (metric.channel != Channel::PDown && metric.channel != Channel::PUp) {
            throw ParameterError("closed-form metrics are defined for p_down and p_up");
        }
        values = closed_form_series(setup, tau);
        if (metric.channel == Channel::PUp) {
            for (double& v : values) v = 1.0 - v;
        }
        expected_period = slowest_expected_period({validate_field_spec(setup.field),
                                                   TunnelParams(setup.delta), setup.dissipation,
                                                   setup.integrator, Propagator::Schrodinger});
    } else {
        const Trajectory traj = simulate(setup);
        tau = traj.taus();
        values = traj.channel(metric.channel);
        expected_period = slowest_expected_period(traj.metadata());
    }

    switch (metric.kind) {
        case MetricKind::Average:
            return time_average(tau, values, metric.window_start,
                                metric.window_end.value_or(tau.back()));
        case MetricKind::HoldDuration:
            return hold_time(tau, values, metric.threshold).duration;
        case MetricKind::Amplitude:
            return oscillation_amplitude(tau, values, metric.amplitude_start, expected_period)
                .amplitude;
        case MetricKind::ExactAverage:
            break;
    }
    throw ParameterError("unsupported metric");
}

SimulationSetup with_parameter(SimulationSetup setup, ScanParam param, double value) {
    const FieldKind kind = setup.field.kind();
    switch (param) {
        case ScanParam::Delta:
            setup.delta = value;
            break;
        case ScanParam::Omega:
        case ScanParam::Phi: {
            if (kind != FieldKind::F2) {
                throw ParameterError("omega and phi apply to the f2 family only");
            }
            F2Field f = setup.field.as<F2Field>();
            (param == ScanParam::Omega ? f.omega : f.phi) = value;
            setup.field = FieldSpec::f2(f.omega, f.phi);
            break;
        }
        case ScanParam::Eps:
            if (kind != FieldKind::Const) {
                throw ParameterError("eps applies to the const family only");
            }
            setup.field = FieldSpec::constant(value);
            break;
        case ScanParam::GammaPhi:
            setup.dissipation.gamma_phi = value;
            break;
        case ScanParam::GammaR:
            setup.dissipation.gamma_r = value;
            break;
    }
    return setup;
}

std::size_t ScanResult::succeeded() const noexcept {
    return static_cast<std::size_t>(std::count(status.begin(), status.end(), "ok"));
}

std::optional<std::size_t> ScanResult::argmax() const {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < metrics.size(); ++i) {
        if (status[i] != "ok") continue;
        if (!best || metrics[i] > metrics[*best]) best = i;
    }
    return best;
}

ScanResult scan(ScanParam param, std::span<const double> grid, const MetricSpec& metric,
                const SimulationSetup& base, unsigned workers) {
    if (grid.empty()) {
        throw ParameterError("scan grid is empty");
    }
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) {
            throw ParameterError("scan grid must be strictly increasing");
        }
    }
    // Fails early for a parameter that does not fit the field family.
    with_parameter(base, param, grid.front());

    ScanResult result;
    result.parameter = std::string(to_string(param));
    result.values.assign(grid.begin(), grid.end());
    result.metric = std::string(to_string(metric.kind));
    result.metrics.assign(grid.size(), std::numeric_limits<double>::quiet_NaN());
    result.status.assign(grid.size(), "ok");
    result.integrator = base.integrator;
    result.window_start = metric.window_start;
    result.window_end = metric.window_end.value_or(base.t_max);

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next.fetch_add(1); i < grid.size(); i = next.fetch_add(1)) {
            try {
                result.metrics[i] = evaluate_metric(metric, with_parameter(base, param, grid[i]));
            } catch (const std::exception& e) {
                result.status[i] = e.what();
            }
        }
    };

    unsigned n_workers = workers == 0 ? std::max(1u, std::thread::hardware_concurrency()) : workers;
    n_workers = static_cast<unsigned>(std::min<std::size_t>(n_workers, grid.size()));
    if (n_workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n_workers);
        for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(work);
    }
    return result;
}

double residual_report(const FieldSpec& field, const TunnelParams& tunnel, double t_max,
                       const IntegratorSettings& settings) {
    return residual_report(field, tunnel, t_max, settings, closed_form_p_down);
}

double residual_report(const FieldSpec& field, const TunnelParams& tunnel, double t_max,
                       const IntegratorSettings& settings, const ClosedForm& closed_form) {
    const FieldSpec spec = validate_field_spec(field);
    if (!has_closed_form(spec)) {
        throw UnsupportedFieldError("no closed-form probability for field '" +
                                    std::string(to_string(spec.kind())) + "'");
    }
    const Trajectory traj =
        propagate_schrodinger(spec, tunnel, QubitState::up(), t_max, settings);
    double worst = 0.0;
    for (const auto& s : traj.samples()) {
        worst = std::max(worst, std::abs(s.p_down - closed_form(spec, tunnel.delta(), s.tau)));
    }
    return worst;
}

}  // namespace fluxq
