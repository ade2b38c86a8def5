#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fluxq/propagator.hpp"
#include "fluxq/trajectory.hpp"

namespace fluxq {

// Metrics come in two flavours: over a Trajectory channel, and over raw
// (tau, value) series so closed-form curves can be analysed the same way.
// Series must be sorted by tau.

/// Trapezoidal mean of the piecewise-linear series over [t0, t1].
/// Throws RangeError when the window leaves the series span.
double time_average(std::span<const double> tau, std::span<const double> values, double t0,
                    double t1);
double time_average(const Trajectory& traj, double t0, double t1, Channel channel);

struct HoldInterval {
    double start = 0.0;
    double duration = 0.0;
    bool found = false;
};

/// Longest contiguous interval with value >= threshold (earliest on ties).
/// Interval ends are located by linear interpolation between samples.
HoldInterval hold_time(std::span<const double> tau, std::span<const double> values,
                       double threshold);
HoldInterval hold_time(const Trajectory& traj, double threshold, Channel channel);

struct AmplitudeResult {
    double amplitude = 0.0;
    /// Window shorter than two periods of the slowest expected oscillation.
    bool window_too_short = false;
};

/// sup - inf of the series over [t0, end].
AmplitudeResult oscillation_amplitude(std::span<const double> tau,
                                      std::span<const double> values, double t0,
                                      double expected_period);
AmplitudeResult oscillation_amplitude(const Trajectory& traj, double t0, Channel channel);

/// Period of the slowest oscillation the trajectory's field is expected to
/// produce (2 pi / theta, the drive period, or the Rabi period).
double slowest_expected_period(const TrajectoryMetadata& meta);

/// Angular frequency from the mean spacing of zero crossings of the
/// mean-subtracted series. Fewer than three crossings throws InsufficientDataError.
double dominant_frequency(std::span<const double> tau, std::span<const double> values);
double dominant_frequency(const Trajectory& traj, Channel channel);

struct BeatResult {
    double angular_frequency = 0.0;
    double envelope_max = 0.0;
    double envelope_min = 0.0;
    std::size_t peaks = 0;

    double peak_to_trough() const noexcept { return envelope_max - envelope_min; }
};

/// Slow modulation of a fast oscillation: local maxima (parabolically refined)
/// form the upper envelope, whose zero-crossing frequency is reported.
BeatResult beat_frequency(std::span<const double> tau, std::span<const double> values);
BeatResult beat_frequency(const Trajectory& traj, Channel channel);

enum class ScanParam { Delta, Omega, Phi, Eps, GammaPhi, GammaR };

std::string_view to_string(ScanParam p);
ScanParam parse_scan_param(std::string_view name);

enum class MetricKind {
    Average,       // time_average over the window
    HoldDuration,  // hold_time duration at the threshold
    Amplitude,     // oscillation_amplitude from amplitude_start
    ExactAverage,  // closed-form long-time average (F1, F3 only)
};

std::string_view to_string(MetricKind m);
MetricKind parse_metric(std::string_view name);

struct MetricSpec {
    MetricKind kind = MetricKind::Average;
    Channel channel = Channel::PDown;
    double window_start = 0.0;
    std::optional<double> window_end;  // defaults to t_max
    double threshold = 0.5;
    double amplitude_start = 0.0;
    /// Sample the closed-form probability instead of integrating.
    bool closed_form = false;
};

double evaluate_metric(const MetricSpec& metric, const SimulationSetup& setup);

/// Returns setup with one parameter replaced. Throws ParameterError when the
/// parameter does not apply to the setup's field family.
SimulationSetup with_parameter(SimulationSetup setup, ScanParam param, double value);

struct ScanResult {
    std::string parameter;
    std::vector<double> values;
    std::string metric;
    std::vector<double> metrics;
    std::vector<std::string> status;  // "ok" or a failure message per point

    IntegratorSettings integrator;
    double window_start = 0.0;
    double window_end = 0.0;

    std::size_t size() const noexcept { return values.size(); }
    std::size_t succeeded() const noexcept;
    /// Index of the largest successful metric value.
    std::optional<std::size_t> argmax() const;
};

/// Evaluates the metric at every grid point on up to `workers` threads
/// (0 = hardware concurrency). Output order follows the grid. Per-point failures
/// are recorded in `status` and do not abort the scan.
ScanResult scan(ScanParam param, std::span<const double> grid, const MetricSpec& metric,
                const SimulationSetup& base, unsigned workers = 0);

/// max_k |P_numeric(tau_k) - P_closed_form(tau_k)| over a Schrodinger run on
/// [0, t_max]. Families without a closed form throw UnsupportedFieldError.
double residual_report(const FieldSpec& field, const TunnelParams& tunnel, double t_max,
                       const IntegratorSettings& settings = {});

/// Closed-form P_down(spec, delta, tau); closed_form_p_down() by default.
using ClosedForm = std::function<double(const FieldSpec&, double, double)>;

/// Same as above against a caller-supplied closed form.
double residual_report(const FieldSpec& field, const TunnelParams& tunnel, double t_max,
                       const IntegratorSettings& settings, const ClosedForm& closed_form);

}  // namespace fluxq
