#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "fluxq/analysis.hpp"
#include "fluxq/analytic.hpp"
#include "fluxq/errors.hpp"
#include "support.hpp"

using namespace fluxq;
using fluxq::testing::Gen;
using fluxq::testing::kCritDelta;
using fluxq::testing::linspace;

namespace {

std::vector<double> map_series(const std::vector<double>& t, double (*f)(double)) {
    std::vector<double> v(t.size());
    std::transform(t.begin(), t.end(), v.begin(), f);
    return v;
}

}  // namespace

TEST_CASE("time_average of simple series") {
    const auto t = linspace(0.0, 10.0, 101);
    std::vector<double> lin(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) lin[i] = 3.0 * t[i] + 1.0;
    CHECK(time_average(t, lin, 0.0, 10.0) == doctest::Approx(16.0));
    CHECK(time_average(t, lin, 2.05, 4.05) == doctest::Approx(3.0 * 3.05 + 1.0));
    CHECK_THROWS_AS(time_average(t, lin, -1.0, 5.0), RangeError);
    CHECK_THROWS_AS(time_average(t, lin, 0.0, 11.0), RangeError);
    CHECK_THROWS_AS(time_average(t, lin, 5.0, 5.0), RangeError);
}

TEST_CASE("property: averages of complementary probabilities sum to one exactly") {
    Gen g(51);
    for (int i = 0; i < 5; ++i) {
        SimulationSetup s;
        s.delta = g.uniform(0.1, 1.5);
        s.t_max = 20.0;
        if (i % 2) s.dissipation = {0.1, 0.05};
        const Trajectory traj = simulate(s);
        for (int k = 0; k < 20; ++k) {
            const double a = g.uniform(0.0, 19.0);
            const double b = g.uniform(a + 0.01, 20.0);
            CHECK(time_average(traj, a, b, Channel::PDown) +
                      time_average(traj, a, b, Channel::PUp) ==
                  1.0);
        }
    }
}

TEST_CASE("hold_time picks the longest interval, earliest on ties") {
    const std::vector<double> t{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    const std::vector<double> v{0, 1, 1, 0, 0, 1, 1, 0, 0, 0};
    const HoldInterval h = hold_time(t, v, 0.5);
    REQUIRE(h.found);
    CHECK(h.start == doctest::Approx(0.5));
    CHECK(h.duration == doctest::Approx(2.0));

    const std::vector<double> w{0, 1, 0, 0, 1, 1, 1, 0, 0, 0};
    const HoldInterval longer = hold_time(t, w, 0.5);
    CHECK(longer.start == doctest::Approx(3.5));
    CHECK(longer.duration == doctest::Approx(3.0));

    const std::vector<double> never(10, 0.1);
    CHECK_FALSE(hold_time(t, never, 0.5).found);
    const std::vector<double> always(10, 0.9);
    CHECK(hold_time(t, always, 0.5).duration == doctest::Approx(9.0));
    CHECK_THROWS_AS(hold_time(t, v, 1.5), ParameterError);
}

TEST_CASE("hold_time is stable under denser resampling") {
    for (double w : {0.105, 0.205, 0.314}) {
        SimulationSetup s;
        s.field = FieldSpec::f2(w);
        s.delta = kCritDelta + 0.1;
        s.t_max = 60.0;
        const Trajectory coarse = simulate(s);
        s.integrator.sample_spacing = 0.005;
        const Trajectory fine = simulate(s);
        const double dc = hold_time(coarse, 0.5, Channel::PDown).duration;
        const double df = hold_time(fine, 0.5, Channel::PDown).duration;
        CAPTURE(w);
        CHECK(std::abs(dc - df) < 2.0 * 0.01);
    }
}

TEST_CASE("oscillation amplitude and window check") {
    const auto t = linspace(0.0, 20.0, 2001);
    const auto v = map_series(t, [](double x) { return 0.3 * std::sin(2.0 * x); });
    const AmplitudeResult a = oscillation_amplitude(t, v, 5.0, std::numbers::pi);
    CHECK(a.amplitude == doctest::Approx(0.6).epsilon(1e-4));
    CHECK_FALSE(a.window_too_short);
    CHECK(oscillation_amplitude(t, v, 18.0, std::numbers::pi).window_too_short);
    CHECK_THROWS_AS(oscillation_amplitude(t, v, 25.0, 1.0), RangeError);
}

TEST_CASE("dominant frequency from zero crossings") {
    Gen g(52);
    for (int i = 0; i < 20; ++i) {
        const double w = g.uniform(0.5, 5.0);
        const auto t = linspace(0.0, 100.0, 20001);
        std::vector<double> v(t.size());
        for (std::size_t k = 0; k < t.size(); ++k) v[k] = std::sin(w * t[k] + 0.3);
        CHECK(dominant_frequency(t, v) == doctest::Approx(w).epsilon(5e-3));
    }
    const std::vector<double> t{0, 1, 2};
    const std::vector<double> v{0, 1, 2};
    CHECK_THROWS_AS(dominant_frequency(t, v), InsufficientDataError);
}

TEST_CASE("Rabi oscillations at constant bias") {
    for (double d : {0.1, 0.5}) {
        SimulationSetup s;
        s.field = FieldSpec::constant(0.5);
        s.delta = d;
        s.t_max = 200.0;
        const double expected = 2.0 * std::sqrt(d * d + 0.25);
        CHECK(dominant_frequency(simulate(s), Channel::PDown) ==
              doctest::Approx(expected).epsilon(0.01));
    }
}

TEST_CASE("beat frequency of a modulated oscillation") {
    const double slow = 0.05;
    const auto t = linspace(0.0, 500.0, 50001);
    std::vector<double> v(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) {
        v[k] = 0.5 * (1.0 + std::cos(slow * t[k])) * std::pow(std::sin(1.3 * t[k]), 2);
    }
    const BeatResult b = beat_frequency(t, v);
    CHECK(b.angular_frequency == doctest::Approx(slow).epsilon(0.02));
    CHECK(b.envelope_max == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(b.peak_to_trough() > 0.95);
    const std::vector<double> flat(10, 0.3);
    CHECK_THROWS_AS(beat_frequency(linspace(0, 1, 10), flat), InsufficientDataError);
}

TEST_CASE("residual_report examples") {
    CHECK(residual_report(FieldSpec::f1(), TunnelParams(kCritDelta), 50.0) <= 1e-6);
    CHECK(residual_report(FieldSpec::f2(0.205), TunnelParams(1.0), 50.0) <= 1e-6);
    CHECK_THROWS_AS(residual_report(FieldSpec::rsj(2, 1, 1, 0, 1), TunnelParams(1.0), 5.0),
                    UnsupportedFieldError);
    const ClosedForm shifted = [](const FieldSpec& f, double d, double t) {
        return closed_form_p_down(f, d, t) + 1e-3;
    };
    CHECK(residual_report(FieldSpec::f1(), TunnelParams(1.0), 5.0, {}, shifted) ==
          doctest::Approx(1e-3).epsilon(1e-3));
}

TEST_CASE("metric evaluation") {
    SimulationSetup s;
    s.delta = 0.6;
    s.t_max = 100.0;
    MetricSpec exact{.kind = MetricKind::ExactAverage};
    CHECK(evaluate_metric(exact, s) == avg_p1_down(0.6));
    MetricSpec numeric{.kind = MetricKind::Average};
    MetricSpec sampled{.kind = MetricKind::Average, .closed_form = true};
    CHECK(evaluate_metric(numeric, s) == doctest::Approx(evaluate_metric(sampled, s)).epsilon(1e-8));
    MetricSpec hold{.kind = MetricKind::HoldDuration, .threshold = 0.5};
    CHECK(evaluate_metric(hold, s) > 0.0);

    s.field = FieldSpec::f2(0.2);
    CHECK_THROWS_AS(evaluate_metric(exact, s), UnsupportedFieldError);
    s.field = FieldSpec::f1();
    s.dissipation = {0.1, 0.1};
    CHECK_THROWS_AS(evaluate_metric(exact, s), UnsupportedFieldError);
}

TEST_CASE("with_parameter enforces applicability") {
    SimulationSetup s;
    CHECK_THROWS_AS(with_parameter(s, ScanParam::Omega, 0.2), ParameterError);
    CHECK_THROWS_AS(with_parameter(s, ScanParam::Eps, 0.2), ParameterError);
    CHECK(with_parameter(s, ScanParam::Delta, 0.3).delta == 0.3);
    s.field = FieldSpec::f2(0.1, 0.2);
    const auto o = with_parameter(s, ScanParam::Omega, 0.3);
    CHECK(o.field.as<F2Field>().omega == 0.3);
    CHECK(o.field.as<F2Field>().phi == 0.2);
    CHECK(with_parameter(s, ScanParam::GammaR, 0.4).dissipation.gamma_r == 0.4);
    for (auto p : {ScanParam::Delta, ScanParam::Omega, ScanParam::Phi, ScanParam::Eps,
                   ScanParam::GammaPhi, ScanParam::GammaR}) {
        CHECK(parse_scan_param(to_string(p)) == p);
    }
    for (auto m : {MetricKind::Average, MetricKind::HoldDuration, MetricKind::Amplitude,
                   MetricKind::ExactAverage}) {
        CHECK(parse_metric(to_string(m)) == m);
    }
}

TEST_CASE("scan output does not depend on parallelism") {
    SimulationSetup base;
    base.field = FieldSpec::f2(0.105);
    base.t_max = 30.0;
    const auto grid = linspace(0.2, 1.4, 13);
    const MetricSpec m{.kind = MetricKind::HoldDuration};
    const ScanResult serial = scan(ScanParam::Delta, grid, m, base, 1);
    for (unsigned w : {2u, 4u, 0u}) {
        const ScanResult par = scan(ScanParam::Delta, grid, m, base, w);
        CHECK(par.values == serial.values);
        CHECK(par.status == serial.status);
        REQUIRE(par.metrics.size() == serial.metrics.size());
        for (std::size_t i = 0; i < grid.size(); ++i) CHECK(par.metrics[i] == serial.metrics[i]);
    }
    CHECK(serial.succeeded() == grid.size());
}

TEST_CASE("scan records per-point failures") {
    SimulationSetup base;
    base.field = FieldSpec::f2(0.1);
    base.t_max = 5.0;
    const std::vector<double> grid{0.2, 0.4, 0.6};
    const ScanResult r = scan(ScanParam::Omega, grid, {}, base, 2);
    CHECK(r.status[0] == "ok");
    CHECK(r.status[1] == "ok");
    CHECK(r.status[2] != "ok");
    CHECK(std::isnan(r.metrics[2]));
    CHECK(r.succeeded() == 2);
    CHECK(r.argmax().has_value());
    const std::vector<double> bad{0.3, 0.2};
    CHECK_THROWS_AS(scan(ScanParam::Omega, bad, {}, base), ParameterError);
    CHECK_THROWS_AS(scan(ScanParam::Eps, grid, {}, base), ParameterError);
}
