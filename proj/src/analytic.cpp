#include "fluxq/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fluxq/errors.hpp"

namespace fluxq {

namespace {

constexpr double kRangeTolerance = 1e-12;

double checked_probability(double p, const char* name, double tau, double delta) {
    if (!std::isfinite(p) || p < -kRangeTolerance || p > 1.0 + kRangeTolerance) {
        std::ostringstream os;
        os.precision(17);
        os << name << " out of [0, 1]: " << p << " at tau=" << tau << ", delta=" << delta;
        throw ConsistencyError(os.str());
    }
    return std::clamp(p, 0.0, 1.0);
}

void check_inputs(double tau, double delta) {
    if (!std::isfinite(tau)) {
        throw ParameterError("tau must be finite");
    }
    derive_theta(delta);
}

double sqr(double x) { return x * x; }

}  // namespace

double p1_down(double tau, double delta) {
    check_inputs(tau, delta);
    const double th = derive_theta(delta);
    const double th2 = th * th;
    const double t2 = tau * tau;
    const double x = th * tau;
    const double smooth = (th2 - 1.0) * (th2 + 4.0) / (2.0 * th2 * th2) * t2 / (1.0 + t2);
    // (th2 - 4)(1 - cos x) written as 2 (th2 - 4) sin^2(x / 2).
    const double bracket = 2.0 * (th2 - 4.0) * sqr(std::sin(0.5 * x)) -
                           th2 * t2 * std::cos(x) + 4.0 * x * std::sin(x);
    const double oscill =
        (th2 - 1.0) * (th2 - 4.0) / (2.0 * th2 * th2 * th2 * (1.0 + t2)) * bracket;
    return checked_probability(smooth + oscill, "p1_down", tau, delta);
}

double p1_down_monotone(double tau) {
    if (!std::isfinite(tau)) {
        throw ParameterError("tau must be finite");
    }
    const double t2 = tau * tau;
    return 0.75 * t2 / (1.0 + t2);
}

double p2_down(double tau, double delta, double omega, double phi) {
    check_inputs(tau, delta);
    if (!std::isfinite(omega) || omega <= 0.0 || omega >= 0.5) {
        throw ParameterError("b^2 must be positive: omega must lie in (0, 1/2)");
    }
    if (phi != 0.0) {
        throw ParameterError("closed-form p2_down is only available for phi = 0");
    }
    const double th = derive_theta(delta);
    const double th2 = th * th;
    const double d2 = delta * delta;
    const double b = std::sqrt(0.25 - omega * omega);
    const double wt = omega * tau;
    const double half = 0.5 * th * tau;

    const double rabi = 4.0 * d2 / th2 * sqr(std::sin(half));
    const double denom = 2.0 * b * std::cos(2.0 * wt) - 1.0;
    if (!(denom <= 2.0 * b - 1.0) || denom >= 0.0) {
        throw ConsistencyError("p2_down denominator must be negative; b is invalid");
    }
    const double q = b * (1.0 + 2.0 * b) * th2 * sqr(std::cos(half)) * sqr(std::sin(wt)) +
                     4.0 * omega * omega * (b - 2.0 * d2) * sqr(std::cos(wt)) *
                         sqr(std::sin(half));
    const double corr =
        4.0 * d2 * b *
        (q - omega * (b + b * b - d2) * th * std::sin(2.0 * wt) * std::sin(th * tau)) /
        (th2 * sqr(b * b + d2) * denom);
    return checked_probability(rabi - corr, "p2_down", tau, delta);
}

double p3_down(double tau, double delta) {
    check_inputs(tau, delta);
    const double th = derive_theta(delta);
    const double th2 = th * th;
    const double th4 = th2 * th2;
    const double th8 = th4 * th4;
    const double t2 = tau * tau;
    const double t4 = t2 * t2;
    const double q0 = t4 * t2 + 3.0 * t4 + 27.0 * t2 + 9.0;
    const double q1 = q1_coefficient(th);
    const double q2 = th4 * q0 + 144.0 * (1.0 + t2) - 12.0 * th2 * (5.0 * t4 + 6.0 * t2 + 9.0);
    const double q3 = 6.0 * th * tau * (th2 * (t4 + 2.0 * t2 + 9.0) - 12.0 * (1.0 + t2));

    const double smooth = 4.0 * (th2 - 1.0) * t2 / (th8 * q0) *
                          (144.0 * (1.0 + t2) + th4 * sqr(t2 + 9.0) -
                           24.0 * th2 * (5.0 * t2 + 9.0));
    const double oscill = (th2 - 1.0) * q1 / (th8 * th2 * q0) *
                          (q2 * sqr(std::sin(0.5 * tau * th)) + q3 * std::sin(tau * th));
    return checked_probability(smooth + oscill, "p3_down", tau, delta);
}

double rabi_p_down(double tau, double delta, double bias) {
    check_inputs(tau, delta);
    if (!std::isfinite(bias)) {
        throw ParameterError("bias must be finite");
    }
    const double r2 = delta * delta + bias * bias;
    if (r2 == 0.0) {
        return 0.0;
    }
    return checked_probability(delta * delta / r2 * sqr(std::sin(std::sqrt(r2) * tau)),
                               "rabi_p_down", tau, delta);
}

double avg_p1_down(double delta) {
    derive_theta(delta);
    const double d2 = delta * delta;
    return 2.0 * d2 * (5.0 + 4.0 * d2) / sqr(1.0 + 4.0 * d2);
}

double avg_p3_down(double delta) {
    derive_theta(delta);
    const double d2 = delta * delta;
    const double s = 1.0 + 4.0 * d2;
    return 2.0 * d2 * (13.0 - 8.0 * d2 + 16.0 * d2 * d2) / (s * s * s);
}

double q1_coefficient(double theta) {
    return (sqr(theta + 1.0) - 5.0) * (sqr(theta - 1.0) - 5.0);
}

CriticalSet critical_thetas(FieldKind field) {
    auto point = [](double theta) {
        return CriticalPoint{theta, 0.5 * std::sqrt(theta * theta - 1.0)};
    };
    switch (field) {
        case FieldKind::F1:
            return {field, {point(2.0)}};
        case FieldKind::F3: {
            const double r5 = std::sqrt(5.0);
            return {field, {point(r5 - 1.0), point(r5 + 1.0)}};
        }
        case FieldKind::F2:
            throw UnsupportedFieldError(
                "no critical tunnel frequency defined for the periodic family");
        default:
            throw UnsupportedFieldError("no critical tunnel frequency defined for field '" +
                                        std::string(to_string(field)) + "'");
    }
}

bool has_closed_form(const FieldSpec& spec) {
    switch (spec.kind()) {
        case FieldKind::F1:
        case FieldKind::F3:
        case FieldKind::Const:
            return true;
        case FieldKind::F2:
            return spec.as<F2Field>().phi == 0.0;
        case FieldKind::Rsj:
            return false;
    }
    return false;
}

double closed_form_p_down(const FieldSpec& spec, double delta, double tau) {
    if (!has_closed_form(spec)) {
        throw UnsupportedFieldError("no closed-form probability for field '" +
                                    std::string(to_string(spec.kind())) + "'");
    }
    switch (spec.kind()) {
        case FieldKind::F1: return p1_down(tau, delta);
        case FieldKind::F2: return p2_down(tau, delta, spec.as<F2Field>().omega, 0.0);
        case FieldKind::F3: return p3_down(tau, delta);
        case FieldKind::Const: return rabi_p_down(tau, delta, spec.as<ConstField>().value);
        default: break;
    }
    throw UnsupportedFieldError("no closed-form probability");
}

}  // namespace fluxq
