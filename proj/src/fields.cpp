#include "fluxq/fields.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fluxq/errors.hpp"

namespace fluxq {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

void check_rsj(double current, double critical_current) {
    if (!std::isfinite(current) || !std::isfinite(critical_current)) {
        throw ParameterError("RSJ currents must be finite");
    }
    if (critical_current < 0.0) {
        throw ParameterError("I_c must be nonnegative");
    }
    if (current <= critical_current) {
        throw ParameterError("I must exceed I_c");
    }
}

bool close(double a, double b, double tol = 1e-12) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

double eval_field(const FieldSpec& spec, double tau) {
    if (!spec.is_validated()) {
        throw ContractViolation("eval_field requires a validated FieldSpec");
    }
    if (!std::isfinite(tau)) {
        throw ParameterError("tau must be finite");
    }
    return std::visit(
        overloaded{
            [&](const F1Field&) { return -0.5 + 2.0 / (1.0 + tau * tau); },
            [&](const F2Field& f) {
                // |b cos(.) - 1/2| >= 1/2 - b > 0
                const double w = f.omega;
                return -0.5 - 2.0 * w * w / (f.b * std::cos(2.0 * w * tau + f.phi) - 0.5);
            },
            [&](const F3Field&) {
                const double t2 = tau * tau;
                const double t4 = t2 * t2;
                const double q0 = t4 * t2 + 3.0 * t4 + 27.0 * t2 + 9.0;
                return -0.5 + 6.0 * (t4 + 6.0 * t2 - 3.0) / q0;
            },
            [&](const ConstField& c) { return c.value; },
            [&](const RsjField& r) {
                return r.offset +
                       r.scale * rsj_current(tau, r.current, r.critical_current, r.omega_tilde);
            },
        },
        spec.params());
}

double rsj_current(double t, double current, double critical_current, double omega_tilde) {
    check_rsj(current, critical_current);
    if (!std::isfinite(t) || !std::isfinite(omega_tilde) || omega_tilde < 0.0) {
        throw ParameterError("t and omega_tilde must be finite, omega_tilde >= 0");
    }
    // I - (I^2 - Ic^2)/(I + Ic cos) rearranged; exact at t = 0 and for Ic = 0.
    const double c = std::cos(omega_tilde * t);
    return critical_current * ((current * c + critical_current) / (current + critical_current * c));
}

double rsj_omega_tilde(double current, double critical_current, double resistance,
                       double flux_quantum_factor) {
    check_rsj(current, critical_current);
    if (!(resistance > 0.0) || !std::isfinite(resistance)) {
        throw ParameterError("R must be positive");
    }
    if (!std::isfinite(flux_quantum_factor)) {
        throw ParameterError("flux quantum factor must be finite");
    }
    return flux_quantum_factor * resistance *
           std::sqrt((current - critical_current) * (current + critical_current));
}

RsjMapping rsj_to_field(double current, double critical_current, double omega_tilde,
                        double offset, double scale) {
    if (scale == 0.0) {
        throw ParameterError("scale must be nonzero; use the const family for a constant bias");
    }
    RsjMapping m{.spec = validate_field_spec(
                     FieldSpec::rsj(current, critical_current, omega_tilde, offset, scale)),
                 .f2_equivalent = std::nullopt};

    m.constant = offset + scale * current;
    m.numerator = -scale * (current * current - critical_current * critical_current);
    m.denominator_const = current;
    m.denominator_cos = critical_current;
    m.frequency = omega_tilde;

    // A + B/(C + D cos x) = -1/2 - 2 w^2 / (b cos(x + pi) - 1/2) with
    // b = D/(2C) and w^2 = B/(4C).
    const double b = critical_current / (2.0 * current);
    const double w2 = m.numerator / (4.0 * current);
    m.f2_shape = close(m.constant, -0.5) && b > 0.0 && w2 > 0.0 &&
                 close(b * b + w2, 0.25);
    if (m.f2_shape) {
        const double w = std::sqrt(w2);
        m.f2_equivalent = F2Field{w, std::numbers::pi, b};
        m.time_scale = omega_tilde / (2.0 * w);
        m.exact_f2 = close(m.time_scale, 1.0);
    }
    return m;
}

double f2_limit_phase(double omega) {
    if (!std::isfinite(omega) || omega <= 0.0 || omega >= 0.5) {
        throw ParameterError("omega must lie in (0, 1/2)");
    }
    const double b = std::sqrt(0.25 - omega * omega);
    return std::atan(omega) - 0.5 * std::atan(omega / b);
}

}  // namespace fluxq
