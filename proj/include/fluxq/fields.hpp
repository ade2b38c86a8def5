#pragma once

#include <optional>

#include "fluxq/types.hpp"

namespace fluxq {

/// Evaluates eps(tau) for a validated field. Throws ContractViolation for an
/// unvalidated spec and ParameterError for non-finite tau.
double eval_field(const FieldSpec& spec, double tau);

/// Resistively shunted junction supercurrent
///   I_s(t) = I - (I^2 - I_c^2) / (I + I_c cos(omega_tilde t)).
double rsj_current(double t, double current, double critical_current, double omega_tilde);

/// omega_tilde = factor * R * sqrt(I^2 - I_c^2), where factor is 2e/hbar in the
/// caller's unit system.
double rsj_omega_tilde(double current, double critical_current, double resistance,
                       double flux_quantum_factor);

/// Result of identifying offset + scale * I_s(tau) with
/// A + B / (C + D cos(nu tau)) and, where possible, with the F2 family.
struct RsjMapping {
    FieldSpec spec;  // validated RSJ spec; eval_field reproduces the affine map

    double constant = 0.0;          // A
    double numerator = 0.0;         // B
    double denominator_const = 0.0; // C
    double denominator_cos = 0.0;   // D
    double frequency = 0.0;         // nu

    /// A = -1/2 and the coefficients admit b, omega with b^2 + omega^2 = 1/4.
    bool f2_shape = false;
    /// f2_shape and nu == 2 omega, so the field is literally F2(omega, phi = pi).
    bool exact_f2 = false;
    /// F2 parameters of the matched shape; the RSJ field equals
    /// F2(time_scale * tau) when f2_shape holds.
    std::optional<F2Field> f2_equivalent;
    double time_scale = 0.0;
};

RsjMapping rsj_to_field(double current, double critical_current, double omega_tilde,
                        double offset, double scale);

/// Phase for which F2 tends to F1 as omega -> 0:
///   phi = arctan(omega) - arctan(omega / b) / 2.
double f2_limit_phase(double omega);

}  // namespace fluxq
