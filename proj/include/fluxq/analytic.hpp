#pragma once

#include <vector>

#include "fluxq/types.hpp"

// Closed-form clockwise-current probabilities P_down(tau) for the exactly
// solvable fields, all with the initial condition psi(0) = (0, 1)^T.

namespace fluxq {

/// Probability under F1. Equals 0 at tau = 0 and, at theta = 2, reduces to
/// (3/4) tau^2 / (1 + tau^2).
double p1_down(double tau, double delta);

/// The critical (theta = 2) form of p1_down.
double p1_down_monotone(double tau);

/// Probability under F2 with phase phi. The closed form exists for phi = 0 only;
/// any other phase throws ParameterError.
double p2_down(double tau, double delta, double omega, double phi = 0.0);

double p3_down(double tau, double delta);

/// Rabi probability under a constant bias:
///   delta^2 / (delta^2 + bias^2) * sin^2(sqrt(delta^2 + bias^2) tau).
double rabi_p_down(double tau, double delta, double bias);

/// Long-time average of p1_down: 2 delta^2 (5 + 4 delta^2) / (1 + 4 delta^2)^2.
double avg_p1_down(double delta);

/// Long-time average of p3_down.
///
/// The commonly quoted form 2 d^2 (13 - 8 d^2 + 16 d^4) / (1 + 4 d^2)^2 exceeds 1
/// for d > 1 and peaks nowhere near 0.91 at d = 0.34. Averaging p3_down term by
/// term gives (theta^2 - 1)(theta^4 - 4 theta^2 + 16) / (2 theta^6), which is the
/// same numerator over (1 + 4 d^2)^3; that is what is implemented.
double avg_p3_down(double delta);

/// Q1(theta) = [(theta + 1)^2 - 5][(theta - 1)^2 - 5] = theta^4 - 12 theta^2 + 16.
double q1_coefficient(double theta);

struct CriticalPoint {
    double theta;
    double delta;
};

struct CriticalSet {
    FieldKind field;
    std::vector<CriticalPoint> points;
};

/// Exact critical values: theta = 2 for F1, theta = sqrt(5) -+ 1 for F3.
/// Other families throw UnsupportedFieldError.
CriticalSet critical_thetas(FieldKind field);

/// True when closed_form_p_down() supports the spec (F1, F2 with phi = 0, F3, const).
bool has_closed_form(const FieldSpec& spec);

/// Dispatches to the closed form matching the spec's family.
double closed_form_p_down(const FieldSpec& spec, double delta, double tau);

}  // namespace fluxq
