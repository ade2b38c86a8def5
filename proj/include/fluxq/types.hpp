#pragma once

#include <complex>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace fluxq {

/// Dimensionless tunnel frequency delta (= Delta / (2 eps0)) together with the
/// derived frequency theta = sqrt(1 + 4 delta^2). Only delta is stored.
class TunnelParams {
public:
    explicit TunnelParams(double delta);

    double delta() const noexcept { return delta_; }
    double theta() const noexcept;

    friend bool operator==(const TunnelParams&, const TunnelParams&) = default;

private:
    double delta_;
};

/// theta = sqrt(1 + 4 delta^2). Throws ParameterError for negative or non-finite delta.
double derive_theta(double delta);

/// Converts the raw (t, eps0, Delta) parametrisation to the dimensionless one:
/// tau = 2 eps0 t and delta = Delta / (2 eps0).
struct RawTimeScale {
    double eps0;

    double to_tau(double t) const;
    TunnelParams to_tunnel(double raw_delta) const;
};

enum class FieldKind { F1, F2, F3, Const, Rsj };

std::string_view to_string(FieldKind kind);
FieldKind parse_field_kind(std::string_view name);

/// eps(tau) = -1/2 + 2 / (1 + tau^2)
struct F1Field {
    friend bool operator==(const F1Field&, const F1Field&) = default;
};

/// eps(tau) = -1/2 - 2 omega^2 / (b cos(2 omega tau + phi) - 1/2), b = sqrt(1/4 - omega^2).
struct F2Field {
    double omega = 0.0;
    double phi = 0.0;
    double b = 0.0;  // derived during validation

    friend bool operator==(const F2Field&, const F2Field&) = default;
};

/// eps(tau) = -1/2 + 6 (tau^4 + 6 tau^2 - 3) / (tau^6 + 3 tau^4 + 27 tau^2 + 9)
struct F3Field {
    friend bool operator==(const F3Field&, const F3Field&) = default;
};

struct ConstField {
    double value = 0.0;

    friend bool operator==(const ConstField&, const ConstField&) = default;
};

/// Bias driven by the resistively shunted junction current through the affine
/// map eps(tau) = offset + scale * I_s(tau).
struct RsjField {
    double current = 0.0;           // I
    double critical_current = 0.0;  // I_c
    double omega_tilde = 0.0;
    double offset = 0.0;
    double scale = 1.0;

    friend bool operator==(const RsjField&, const RsjField&) = default;
};

using FieldParams = std::variant<F1Field, F2Field, F3Field, ConstField, RsjField>;

/// Tagged selection of a control-field family. Instances built by the factory
/// functions are unvalidated; pass them through validate_field_spec() before
/// evaluation.
class FieldSpec {
public:
    static FieldSpec f1();
    static FieldSpec f2(double omega, double phi = 0.0);
    static FieldSpec f3();
    static FieldSpec constant(double value);
    static FieldSpec rsj(double current, double critical_current, double omega_tilde,
                         double offset, double scale);

    FieldKind kind() const noexcept;
    const FieldParams& params() const noexcept { return params_; }
    bool is_validated() const noexcept { return validated_; }

    template <class T>
    const T& as() const {
        return std::get<T>(params_);
    }

    friend bool operator==(const FieldSpec&, const FieldSpec&) = default;

private:
    explicit FieldSpec(FieldParams params) : params_(std::move(params)) {}

    FieldParams params_;
    bool validated_ = false;

    friend FieldSpec validate_field_spec(const FieldSpec& spec);
};

/// Checks the family constraints and populates derived quantities (b for F2).
/// Idempotent. Throws ParameterError naming the violated constraint.
FieldSpec validate_field_spec(const FieldSpec& spec);

struct QubitState {
    std::complex<double> psi1;
    std::complex<double> psi2;

    double p_down() const noexcept { return std::norm(psi1); }
    double p_up() const noexcept { return std::norm(psi2); }
    double norm_squared() const noexcept { return std::norm(psi1) + std::norm(psi2); }

    /// psi = (0, 1)^T, i.e. P_down(0) = 0.
    static QubitState up() noexcept { return {{0.0, 0.0}, {1.0, 0.0}}; }
    static QubitState down() noexcept { return {{1.0, 0.0}, {0.0, 0.0}}; }
};

/// Bloch vector with the relaxation target z_eq. Probabilities follow
/// P_down = (1 - z) / 2.
struct BlochState {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double z_eq = 0.0;

    double length() const noexcept;
    static BlochState mixed() noexcept { return {}; }
};

struct DissipationParams {
    double gamma_phi = 0.0;
    double gamma_r = 0.0;

    void validate() const;
    bool is_zero() const noexcept { return gamma_phi == 0.0 && gamma_r == 0.0; }

    friend bool operator==(const DissipationParams&, const DissipationParams&) = default;
};

}  // namespace fluxq
