#include "fluxq/types.hpp"

#include <cmath>
#include <sstream>

#include "fluxq/errors.hpp"

namespace fluxq {

namespace {

void require_finite(double value, const char* name) {
    if (!std::isfinite(value)) {
        std::ostringstream os;
        os << name << " must be finite (got " << value << ")";
        throw ParameterError(os.str());
    }
}

}  // namespace

double derive_theta(double delta) {
    require_finite(delta, "delta");
    if (delta < 0.0) {
        throw ParameterError("delta must be nonnegative");
    }
    return std::sqrt(1.0 + 4.0 * delta * delta);
}

TunnelParams::TunnelParams(double delta) : delta_(delta) {
    derive_theta(delta);
}

double TunnelParams::theta() const noexcept {
    return std::sqrt(1.0 + 4.0 * delta_ * delta_);
}

double RawTimeScale::to_tau(double t) const {
    require_finite(eps0, "eps0");
    if (eps0 <= 0.0) {
        throw ParameterError("eps0 must be positive");
    }
    return 2.0 * eps0 * t;
}

TunnelParams RawTimeScale::to_tunnel(double raw_delta) const {
    require_finite(eps0, "eps0");
    if (eps0 <= 0.0) {
        throw ParameterError("eps0 must be positive");
    }
    return TunnelParams(raw_delta / (2.0 * eps0));
}

std::string_view to_string(FieldKind kind) {
    switch (kind) {
        case FieldKind::F1: return "f1";
        case FieldKind::F2: return "f2";
        case FieldKind::F3: return "f3";
        case FieldKind::Const: return "const";
        case FieldKind::Rsj: return "rsj";
    }
    return "?";
}

FieldKind parse_field_kind(std::string_view name) {
    if (name == "f1") return FieldKind::F1;
    if (name == "f2") return FieldKind::F2;
    if (name == "f3") return FieldKind::F3;
    if (name == "const") return FieldKind::Const;
    if (name == "rsj") return FieldKind::Rsj;
    throw ParameterError("unknown field family '" + std::string(name) + "'");
}

FieldSpec FieldSpec::f1() { return FieldSpec(F1Field{}); }

FieldSpec FieldSpec::f2(double omega, double phi) {
    return FieldSpec(F2Field{omega, phi, 0.0});
}

FieldSpec FieldSpec::f3() { return FieldSpec(F3Field{}); }

FieldSpec FieldSpec::constant(double value) { return FieldSpec(ConstField{value}); }

FieldSpec FieldSpec::rsj(double current, double critical_current, double omega_tilde,
                         double offset, double scale) {
    return FieldSpec(RsjField{current, critical_current, omega_tilde, offset, scale});
}

FieldKind FieldSpec::kind() const noexcept {
    return static_cast<FieldKind>(params_.index());
}

FieldSpec validate_field_spec(const FieldSpec& spec) {
    FieldSpec out = spec;
    if (auto* f2 = std::get_if<F2Field>(&out.params_)) {
        require_finite(f2->omega, "omega");
        require_finite(f2->phi, "phi");
        if (f2->omega <= 0.0 || f2->omega >= 0.5) {
            throw ParameterError("b^2 must be positive: omega must lie in (0, 1/2)");
        }
        f2->b = std::sqrt(0.25 - f2->omega * f2->omega);
    } else if (auto* c = std::get_if<ConstField>(&out.params_)) {
        require_finite(c->value, "eps");
    } else if (auto* r = std::get_if<RsjField>(&out.params_)) {
        require_finite(r->current, "I");
        require_finite(r->critical_current, "I_c");
        require_finite(r->omega_tilde, "omega_tilde");
        require_finite(r->offset, "offset");
        require_finite(r->scale, "scale");
        if (r->critical_current < 0.0) {
            throw ParameterError("I_c must be nonnegative");
        }
        if (r->current <= r->critical_current) {
            throw ParameterError("I must exceed I_c");
        }
        if (r->omega_tilde < 0.0) {
            throw ParameterError("omega_tilde must be nonnegative");
        }
    }
    out.validated_ = true;
    return out;
}

double BlochState::length() const noexcept {
    return std::sqrt(x * x + y * y + z * z);
}

void DissipationParams::validate() const {
    require_finite(gamma_phi, "gamma_phi");
    require_finite(gamma_r, "gamma_r");
    if (gamma_phi < 0.0 || gamma_r < 0.0) {
        throw ParameterError("dissipation rates must be nonnegative");
    }
}

}  // namespace fluxq
