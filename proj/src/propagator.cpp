#include "fluxq/propagator.hpp"

#include <cmath>
#include <sstream>

#include "fluxq/detail/ode.hpp"
#include "fluxq/errors.hpp"
#include "fluxq/fields.hpp"

namespace fluxq {

namespace {

std::size_t sample_count(double t_max, double spacing) {
    if (!(t_max > 0.0) || !std::isfinite(t_max)) {
        throw ParameterError("t_max must be positive and finite");
    }
    return static_cast<std::size_t>(std::floor(t_max / spacing + 1e-9)) + 1;
}

}  // namespace

BlochState state_to_bloch(const QubitState& psi) {
    // rho_ij = psi_i conj(psi_j)
    const std::complex<double> coh = std::conj(psi.psi1) * psi.psi2;
    BlochState b;
    b.x = 0.0 - 2.0 * coh.real();
    b.y = 2.0 * coh.imag();
    b.z = std::norm(psi.psi2) - std::norm(psi.psi1);
    b.z_eq = b.z;
    return b;
}

std::pair<double, double> bloch_to_probabilities(const BlochState& b) noexcept {
    const double p_down = 0.5 * (1.0 - b.z);
    return {p_down, 1.0 - p_down};
}

std::string_view to_string(BlochInit init) {
    return init == BlochInit::Pure ? "pure" : "mixed";
}

BlochInit parse_bloch_init(std::string_view name) {
    if (name == "pure") return BlochInit::Pure;
    if (name == "mixed") return BlochInit::Mixed;
    throw ParameterError("bloch init must be 'pure' or 'mixed'");
}

Trajectory propagate_schrodinger(const FieldSpec& field, const TunnelParams& tunnel,
                                 const QubitState& psi0, double t_max,
                                 const IntegratorSettings& settings) {
    const FieldSpec spec = validate_field_spec(field);
    settings.validate();
    if (std::abs(psi0.norm_squared() - 1.0) > 1e-12) {
        throw ParameterError("initial state must be normalised");
    }
    const std::size_t n = sample_count(t_max, settings.sample_spacing);
    const double delta = tunnel.delta();

    // y = (Re psi1, Im psi1, Re psi2, Im psi2)
    auto rhs = [&spec, delta](double tau, const detail::Vec<4>& y) {
        const double eps = eval_field(spec, tau);
        // dpsi1 = i (eps psi1 + delta psi2), dpsi2 = i (delta psi1 - eps psi2)
        const double u1r = eps * y[0] + delta * y[2];
        const double u1i = eps * y[1] + delta * y[3];
        const double u2r = delta * y[0] - eps * y[2];
        const double u2i = delta * y[1] - eps * y[3];
        return detail::Vec<4>{-u1i, u1r, -u2i, u2r};
    };

    std::vector<TrajectorySample> samples;
    samples.reserve(n);
    auto observe = [&](std::size_t, double tau, const detail::Vec<4>& y) {
        const QubitState psi{{y[0], y[1]}, {y[2], y[3]}};
        const double norm_error = std::abs(psi.norm_squared() - 1.0);
        if (norm_error > kNormTolerance) {
            std::ostringstream os;
            os.precision(17);
            os << "norm drift " << norm_error << " exceeds " << kNormTolerance
               << " at tau=" << tau;
            throw IntegrationError(os.str());
        }
        const BlochState b = state_to_bloch(psi);
        const double p_down = psi.p_down();
        samples.push_back({tau, eval_field(spec, tau), p_down, 1.0 - p_down, b.x, b.y, b.z,
                           norm_error});
    };
    const detail::Vec<4> y0{psi0.psi1.real(), psi0.psi1.imag(), psi0.psi2.real(),
                            psi0.psi2.imag()};
    detail::integrate<4>(rhs, y0, n, settings, observe);

    return Trajectory(0.0, settings.sample_spacing, std::move(samples),
                      {spec, tunnel, DissipationParams{}, settings, Propagator::Schrodinger});
}

Trajectory propagate_bloch(const FieldSpec& field, const TunnelParams& tunnel,
                           const BlochState& bloch0, const DissipationParams& dissipation,
                           double t_max, const IntegratorSettings& settings) {
    const FieldSpec spec = validate_field_spec(field);
    settings.validate();
    dissipation.validate();
    if (!std::isfinite(bloch0.x) || !std::isfinite(bloch0.y) || !std::isfinite(bloch0.z) ||
        bloch0.length() > 1.0 + 1e-12) {
        throw ParameterError("initial Bloch vector must be finite with length <= 1");
    }
    if (!std::isfinite(bloch0.z_eq) || std::abs(bloch0.z_eq) > 1.0) {
        throw ParameterError("z_eq must lie in [-1, 1]");
    }
    const std::size_t n = sample_count(t_max, settings.sample_spacing);
    const double delta = tunnel.delta();
    const double g_phi = dissipation.gamma_phi;
    const double g_r = dissipation.gamma_r;
    const double z_eq = bloch0.z_eq;

    auto rhs = [&spec, delta, g_phi, g_r, z_eq](double tau, const detail::Vec<3>& s) {
        const double eps = eval_field(spec, tau);
        return detail::Vec<3>{-2.0 * eps * s[1] - g_phi * s[0],
                              -2.0 * delta * s[2] + 2.0 * eps * s[0] - g_phi * s[1],
                              2.0 * delta * s[1] - g_r * (s[2] - z_eq)};
    };

    std::vector<TrajectorySample> samples;
    samples.reserve(n);
    auto observe = [&](std::size_t, double tau, const detail::Vec<3>& s) {
        const double len = std::sqrt(s[0] * s[0] + s[1] * s[1] + s[2] * s[2]);
        if (len > 1.0 + kBlochTolerance) {
            std::ostringstream os;
            os.precision(17);
            os << "Bloch vector length " << len << " exceeds 1 at tau=" << tau;
            throw ConsistencyError(os.str());
        }
        const auto [p_down, p_up] = bloch_to_probabilities({s[0], s[1], s[2], z_eq});
        samples.push_back({tau, eval_field(spec, tau), p_down, p_up, s[0], s[1], s[2],
                           std::max(0.0, len - 1.0)});
    };
    detail::integrate<3>(rhs, detail::Vec<3>{bloch0.x, bloch0.y, bloch0.z}, n, settings,
                         observe);

    return Trajectory(0.0, settings.sample_spacing, std::move(samples),
                      {spec, tunnel, dissipation, settings, Propagator::Bloch});
}

Trajectory simulate(const SimulationSetup& setup) {
    const TunnelParams tunnel(setup.delta);
    if (setup.is_closed()) {
        return propagate_schrodinger(setup.field, tunnel, QubitState::up(), setup.t_max,
                                     setup.integrator);
    }
    BlochState b0 = setup.init == BlochInit::Pure ? state_to_bloch(QubitState::up())
                                                  : BlochState::mixed();
    if (setup.z_eq) b0.z_eq = *setup.z_eq;
    return propagate_bloch(setup.field, tunnel, b0, setup.dissipation, setup.t_max,
                           setup.integrator);
}

}  // namespace fluxq
