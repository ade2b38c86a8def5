#pragma once

#include <optional>
#include <utility>

#include "fluxq/trajectory.hpp"
#include "fluxq/types.hpp"

namespace fluxq {

/// Samples whose | |psi|^2 - 1 | exceeds this abort the Schrodinger run.
inline constexpr double kNormTolerance = 1e-8;
/// Allowed excess of the Bloch vector length over 1 for a physical start.
inline constexpr double kBlochTolerance = 1e-6;

/// Integrates i dPsi/dtau = H Psi with H = -delta sigma_x - eps(tau) sigma_z on
/// [0, t_max]. The state is never renormalised; norm drift is recorded per
/// sample and exceeding kNormTolerance throws IntegrationError naming tau.
Trajectory propagate_schrodinger(const FieldSpec& field, const TunnelParams& tunnel,
                                 const QubitState& psi0, double t_max,
                                 const IntegratorSettings& settings = {});

/// Integrates the phenomenological Bloch equations
///   X' = -2 eps Y - G_phi X
///   Y' = -2 delta Z + 2 eps X - G_phi Y
///   Z' =  2 delta Y - G_r (Z - z_eq)
Trajectory propagate_bloch(const FieldSpec& field, const TunnelParams& tunnel,
                           const BlochState& bloch0, const DissipationParams& dissipation,
                           double t_max, const IntegratorSettings& settings = {});

/// X = -<sigma_x>, Y = <sigma_y>, Z = -<sigma_z> so that P_down = (1 - Z) / 2.
/// z_eq is set to the returned z.
BlochState state_to_bloch(const QubitState& psi);

/// (p_down, p_up) with p_down = (1 - z) / 2 and p_up = 1 - p_down.
std::pair<double, double> bloch_to_probabilities(const BlochState& b) noexcept;

enum class BlochInit { Pure, Mixed };

std::string_view to_string(BlochInit init);
BlochInit parse_bloch_init(std::string_view name);

/// Everything needed to produce one trajectory from psi(0) = (0, 1)^T (pure)
/// or rho(0) = I / 2 (mixed).
struct SimulationSetup {
    FieldSpec field = FieldSpec::f1();
    double delta = 0.0;
    DissipationParams dissipation;
    BlochInit init = BlochInit::Pure;
    std::optional<double> z_eq;
    double t_max = 50.0;
    IntegratorSettings integrator;

    /// Closed dynamics from a pure start run through the Schrodinger propagator.
    bool is_closed() const noexcept {
        return dissipation.is_zero() && init == BlochInit::Pure && !z_eq.has_value();
    }
};

Trajectory simulate(const SimulationSetup& setup);

}  // namespace fluxq
