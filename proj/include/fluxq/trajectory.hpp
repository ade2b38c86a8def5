#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "fluxq/types.hpp"

namespace fluxq {

enum class Method { Rk4Fixed, Rk45Adaptive, Rk853Adaptive };

std::string_view to_string(Method method);
Method parse_method(std::string_view name);

struct IntegratorSettings {
    Method method = Method::Rk853Adaptive;
    double dt = 1e-3;  // fixed-step only
    double rtol = 1e-12;
    double atol = 1e-12;
    std::size_t max_steps = 100'000'000;
    double sample_spacing = 0.01;

    /// Throws ParameterError if the settings are unusable.
    void validate() const;

    friend bool operator==(const IntegratorSettings&, const IntegratorSettings&) = default;
};

struct TrajectorySample {
    double tau;
    double epsilon;
    double p_down;
    double p_up;
    double x;
    double y;
    double z;
    double norm_error;
};

enum class Channel { Epsilon, PDown, PUp, X, Y, Z, NormError };

std::string_view to_string(Channel channel);
Channel parse_channel(std::string_view name);

enum class Propagator { Schrodinger, Bloch };

struct TrajectoryMetadata {
    FieldSpec field;
    TunnelParams tunnel;
    DissipationParams dissipation;
    IntegratorSettings integrator;
    Propagator propagator;
};

/// Uniformly sampled time series. tau_k = t0 + k * dt_sample.
class Trajectory {
public:
    /// Throws ConsistencyError when the samples break the grid, probability or
    /// finiteness invariants.
    Trajectory(double t0, double dt_sample, std::vector<TrajectorySample> samples,
               TrajectoryMetadata metadata);

    double t0() const noexcept { return t0_; }
    double dt_sample() const noexcept { return dt_sample_; }
    double t_end() const noexcept { return samples_.back().tau; }
    std::size_t size() const noexcept { return samples_.size(); }
    const std::vector<TrajectorySample>& samples() const noexcept { return samples_; }
    const TrajectorySample& operator[](std::size_t i) const { return samples_[i]; }
    const TrajectoryMetadata& metadata() const noexcept { return metadata_; }

    std::vector<double> taus() const;
    std::vector<double> channel(Channel c) const;

private:
    double t0_;
    double dt_sample_;
    std::vector<TrajectorySample> samples_;
    TrajectoryMetadata metadata_;
};

double sample_value(const TrajectorySample& s, Channel c) noexcept;

}  // namespace fluxq
