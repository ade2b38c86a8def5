#include "fluxq/trajectory.hpp"

#include <cmath>
#include <sstream>

#include "fluxq/errors.hpp"

namespace fluxq {

namespace {

template <class F>
std::vector<double> channel_values(const std::vector<TrajectorySample>& samples, F&& get) {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(get(s));
    return out;
}

}  // namespace

std::string_view to_string(Method method) {
    switch (method) {
        case Method::Rk4Fixed: return "rk4";
        case Method::Rk45Adaptive: return "rk45";
        case Method::Rk853Adaptive: return "dop853";
    }
    return "?";
}

Method parse_method(std::string_view name) {
    if (name == "rk4") return Method::Rk4Fixed;
    if (name == "rk45") return Method::Rk45Adaptive;
    if (name == "dop853") return Method::Rk853Adaptive;
    throw ParameterError("unknown integrator '" + std::string(name) + "'");
}

void IntegratorSettings::validate() const {
    if (!(sample_spacing > 0.0) || !std::isfinite(sample_spacing)) {
        throw ParameterError("sample spacing must be positive");
    }
    if (max_steps == 0) {
        throw ParameterError("max_steps must be positive");
    }
    if (method == Method::Rk4Fixed) {
        if (!(dt > 0.0) || !std::isfinite(dt)) {
            throw ParameterError("dt must be positive");
        }
        const double ratio = sample_spacing / dt;
        if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio || std::round(ratio) < 1.0) {
            throw ParameterError("sample spacing must be an integer multiple of dt");
        }
    } else {
        if (!(rtol > 0.0 && rtol < 1e-3) || !(atol > 0.0 && atol < 1e-3)) {
            throw ParameterError("adaptive tolerances must lie in (0, 1e-3)");
        }
    }
}

std::string_view to_string(Channel channel) {
    switch (channel) {
        case Channel::Epsilon: return "epsilon";
        case Channel::PDown: return "p_down";
        case Channel::PUp: return "p_up";
        case Channel::X: return "x";
        case Channel::Y: return "y";
        case Channel::Z: return "z";
        case Channel::NormError: return "norm_error";
    }
    return "?";
}

Channel parse_channel(std::string_view name) {
    for (auto c : {Channel::Epsilon, Channel::PDown, Channel::PUp, Channel::X, Channel::Y,
                   Channel::Z, Channel::NormError}) {
        if (to_string(c) == name) return c;
    }
    throw ParameterError("unknown channel '" + std::string(name) + "'");
}

double sample_value(const TrajectorySample& s, Channel c) noexcept {
    switch (c) {
        case Channel::Epsilon: return s.epsilon;
        case Channel::PDown: return s.p_down;
        case Channel::PUp: return s.p_up;
        case Channel::X: return s.x;
        case Channel::Y: return s.y;
        case Channel::Z: return s.z;
        case Channel::NormError: return s.norm_error;
    }
    return 0.0;
}

Trajectory::Trajectory(double t0, double dt_sample, std::vector<TrajectorySample> samples,
                       TrajectoryMetadata metadata)
    : t0_(t0), dt_sample_(dt_sample), samples_(std::move(samples)),
      metadata_(std::move(metadata)) {
    if (samples_.empty()) {
        throw ConsistencyError("trajectory has no samples");
    }
    if (!(dt_sample_ > 0.0)) {
        throw ConsistencyError("trajectory sample spacing must be positive");
    }
    for (std::size_t k = 0; k < samples_.size(); ++k) {
        const auto& s = samples_[k];
        const double expected = t0_ + static_cast<double>(k) * dt_sample_;
        const bool finite = std::isfinite(s.tau) && std::isfinite(s.epsilon) &&
                            std::isfinite(s.p_down) && std::isfinite(s.p_up) &&
                            std::isfinite(s.x) && std::isfinite(s.y) && std::isfinite(s.z) &&
                            std::isfinite(s.norm_error);
        if (!finite || s.tau != expected || s.p_down + s.p_up != 1.0) {
            std::ostringstream os;
            os.precision(17);
            os << "trajectory invariant broken at sample " << k << " (tau=" << s.tau << ")";
            throw ConsistencyError(os.str());
        }
    }
}

std::vector<double> Trajectory::taus() const {
    return channel_values(samples_, [](const TrajectorySample& s) { return s.tau; });
}

std::vector<double> Trajectory::channel(Channel c) const {
    return channel_values(samples_, [c](const TrajectorySample& s) { return sample_value(s, c); });
}

}  // namespace fluxq
