#pragma once

// Explicit Runge-Kutta integration of small real ODE systems onto a uniform
// sample grid. Adaptive steps are clipped so that every sample time is hit
// exactly; no interpolation is involved.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <sstream>

#include "fluxq/detail/tableaux.hpp"
#include "fluxq/errors.hpp"
#include "fluxq/trajectory.hpp"

namespace fluxq::detail {

template <std::size_t N>
using Vec = std::array<double, N>;

inline constexpr double kSafety = 0.9;
inline constexpr double kMinFactor = 0.2;
inline constexpr double kMaxFactor = 10.0;

template <std::size_t N>
bool all_finite(const Vec<N>& y) {
    return std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); });
}

[[noreturn]] inline void throw_at(const char* what, double t) {
    std::ostringstream os;
    os.precision(17);
    os << what << " at tau=" << t;
    throw IntegrationError(os.str());
}

[[noreturn]] inline void throw_divergence(double t) {
    std::ostringstream os;
    os.precision(17);
    os << "non-finite state at tau=" << t;
    throw DivergenceError(os.str());
}

/// Stages k[1..S-1] of an explicit RK step; k[0] must hold f(t, y).
template <std::size_t S, std::size_t N, class Rhs>
void rk_stages(const Rhs& rhs, double t, const Vec<N>& y, double h,
               const std::array<std::array<double, S>, S>& a, const std::array<double, S>& c,
               std::array<Vec<N>, S>& k) {
    for (std::size_t i = 1; i < S; ++i) {
        Vec<N> yi = y;
        for (std::size_t j = 0; j < i; ++j) {
            const double aij = a[i][j];
            if (aij == 0.0) continue;
            for (std::size_t n = 0; n < N; ++n) yi[n] += h * aij * k[j][n];
        }
        k[i] = rhs(t + c[i] * h, yi);
    }
}

template <std::size_t S, std::size_t N>
Vec<N> combine(const Vec<N>& y, double h, const std::array<double, S>& b,
               const std::array<Vec<N>, S>& k) {
    Vec<N> out = y;
    for (std::size_t j = 0; j < S; ++j) {
        if (b[j] == 0.0) continue;
        for (std::size_t n = 0; n < N; ++n) out[n] += h * b[j] * k[j][n];
    }
    return out;
}

/// One attempted step of an embedded pair. Returns the scaled error norm;
/// on return y_new holds the propagated state and f_new = f(t + h, y_new).
template <std::size_t N>
struct Dopri5 {
    static constexpr double kErrorExponent = -1.0 / 5.0;

    template <class Rhs>
    static double step(const Rhs& rhs, double t, const Vec<N>& y, const Vec<N>& f0, double h,
                       double rtol, double atol, Vec<N>& y_new, Vec<N>& f_new) {
        std::array<Vec<N>, 7> k{};
        k[0] = f0;
        rk_stages<7, N>(rhs, t, y, h, kDopri5A, kDopri5C, k);  // k[6] = f(t+h, y_new)
        y_new = combine<7, N>(y, h, kDopri5B, k);
        f_new = k[6];
        double sum = 0.0;
        for (std::size_t n = 0; n < N; ++n) {
            double e = 0.0;
            for (std::size_t j = 0; j < 7; ++j) e += kDopri5E[j] * k[j][n];
            const double scale = atol + rtol * std::max(std::abs(y[n]), std::abs(y_new[n]));
            const double r = h * e / scale;
            sum += r * r;
        }
        return std::sqrt(sum / static_cast<double>(N));
    }
};

template <std::size_t N>
struct Dop853 {
    static constexpr double kErrorExponent = -1.0 / 8.0;

    template <class Rhs>
    static double step(const Rhs& rhs, double t, const Vec<N>& y, const Vec<N>& f0, double h,
                       double rtol, double atol, Vec<N>& y_new, Vec<N>& f_new) {
        std::array<Vec<N>, 12> k{};
        k[0] = f0;
        rk_stages<12, N>(rhs, t, y, h, kDop853A, kDop853C, k);
        y_new = combine<12, N>(y, h, kDop853B, k);
        f_new = rhs(t + h, y_new);
        double e5sq = 0.0;
        double e3sq = 0.0;
        for (std::size_t n = 0; n < N; ++n) {
            double e5 = 0.0;
            double e3 = 0.0;
            for (std::size_t j = 0; j < 12; ++j) {
                e5 += kDop853E5[j] * k[j][n];
                e3 += (kDop853B[j] - kDop853E3Shift[j]) * k[j][n];
            }
            const double scale = atol + rtol * std::max(std::abs(y[n]), std::abs(y_new[n]));
            e5sq += (e5 / scale) * (e5 / scale);
            e3sq += (e3 / scale) * (e3 / scale);
        }
        if (e5sq == 0.0 && e3sq == 0.0) return 0.0;
        const double denom = e5sq + 0.01 * e3sq;
        return std::abs(h) * e5sq / std::sqrt(denom * static_cast<double>(N));
    }
};

/// Adaptive integration landing on tau_k = k * spacing, k = 0..n_samples-1.
/// observe(k, tau_k, y) is called once per sample.
template <class Pair, std::size_t N, class Rhs, class Observer>
void integrate_adaptive(const Rhs& rhs, Vec<N> y, std::size_t n_samples, double spacing,
                        const IntegratorSettings& s, Observer&& observe) {
    double t = 0.0;
    Vec<N> f = rhs(t, y);
    double h = spacing;
    std::size_t steps = 0;
    observe(std::size_t{0}, 0.0, y);

    Vec<N> y_new{};
    Vec<N> f_new{};
    for (std::size_t k = 1; k < n_samples; ++k) {
        const double target = static_cast<double>(k) * spacing;
        while (t < target) {
            double h_free = h;  // controller step before clipping to the sample time
            bool rejected = false;
            while (true) {
                double h_try = h_free;
                bool clipped = false;
                if (t + h_try >= target) {
                    h_try = target - t;
                    clipped = true;
                }
                if (++steps > s.max_steps) throw_at("step budget exhausted", t);
                const double err =
                    Pair::step(rhs, t, y, f, h_try, s.rtol, s.atol, y_new, f_new);
                if (!all_finite(y_new)) throw_divergence(t + h_try);
                if (err < 1.0) {
                    double factor = err == 0.0
                                        ? kMaxFactor
                                        : std::min(kMaxFactor,
                                                   kSafety * std::pow(err, Pair::kErrorExponent));
                    if (rejected) factor = std::min(1.0, factor);
                    const double proposal = h_try * factor;
                    if (!clipped) {
                        h = proposal;
                    } else {
                        h = h_free;
                        if (factor < 1.0) h = std::min(h, proposal);
                    }
                    t = clipped ? target : t + h_try;
                    y = y_new;
                    f = f_new;
                    break;
                }
                h_free = h_try *
                         std::max(kMinFactor, kSafety * std::pow(err, Pair::kErrorExponent));
                rejected = true;
                if (h_free < 1e-14 * std::max(1.0, std::abs(t))) throw_at("step size underflow", t);
            }
        }
        observe(k, target, y);
    }
}

/// Classical RK4 with dt adjusted to divide the sample spacing exactly.
template <std::size_t N, class Rhs, class Observer>
void integrate_rk4(const Rhs& rhs, Vec<N> y, std::size_t n_samples, double spacing,
                   const IntegratorSettings& s, Observer&& observe) {
    const auto m = static_cast<std::size_t>(std::llround(spacing / s.dt));
    const double h = spacing / static_cast<double>(m);
    std::size_t steps = 0;
    observe(std::size_t{0}, 0.0, y);
    for (std::size_t k = 1; k < n_samples; ++k) {
        const double start = static_cast<double>(k - 1) * spacing;
        for (std::size_t j = 0; j < m; ++j) {
            if (++steps > s.max_steps) throw_at("step budget exhausted", start);
            const double t = start + static_cast<double>(j) * h;
            const Vec<N> k1 = rhs(t, y);
            Vec<N> tmp{};
            for (std::size_t n = 0; n < N; ++n) tmp[n] = y[n] + 0.5 * h * k1[n];
            const Vec<N> k2 = rhs(t + 0.5 * h, tmp);
            for (std::size_t n = 0; n < N; ++n) tmp[n] = y[n] + 0.5 * h * k2[n];
            const Vec<N> k3 = rhs(t + 0.5 * h, tmp);
            for (std::size_t n = 0; n < N; ++n) tmp[n] = y[n] + h * k3[n];
            const Vec<N> k4 = rhs(t + h, tmp);
            for (std::size_t n = 0; n < N; ++n) {
                y[n] += h / 6.0 * (k1[n] + 2.0 * k2[n] + 2.0 * k3[n] + k4[n]);
            }
            if (!all_finite(y)) throw_divergence(t + h);
        }
        observe(k, static_cast<double>(k) * spacing, y);
    }
}

template <std::size_t N, class Rhs, class Observer>
void integrate(const Rhs& rhs, const Vec<N>& y0, std::size_t n_samples,
               const IntegratorSettings& s, Observer&& observe) {
    switch (s.method) {
        case Method::Rk4Fixed:
            integrate_rk4<N>(rhs, y0, n_samples, s.sample_spacing, s, observe);
            break;
        case Method::Rk45Adaptive:
            integrate_adaptive<Dopri5<N>, N>(rhs, y0, n_samples, s.sample_spacing, s, observe);
            break;
        case Method::Rk853Adaptive:
            integrate_adaptive<Dop853<N>, N>(rhs, y0, n_samples, s.sample_spacing, s, observe);
            break;
    }
}

}  // namespace fluxq::detail
