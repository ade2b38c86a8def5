#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>

#include "doctest.h"
#include "fluxq/analytic.hpp"
#include "fluxq/errors.hpp"
#include "support.hpp"

using namespace fluxq;
using fluxq::testing::Gen;
using fluxq::testing::kCritDelta;

namespace {

using cd = std::complex<double>;

// Independent oracle: fixed-step RK4 on the complex amplitudes, psi(0) = (0, 1).
double oracle_p_down(const std::function<double(double)>& eps, double delta, double tau_end,
                     double h = 1e-3) {
    cd a{0.0, 0.0};
    cd b{1.0, 0.0};
    const cd i{0.0, 1.0};
    auto f = [&](double t, cd x, cd y, cd& dx, cd& dy) {
        const double e = eps(t);
        dx = i * (e * x + delta * y);
        dy = i * (delta * x - e * y);
    };
    const int n = static_cast<int>(std::llround(tau_end / h));
    h = tau_end / n;
    for (int k = 0; k < n; ++k) {
        const double t = k * h;
        cd k1a, k1b, k2a, k2b, k3a, k3b, k4a, k4b;
        f(t, a, b, k1a, k1b);
        f(t + h / 2, a + h / 2 * k1a, b + h / 2 * k1b, k2a, k2b);
        f(t + h / 2, a + h / 2 * k2a, b + h / 2 * k2b, k3a, k3b);
        f(t + h, a + h * k3a, b + h * k3b, k4a, k4b);
        a += h / 6 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
        b += h / 6 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b);
    }
    return std::norm(a);
}

double bisect(const std::function<double(double)>& f, double lo, double hi) {
    const bool neg_lo = f(lo) < 0.0;
    while (hi - lo > 1e-13) {
        const double mid = 0.5 * (lo + hi);
        if ((f(mid) < 0.0) == neg_lo) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("closed forms against frozen high-accuracy integrations") {
    // tau = 3, delta = 0.4; reference from an independent DOP853 run at rtol 1e-13
    CHECK(std::abs(p1_down(3.0, 0.4) - 0.6515490566225814) < 1e-11);
    CHECK(std::abs(p2_down(3.0, 0.4, 0.2) - 0.6289391344738328) < 1e-11);
    CHECK(std::abs(p3_down(3.0, 0.4) - 0.6934789686174021) < 1e-11);
}

TEST_CASE("property: closed forms match the test-side integrator") {
    Gen g(31);
    for (int i = 0; i < 12; ++i) {
        const double delta = g.uniform(0.05, 1.8);
        const double tau = g.uniform(0.5, 6.0);
        const double w = g.uniform(0.02, 0.48);
        const double b = std::sqrt(0.25 - w * w);
        CAPTURE(delta);
        CAPTURE(tau);
        const double o1 = oracle_p_down([](double t) { return -0.5 + 2.0 / (1.0 + t * t); },
                                        delta, tau);
        const double o2 = oracle_p_down(
            [&](double t) { return -0.5 - 2.0 * w * w / (b * std::cos(2.0 * w * t) - 0.5); },
            delta, tau);
        const double o3 = oracle_p_down(
            [](double t) {
                const double t2 = t * t;
                return -0.5 + 6.0 * (t2 * t2 + 6.0 * t2 - 3.0) /
                                  (t2 * t2 * t2 + 3.0 * t2 * t2 + 27.0 * t2 + 9.0);
            },
            delta, tau);
        CHECK(std::abs(p1_down(tau, delta) - o1) < 1e-8);
        CHECK(std::abs(p2_down(tau, delta, w) - o2) < 1e-8);
        CHECK(std::abs(p3_down(tau, delta) - o3) < 1e-8);
    }
}

TEST_CASE("generalized Rabi formula") {
    for (double v : {0.5, -0.3, 0.0}) {
        for (double d : {0.1, 0.5}) {
            const double o = oracle_p_down([v](double) { return v; }, d, 4.0);
            CHECK(std::abs(rabi_p_down(4.0, d, v) - o) < 1e-9);
        }
    }
    const double d = 0.5;
    const double period = std::acos(-1.0) / std::sqrt(d * d + 0.25);
    CHECK(rabi_p_down(period, d, 0.5) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rabi_p_down(period / 2, d, 0.5) == doctest::Approx(0.5));
}

TEST_CASE("critical Lorentzian curve is 3/4 tau^2/(1+tau^2)") {
    double worst = 0.0;
    for (int i = 0; i <= 100000; ++i) {
        const double tau = i * 1e-3;
        worst = std::max(worst, std::abs(p1_down(tau, kCritDelta) - p1_down_monotone(tau)));
        CHECK(p1_down_monotone(tau) == doctest::Approx(0.75 * tau * tau / (1 + tau * tau)));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("small-argument evaluation keeps full relative precision") {
    // P ~ delta^2 tau^2 for tau -> 0
    for (double tau : {1e-6, 1e-5, 1e-4}) {
        CHECK(p1_down(tau, 0.3) == doctest::Approx(0.09 * tau * tau).epsilon(1e-4));
        CHECK(p3_down(tau, 0.3) == doctest::Approx(0.09 * tau * tau).epsilon(1e-4));
        CHECK(p2_down(tau, 0.3, 0.2) == doctest::Approx(0.09 * tau * tau).epsilon(1e-4));
    }
    CHECK(p1_down(0.0, 0.7) == 0.0);
}

TEST_CASE("property: probabilities stay inside [0, 1]") {
    for (double d : {0.1, 0.34, kCritDelta, 1.0, 1.54}) {
        for (int i = 0; i < 10000; ++i) {
            const double tau = 100.0 * i / 9999.0;
            for (double p : {p1_down(tau, d), p2_down(tau, d, 0.105), p2_down(tau, d, 0.49),
                             p3_down(tau, d)}) {
                CHECK((p >= -1e-12 && p <= 1.0 + 1e-12));
            }
        }
    }
}

TEST_CASE("monotone restriction of the rational family at theta = sqrt5 - 1") {
    const double d = std::sqrt((std::pow(std::sqrt(5.0) - 1.0, 2) - 1.0) / 4.0);
    double prev = p3_down(0.0, d);
    for (int i = 1; i <= 20000; ++i) {
        const double cur = p3_down(i * 5e-3, d);
        CHECK(cur - prev >= -1e-10);
        prev = cur;
    }
    // long-time value (5 + sqrt 5)/8
    CHECK(std::abs(p3_down(1e6, d) - 0.90450849718747371) < 1e-11);
}

TEST_CASE("long-time averages") {
    CHECK(avg_p1_down(std::sqrt(5.0 / 12.0)) == doctest::Approx(25.0 / 32.0).epsilon(1e-15));
    CHECK(avg_p1_down(0.0) == 0.0);
    CHECK(avg_p3_down(0.342848) == doctest::Approx(0.9085442).epsilon(1e-7));
}

TEST_CASE("property: running mean of the closed form converges to the average") {
    Gen g(32);
    for (int i = 0; i < 8; ++i) {
        const double d = g.uniform(0.1, 2.0);
        const double T = 2000.0;
        const int n = 400000;
        const double h = T / n;
        double sum = 0.5 * (p1_down(0.0, d) + p1_down(T, d));
        for (int k = 1; k < n; ++k) sum += p1_down(k * h, d);
        CAPTURE(d);
        CHECK(std::abs(sum * h / T - avg_p1_down(d)) <= 5e-3);
    }
}

TEST_CASE("argmax of the averages on a 1e-3 grid") {
    double best1 = -1.0;
    double at1 = 0.0;
    double best3 = -1.0;
    double at3 = 0.0;
    for (int i = 1; i <= 2000; ++i) {
        const double d = i * 1e-3;
        if (avg_p1_down(d) > best1) { best1 = avg_p1_down(d); at1 = d; }
        if (avg_p3_down(d) > best3) { best3 = avg_p3_down(d); at3 = d; }
    }
    CHECK(std::abs(at1 - std::sqrt(5.0 / 12.0)) <= 1e-3);
    CHECK(std::abs(best1 - 25.0 / 32.0) <= 1e-4);
    CHECK(std::abs(at3 - 0.3429) <= 1e-3);
    CHECK(std::abs(best3 - 0.9086) <= 1e-3);
}

TEST_CASE("oscillatory coefficient and its roots") {
    CHECK(q1_coefficient(2.0) == doctest::Approx(-16.0));
    CHECK(std::abs(q1_coefficient(std::sqrt(5.0) - 1.0)) < 1e-13);
    CHECK(std::abs(q1_coefficient(std::sqrt(5.0) + 1.0)) < 1e-12);
}

TEST_CASE("property: coefficient sign structure") {
    const double r1 = std::sqrt(5.0) - 1.0;
    const double r2 = std::sqrt(5.0) + 1.0;
    Gen g(33);
    for (int i = 0; i < 5000; ++i) {
        const double th = g.uniform(1.0, 10.0);
        if (std::abs(th - r1) < 1e-9 || std::abs(th - r2) < 1e-9) continue;
        CAPTURE(th);
        if (th > r1 && th < r2) CHECK(q1_coefficient(th) < 0.0);
        else CHECK(q1_coefficient(th) > 0.0);
    }
}

TEST_CASE("critical points agree with bisection") {
    const CriticalSet f1 = critical_thetas(FieldKind::F1);
    REQUIRE(f1.points.size() == 1);
    CHECK(f1.points[0].theta == 2.0);
    CHECK(f1.points[0].delta == doctest::Approx(kCritDelta).epsilon(1e-15));
    CHECK(std::abs(bisect([](double t) { return t * t - 4.0; }, 1.0, 3.0) - 2.0) <= 1e-12);

    const CriticalSet f3 = critical_thetas(FieldKind::F3);
    REQUIRE(f3.points.size() == 2);
    CHECK(std::abs(f3.points[0].theta - bisect(q1_coefficient, 1.0, 2.0)) <= 1e-12);
    CHECK(std::abs(f3.points[1].theta - bisect(q1_coefficient, 2.0, 5.0)) <= 1e-12);
    CHECK(std::abs(f3.points[0].delta - 0.36327126400268044) < 1e-15);
    CHECK(std::abs(f3.points[1].delta - 1.5388417685876267) < 1e-14);

    CHECK_THROWS_WITH_AS(critical_thetas(FieldKind::F2),
                         "no critical tunnel frequency defined for the periodic family",
                         UnsupportedFieldError);
}

TEST_CASE("closed-form dispatch") {
    CHECK(has_closed_form(validate_field_spec(FieldSpec::f1())));
    CHECK(has_closed_form(validate_field_spec(FieldSpec::f2(0.2))));
    CHECK_FALSE(has_closed_form(validate_field_spec(FieldSpec::f2(0.2, 0.4))));
    CHECK_FALSE(has_closed_form(validate_field_spec(FieldSpec::rsj(2, 1, 1, 0, 1))));
    CHECK(closed_form_p_down(validate_field_spec(FieldSpec::f3()), 0.4, 3.0) ==
          p3_down(3.0, 0.4));
    CHECK_THROWS_AS(closed_form_p_down(validate_field_spec(FieldSpec::rsj(2, 1, 1, 0, 1)), 0.4, 1.0),
                    UnsupportedFieldError);
    CHECK_THROWS_AS(p2_down(1.0, 0.3, 0.2, 0.5), ParameterError);
    CHECK_THROWS_AS(p1_down(NAN, 0.3), ParameterError);
}
