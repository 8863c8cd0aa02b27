#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "pfc/gains.hpp"

using namespace pfc;

namespace {

constexpr double kPi = std::numbers::pi;

// composite Simpson, test-side quadrature oracle
double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

}  // namespace

TEST_CASE("eval_gain: sinusoid and constant basics") {
    const GainSignal s = GainSignal::sinusoid(1.0, 1.0);
    CHECK(eval_gain(s, 0.0, 0) == doctest::Approx(0.0));
    CHECK(eval_gain(s, 0.0, 1) == doctest::Approx(1.0));
    CHECK(eval_gain(s, kPi / 2, 0) == doctest::Approx(1.0));

    const GainSignal c = GainSignal::constant(1.0);
    CHECK(eval_gain(c, 3.7, 0) == 1.0);
    CHECK(eval_gain(c, 3.7, 1) == 0.0);
    CHECK(eval_gain(c, -2.0, 5) == 0.0);
}

TEST_CASE("bump window phi matches the published values") {
    CHECK(bump_phi(0.0) == doctest::Approx(2.0));
    CHECK(bump_phi(1.0) == 0.0);
    CHECK(bump_phi(-1.0) == 0.0);
    CHECK(bump_phi(2.0) == 0.0);
    // C^1 at the boundary, second derivative jumps to pi^2 inside
    CHECK(bump_phi(1.0 - 1e-9, 1) == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(bump_phi(1.0 - 1e-9, 2) == doctest::Approx(kPi * kPi).epsilon(1e-6));
}

TEST_CASE("order above max smooth order raises") {
    const GainSignal g = GainSignal::bump_train(0.0, 1.8, 4.0);
    CHECK_THROWS_AS(eval_gain(g, 0.5, 2), OrderUnavailable);
}

TEST_CASE("bump schedule: defaults are time-wise orthogonal") {
    auto [g1, g2] = bump_schedule();
    CHECK(eval_gain(g1, 0.9) > 0.0);
    CHECK(eval_gain(g2, 0.9) == 0.0);
    CHECK(eval_gain(g1, 2.0) == 0.0);  // inside the gap
    CHECK(eval_gain(g2, 3.1) > 0.0);
    CHECK(eval_gain(g1, 4.9) > 0.0);  // periodic wrap

    const double cross =
        simpson([&](double t) { return eval_gain(g1, t) * eval_gain(g2, t); }, 0.0, 4.0, 4000);
    CHECK(std::abs(cross) < 1e-12);

    for (int i = 0; i <= 400; ++i) {
        const double t = 0.01 * i;
        CHECK(eval_gain(g1, t) * eval_gain(g2, t) == 0.0);
    }
}

TEST_CASE("bump schedule: overlapping windows raise") {
    CHECK_THROWS_AS(bump_schedule(2.0, 0.5, 2.0, 4.0), BadSchedule);
    CHECK_THROWS_AS(bump_schedule(-1.0, 0.5, 1.0, 4.0), BadSchedule);
}

TEST_CASE("derivative consistency: central differences converge at O(h^2)") {
    struct Sample {
        GainSignal sig;
        double t;
    };
    auto [g1, g2] = bump_schedule();
    const std::vector<Sample> samples = {
        {GainSignal::sinusoid(1.3, 2.0, 0.4), 0.7},
        {g1, 0.9},
        {g2, 3.0},
        {GainSignal::mollifier_train(0.0, 2.0, 4.0), 0.8},
    };
    for (const auto& [sig, t] : samples) {
        const int dmax = std::min(3, sig.max_smooth_order());
        for (int d = 0; d + 1 <= dmax; ++d) {
            const double h1 = 1e-4, h2 = 5e-5;
            auto fd = [&](double h) {
                return (sig.eval(t + h, d) - sig.eval(t - h, d)) / (2.0 * h) -
                       sig.eval(t, d + 1);
            };
            const double e1 = std::abs(fd(h1));
            const double e2 = std::abs(fd(h2));
            const double scale = std::max(1.0, std::abs(sig.eval(t, d + 1)));
            CHECK(e1 < 1e-5 * scale);
            if (e1 > 1e-11 * scale) {
                CHECK(e2 < e1 * 0.3);  // roughly quarters when h halves
            }
        }
    }
}

TEST_CASE("mollifier train is flat-zero at the support edge to high order") {
    const GainSignal m = GainSignal::mollifier_train(0.0, 2.0, 4.0);
    for (int d = 0; d <= 8; ++d) {
        CHECK(m.eval(0.0, d) == 0.0);
        CHECK(m.eval(2.0, d) == 0.0);
        CHECK(std::isfinite(m.eval(1.0, d)));
    }
    CHECK(m.eval(1.0, 0) == doctest::Approx(1.0));  // normalized peak
}

TEST_CASE("tabulated spline reproduces a smooth function and its derivatives") {
    std::vector<double> ts, gs;
    for (int i = 0; i <= 120; ++i) {
        const double t = 0.05 * i;
        ts.push_back(t);
        gs.push_back(std::sin(t));
    }
    const GainSignal s = GainSignal::tabulated(ts, gs);
    CHECK(s.max_smooth_order() == 2);
    for (double t : {0.51, 2.13, 4.99}) {
        CHECK(s.eval(t, 0) == doctest::Approx(std::sin(t)).epsilon(1e-5));
        CHECK(s.eval(t, 1) == doctest::Approx(std::cos(t)).epsilon(1e-3));
    }
    CHECK_THROWS_AS(s.eval(1.0, 3), OrderUnavailable);
}

TEST_CASE("check_pe: sine over its period") {
    const GainSignal s = GainSignal::sinusoid(1.0, 1.0);
    PESpec spec;
    spec.window_T = 2.0 * kPi;
    spec.grid_dt = 2.0 * kPi / 600.0;
    spec.horizon = 8.0 * kPi;
    spec.level_eps = 1.0;
    const PEResult res = check_pe(s, spec);
    CHECK(res.is_pe);
    CHECK(res.eps_hat == doctest::Approx(kPi).epsilon(1e-6));
}

TEST_CASE("check_pe: zero signal is not PE") {
    PESpec spec;
    spec.window_T = 1.0;
    spec.grid_dt = 0.01;
    spec.horizon = 4.0;
    spec.level_eps = 1e-6;
    const PEResult res = check_pe(GainSignal::constant(0.0), spec);
    CHECK_FALSE(res.is_pe);
    CHECK(res.eps_hat == 0.0);
}

TEST_CASE("check_pe: bump schedule matches a refined-grid oracle") {
    auto [g1, g2] = bump_schedule();
    PESpec spec;
    spec.window_T = 4.0;
    spec.grid_dt = 1e-3;
    spec.horizon = 12.0;
    spec.level_eps = 1e-3;
    const PEResult res = check_pe(g1, spec);
    CHECK(res.is_pe);
    CHECK(res.eps_hat > 0.0);

    // window = one full period, so any start sees the same energy
    const double oracle =
        simpson([&](double t) { return eval_gain(g1, t) * eval_gain(g1, t); }, 0.0, 4.0,
                400000);
    CHECK(res.eps_hat == doctest::Approx(oracle).epsilon(1e-3));
}

TEST_CASE("check_pe: enlarging the window never decreases eps_hat") {
    auto [g1, g2] = bump_schedule();
    double prev = -1.0;
    for (double T : {2.0, 3.0, 4.0, 5.5, 8.0}) {
        PESpec spec;
        spec.window_T = T;
        spec.grid_dt = 1e-3;
        spec.horizon = 16.0;
        const double eps = check_pe(g1, spec).eps_hat;
        CHECK(eps >= prev - 1e-12);
        prev = eps;
    }
}
