#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pfc/errors.hpp"

namespace pfc {

enum class GainKind { Constant, Sinusoid, BumpTrain, MollifierTrain, Spline };

/// The compactly supported window of Eq-style schedules:
/// phi(t) = (1 + cos(pi t)) for |t| < 1, zero outside, and its derivatives.
/// C^1 across the support boundary; the second derivative jumps by pi^2.
double bump_phi(double t, int order = 0);

/// A scalar gain g(t) with analytic derivatives up to max_smooth_order().
///
/// Construction is through the factory functions; evaluation is reentrant.
class GainSignal {
public:
    GainSignal() = default;  // the zero constant signal

    static GainSignal constant(double value);
    static GainSignal sinusoid(double amplitude, double omega, double phase = 0.0,
                               double offset = 0.0);
    /// Periodic train of paper-style cosine bumps supported on
    /// [start, start + width) within each period. Peak value 2*amplitude.
    static GainSignal bump_train(double start, double width, double period,
                                 double amplitude = 1.0);
    /// Same schedule built from the C-infinity mollifier exp(-1/(1-t^2)),
    /// normalized to peak `amplitude`.
    static GainSignal mollifier_train(double start, double width, double period,
                                      double amplitude = 1.0);
    /// Natural cubic spline through (t_i, g_i); C^2 inside the table, clamped
    /// to the endpoint values (zero derivatives) outside.
    static GainSignal tabulated(std::vector<double> t, std::vector<double> g);
    /// Two-column whitespace-separated "t g" text file.
    static GainSignal tabulated_from_file(const std::string& path);

    /// d^order g / dt^order at t. Throws OrderUnavailable beyond
    /// max_smooth_order().
    double eval(double t, int order = 0) const;

    int max_smooth_order() const { return max_order_; }
    GainKind kind() const { return kind_; }
    /// Period of periodic kinds, 0 otherwise.
    double period() const { return period_; }

private:
    GainKind kind_ = GainKind::Constant;
    int max_order_ = 1000;
    double period_ = 0.0;
    // constant/sinusoid: value|amplitude, omega, phase, offset
    // trains: start, width, amplitude
    double p0_ = 0.0, p1_ = 0.0, p2_ = 0.0, p3_ = 0.0;
    // spline knots and second derivatives
    std::vector<double> knots_t_, knots_g_, knots_m_;
};

/// Free function form of GainSignal::eval, matching the operation name used
/// throughout; identical semantics.
inline double eval_gain(const GainSignal& sig, double t, int order = 0) {
    return sig.eval(t, order);
}

/// The two time-wise orthogonal schedule signals: g1 on the first `on1`
/// seconds of each period, g2 on an `on2` window after `gap` more seconds.
/// Defaults are the published 1.8 / 0.4 / 1.8 s schedule over 4 s.
/// Throws BadSchedule if the windows do not fit in one period.
std::pair<GainSignal, GainSignal> bump_schedule(double on1 = 1.8, double gap = 0.4,
                                                double on2 = 1.8, double period = 4.0);

struct PESpec {
    double window_T = 4.0;
    double level_eps = 1e-3;
    double horizon = 8.0;
    double grid_dt = 1e-3;
};

struct PEResult {
    bool is_pe = false;
    double eps_hat = 0.0;
};

/// eps_hat = min over window starts t in [0, horizon - T] (grid_dt steps) of
/// the composite-quadrature integral of g^2 over [t, t+T]. The window length
/// is rounded to a whole number of grid steps.
PEResult check_pe(const GainSignal& sig, const PESpec& spec);

}  // namespace pfc
