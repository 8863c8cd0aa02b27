#include "pfc/gains.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

namespace pfc {

namespace {

constexpr double kPi = std::numbers::pi;

double positive_mod(double t, double period) {
    double r = std::fmod(t, period);
    if (r < 0) r += period;
    return r;
}

// Derivatives of the mollifier psi(t) = exp(-1/(1-t^2)) on |t| < 1 satisfy
// psi^(d) = P_d(t) / (1-t^2)^{2d} * psi with the polynomial recursion
// P_{d+1} = P_d' D^2 + 4 d t P_d D - 2 t P_d, D = 1 - t^2.
std::vector<double> poly_mul(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> c(a.size() + b.size() - 1, 0.0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    return c;
}

void poly_acc(std::vector<double>& a, const std::vector<double>& b, double s) {
    if (a.size() < b.size()) a.resize(b.size(), 0.0);
    for (size_t i = 0; i < b.size(); ++i) a[i] += s * b[i];
}

std::vector<double> poly_diff(const std::vector<double>& a) {
    if (a.size() <= 1) return {0.0};
    std::vector<double> d(a.size() - 1);
    for (size_t i = 1; i < a.size(); ++i) d[i - 1] = a[i] * static_cast<double>(i);
    return d;
}

double poly_eval(const std::vector<double>& a, double t) {
    double v = 0.0;
    for (size_t i = a.size(); i-- > 0;) v = v * t + a[i];
    return v;
}

const std::vector<std::vector<double>>& mollifier_polys() {
    static const std::vector<std::vector<double>> polys = [] {
        constexpr int kMaxOrder = 16;
        std::vector<std::vector<double>> ps;
        ps.push_back({1.0});
        const std::vector<double> D = {1.0, 0.0, -1.0};       // 1 - t^2
        const std::vector<double> D2 = poly_mul(D, D);
        for (int d = 0; d < kMaxOrder; ++d) {
            std::vector<double> next = poly_mul(poly_diff(ps[d]), D2);
            poly_acc(next, poly_mul({0.0, 4.0 * d}, poly_mul(ps[d], D)), 1.0);
            poly_acc(next, poly_mul({0.0, -2.0}, ps[d]), 1.0);
            ps.push_back(std::move(next));
        }
        return ps;
    }();
    return polys;
}

double mollifier_deriv(double t, int order) {
    const double D = 1.0 - t * t;
    if (D <= 0.0) return 0.0;
    // exp(-1/D - 2*order*log(D)) * P(t); the exponent is driven to -inf as
    // D -> 0, so the boundary limit is 0 at every order.
    const double ex = -1.0 / D - 2.0 * order * std::log(D);
    if (ex < -700.0) return 0.0;
    return poly_eval(mollifier_polys()[order], t) * std::exp(ex);
}

}  // namespace

double bump_phi(double t, int order) {
    if (std::abs(t) >= 1.0) return 0.0;
    if (order == 0) return 1.0 + std::cos(kPi * t);
    const double scale = std::pow(kPi, order);
    switch (order % 4) {
        case 1: return -scale * std::sin(kPi * t);
        case 2: return -scale * std::cos(kPi * t);
        case 3: return scale * std::sin(kPi * t);
        default: return scale * std::cos(kPi * t);
    }
}

GainSignal GainSignal::constant(double value) {
    GainSignal s;
    s.kind_ = GainKind::Constant;
    s.max_order_ = 1000;
    s.p0_ = value;
    return s;
}

GainSignal GainSignal::sinusoid(double amplitude, double omega, double phase, double offset) {
    GainSignal s;
    s.kind_ = GainKind::Sinusoid;
    s.max_order_ = 1000;
    s.p0_ = amplitude;
    s.p1_ = omega;
    s.p2_ = phase;
    s.p3_ = offset;
    s.period_ = omega != 0.0 ? 2.0 * kPi / std::abs(omega) : 0.0;
    return s;
}

GainSignal GainSignal::bump_train(double start, double width, double period, double amplitude) {
    if (!(width > 0.0) || !(period > 0.0) || start < 0.0 || start + width > period) {
        throw BadSchedule("bump_train: window [start, start+width) must fit in one period");
    }
    GainSignal s;
    s.kind_ = GainKind::BumpTrain;
    s.max_order_ = 1;  // C^1: the second derivative jumps at the support edge
    s.period_ = period;
    s.p0_ = start;
    s.p1_ = width;
    s.p2_ = amplitude;
    return s;
}

GainSignal GainSignal::mollifier_train(double start, double width, double period,
                                       double amplitude) {
    if (!(width > 0.0) || !(period > 0.0) || start < 0.0 || start + width > period) {
        throw BadSchedule("mollifier_train: window [start, start+width) must fit in one period");
    }
    GainSignal s;
    s.kind_ = GainKind::MollifierTrain;
    s.max_order_ = 15;
    s.period_ = period;
    s.p0_ = start;
    s.p1_ = width;
    s.p2_ = amplitude;
    return s;
}

GainSignal GainSignal::tabulated(std::vector<double> t, std::vector<double> g) {
    if (t.size() != g.size() || t.size() < 3) {
        throw std::invalid_argument("tabulated: need >= 3 matching (t, g) samples");
    }
    for (size_t i = 1; i < t.size(); ++i) {
        if (!(t[i] > t[i - 1])) throw std::invalid_argument("tabulated: t must be increasing");
    }
    const int n = static_cast<int>(t.size());
    // natural cubic spline second derivatives via the standard tridiagonal sweep
    std::vector<double> m(n, 0.0), u(n, 0.0), zv(n, 0.0);
    std::vector<double> h(n - 1);
    for (int i = 0; i + 1 < n; ++i) h[i] = t[i + 1] - t[i];
    std::vector<double> alpha(n, 0.0);
    for (int i = 1; i + 1 < n; ++i) {
        alpha[i] = 6.0 * ((g[i + 1] - g[i]) / h[i] - (g[i] - g[i - 1]) / h[i - 1]);
    }
    std::vector<double> l(n, 1.0), mu(n, 0.0);
    for (int i = 1; i + 1 < n; ++i) {
        l[i] = 2.0 * (t[i + 1] - t[i - 1]) - h[i - 1] * mu[i - 1];
        mu[i] = h[i] / l[i];
        zv[i] = (alpha[i] - h[i - 1] * zv[i - 1]) / l[i];
    }
    for (int i = n - 2; i >= 1; --i) m[i] = zv[i] - mu[i] * m[i + 1];
    (void)u;

    GainSignal s;
    s.kind_ = GainKind::Spline;
    s.max_order_ = 2;
    s.knots_t_ = std::move(t);
    s.knots_g_ = std::move(g);
    s.knots_m_ = std::move(m);
    return s;
}

GainSignal GainSignal::tabulated_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open gain table: " + path);
    std::vector<double> t, g;
    double a = 0.0, b = 0.0;
    while (in >> a >> b) {
        t.push_back(a);
        g.push_back(b);
    }
    return tabulated(std::move(t), std::move(g));
}

double GainSignal::eval(double t, int order) const {
    if (order < 0) throw std::invalid_argument("eval_gain: negative order");
    if (order > max_order_) {
        throw OrderUnavailable("eval_gain: order " + std::to_string(order) +
                               " exceeds max smooth order " + std::to_string(max_order_));
    }
    switch (kind_) {
        case GainKind::Constant:
            return order == 0 ? p0_ : 0.0;
        case GainKind::Sinusoid: {
            const double arg = p1_ * t + p2_;
            const double scale = p0_ * std::pow(p1_, order);
            double v = 0.0;
            switch (order % 4) {
                case 0: v = scale * std::sin(arg); break;
                case 1: v = scale * std::cos(arg); break;
                case 2: v = -scale * std::sin(arg); break;
                default: v = -scale * std::cos(arg); break;
            }
            if (order == 0) v += p3_;
            return v;
        }
        case GainKind::BumpTrain: {
            const double tm = positive_mod(t, period_);
            const double half = 0.5 * p1_;
            const double tau = (tm - p0_ - half) / half;
            const double chain = std::pow(1.0 / half, order);
            return p2_ * bump_phi(tau, order) * chain;
        }
        case GainKind::MollifierTrain: {
            const double tm = positive_mod(t, period_);
            const double half = 0.5 * p1_;
            const double tau = (tm - p0_ - half) / half;
            const double chain = std::pow(1.0 / half, order);
            // normalized so that the peak equals amplitude
            return p2_ * std::numbers::e * mollifier_deriv(tau, order) * chain;
        }
        case GainKind::Spline: {
            const auto& ts = knots_t_;
            if (t <= ts.front()) return order == 0 ? knots_g_.front() : 0.0;
            if (t >= ts.back()) return order == 0 ? knots_g_.back() : 0.0;
            const auto it = std::upper_bound(ts.begin(), ts.end(), t);
            const int i = static_cast<int>(it - ts.begin()) - 1;
            const double h = ts[i + 1] - ts[i];
            const double a = (ts[i + 1] - t) / h;
            const double b = (t - ts[i]) / h;
            const double mi = knots_m_[i], mi1 = knots_m_[i + 1];
            const double gi = knots_g_[i], gi1 = knots_g_[i + 1];
            if (order == 0) {
                return a * gi + b * gi1 +
                       ((a * a * a - a) * mi + (b * b * b - b) * mi1) * h * h / 6.0;
            }
            if (order == 1) {
                return (gi1 - gi) / h - (3.0 * a * a - 1.0) / 6.0 * h * mi +
                       (3.0 * b * b - 1.0) / 6.0 * h * mi1;
            }
            return a * mi + b * mi1;
        }
    }
    return 0.0;
}

std::pair<GainSignal, GainSignal> bump_schedule(double on1, double gap, double on2,
                                                double period) {
    if (!(on1 > 0.0) || !(on2 > 0.0) || gap < 0.0 || !(period > 0.0)) {
        throw BadSchedule("bump_schedule: windows must be positive and the gap nonnegative");
    }
    if (on1 + gap + on2 > period + 1e-12) {
        throw BadSchedule("bump_schedule: on1 + gap + on2 exceeds the period");
    }
    return {GainSignal::bump_train(0.0, on1, period),
            GainSignal::bump_train(on1 + gap, on2, period)};
}

PEResult check_pe(const GainSignal& sig, const PESpec& spec) {
    if (!(spec.window_T > 0.0) || !(spec.grid_dt > 0.0) || spec.grid_dt >= spec.window_T) {
        throw std::invalid_argument("check_pe: need 0 < grid_dt < window_T");
    }
    if (spec.horizon < 2.0 * spec.window_T) {
        throw std::invalid_argument("check_pe: horizon must be >= 2 * window_T");
    }
    if (spec.level_eps < 0.0) {
        throw std::invalid_argument("check_pe: level_eps must be >= 0");
    }
    const double h = spec.grid_dt;
    const long long steps = std::llround(spec.horizon / h);
    const long long win = std::max<long long>(1, std::llround(spec.window_T / h));

    // 5-point Gauss-Legendre per grid cell, then prefix sums; window energy
    // is a prefix difference.
    static const double gl_x[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                   0.5384693101056831, 0.9061798459386640};
    static const double gl_w[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                   0.4786286704993665, 0.2369268850561891};
    std::vector<double> prefix(static_cast<size_t>(steps) + 1, 0.0);
    for (long long k = 0; k < steps; ++k) {
        const double a = k * h, b = (k + 1) * h;
        const double mid = 0.5 * (a + b), halfw = 0.5 * (b - a);
        double cell = 0.0;
        for (int q = 0; q < 5; ++q) {
            const double g = sig.eval(mid + halfw * gl_x[q], 0);
            cell += gl_w[q] * g * g;
        }
        prefix[k + 1] = prefix[k] + cell * halfw;
    }

    PEResult out;
    out.eps_hat = std::numeric_limits<double>::infinity();
    for (long long k = 0; k + win <= steps; ++k) {
        out.eps_hat = std::min(out.eps_hat, prefix[k + win] - prefix[k]);
    }
    if (!std::isfinite(out.eps_hat)) out.eps_hat = 0.0;
    out.is_pe = out.eps_hat >= spec.level_eps;
    return out;
}

}  // namespace pfc
