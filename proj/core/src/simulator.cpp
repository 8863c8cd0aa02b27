#include "pfc/simulator.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace pfc {

namespace {

void check_finite(const Vector& x, double t) {
    for (int i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x(i))) {
            throw NonFiniteState("integrate: non-finite state component " + std::to_string(i) +
                                     " at t = " + std::to_string(t),
                                 t, i);
        }
    }
}

}  // namespace

Trajectory integrate(const OdeRhs& rhs, const Vector& x0, double t0, double tf, double dt,
                     const StepHook& post_step) {
    if (!(dt > 0.0)) throw std::invalid_argument("integrate: dt must be positive");
    if (!(tf > t0)) throw std::invalid_argument("integrate: tf must exceed t0");
    const long long steps = std::max<long long>(1, std::llround((tf - t0) / dt));

    Trajectory traj;
    traj.times.reserve(steps + 1);
    traj.states.reserve(steps + 1);

    Vector x = x0;
    check_finite(x, t0);
    traj.times.push_back(t0);
    traj.states.push_back(x);

    for (long long i = 0; i < steps; ++i) {
        const double t = t0 + i * dt;
        const Vector k1 = rhs(t, x);
        const Vector k2 = rhs(t + 0.5 * dt, x + 0.5 * dt * k1);
        const Vector k3 = rhs(t + 0.5 * dt, x + 0.5 * dt * k2);
        const Vector k4 = rhs(t + dt, x + dt * k3);
        x += dt / 6.0 * (k1 + 2.0 * (k2 + k3) + k4);
        const double tn = t0 + (i + 1) * dt;
        check_finite(x, tn);
        if (post_step) post_step(tn, x);
        traj.times.push_back(tn);
        traj.states.push_back(x);
    }
    return traj;
}

DecayFit fit_decay_rate(const std::vector<double>& times, const std::vector<double>& norms,
                        double tail_fraction) {
    if (times.size() != norms.size() || times.empty()) {
        throw std::invalid_argument("fit_decay_rate: times/norms mismatch");
    }
    if (!(tail_fraction > 0.0) || tail_fraction > 1.0) {
        throw std::invalid_argument("fit_decay_rate: tail_fraction in (0, 1]");
    }
    const double t_end = times.back();
    const double t_start = t_end - tail_fraction * (t_end - times.front());

    std::vector<double> ts, ys;
    for (size_t i = 0; i < times.size(); ++i) {
        if (times[i] < t_start) continue;
        if (!(norms[i] > 1e-280)) continue;  // machine floor
        ts.push_back(times[i]);
        ys.push_back(std::log(norms[i]));
    }
    if (ts.size() < 10) {
        throw DegenerateFit("fit_decay_rate: only " + std::to_string(ts.size()) +
                            " usable samples in the tail");
    }

    const size_t n = ts.size();
    double mt = 0.0, my = 0.0;
    for (size_t i = 0; i < n; ++i) {
        mt += ts[i];
        my += ys[i];
    }
    mt /= n;
    my /= n;
    double stt = 0.0, sty = 0.0, syy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        stt += (ts[i] - mt) * (ts[i] - mt);
        sty += (ts[i] - mt) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    const double slope = sty / stt;

    DecayFit fit;
    fit.rate = -slope;
    fit.samples = static_cast<int>(n);
    if (syy <= 0.0) {
        fit.r2 = 1.0;  // constant log-norm is fit exactly by slope 0
    } else {
        double ss_res = 0.0;
        for (size_t i = 0; i < n; ++i) {
            const double pred = my + slope * (ts[i] - mt);
            ss_res += (ys[i] - pred) * (ys[i] - pred);
        }
        fit.r2 = 1.0 - ss_res / syy;
    }
    return fit;
}

LyapunovTrace lyapunov_trace(const Trajectory& traj,
                             const std::function<Vector(double, const Vector&)>& block_energy,
                             const std::vector<FilterBounds>& bounds) {
    LyapunovTrace trace;
    const int p = static_cast<int>(bounds.size());
    trace.t = traj.times;
    trace.Vo.reserve(traj.size());
    trace.V.reserve(traj.size());
    for (size_t s = 0; s < traj.size(); ++s) {
        Vector vo = block_energy(traj.times[s], traj.states[s]);
        double v = vo(p - 1);  // V[p,p]
        for (int J = p - 1; J >= 1; --J) {
            const double factor = (J == p - 1 ? 2.0 : 1.0) * bounds[J - 1].R_max /
                                  bounds[J].R_min;
            v = vo(J - 1) + factor * v;
        }
        trace.Vo.push_back(std::move(vo));
        trace.V.push_back(v);
    }
    return trace;
}

void write_csv(const std::string& path, const Trajectory& traj) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_csv: cannot open " + path);

    auto name_or = [](const std::vector<std::string>& names, size_t i, const char* prefix) {
        if (i < names.size()) return names[i];
        return std::string(prefix) + std::to_string(i + 1);
    };

    out << "t";
    const size_t ns = traj.states.empty() ? 0 : traj.states[0].size();
    const size_t nc = traj.controls.empty() ? 0 : traj.controls[0].size();
    const size_t nd = traj.diagnostics.empty() ? 0 : traj.diagnostics[0].size();
    for (size_t i = 0; i < ns; ++i) out << "," << name_or(traj.state_names, i, "x");
    for (size_t i = 0; i < nc; ++i) out << "," << name_or(traj.control_names, i, "u");
    for (size_t i = 0; i < nd; ++i) out << "," << name_or(traj.diag_names, i, "d");
    out << "\n";

    char buf[32];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        out << "," << buf;
    };
    for (size_t s = 0; s < traj.size(); ++s) {
        std::snprintf(buf, sizeof(buf), "%.17g", traj.times[s]);
        out << buf;
        for (size_t i = 0; i < ns; ++i) put(traj.states[s](i));
        if (nc) {
            for (size_t i = 0; i < nc; ++i) put(traj.controls[s](i));
        }
        if (nd) {
            for (size_t i = 0; i < nd; ++i) put(traj.diagnostics[s](i));
        }
        out << "\n";
    }
}

}  // namespace pfc
