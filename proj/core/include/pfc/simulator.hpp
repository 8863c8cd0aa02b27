#pragma once

#include <functional>
#include <string>
#include <vector>

#include "pfc/lti_model.hpp"
#include "pfc/pfilter.hpp"

namespace pfc {

/// Uniform-step record of a run. `states` always exists; scenarios append
/// controls and diagnostics columns after integration.
struct Trajectory {
    std::vector<double> times;
    std::vector<Vector> states;
    std::vector<Vector> controls;
    std::vector<Vector> diagnostics;
    std::vector<std::string> state_names;
    std::vector<std::string> control_names;
    std::vector<std::string> diag_names;

    size_t size() const { return times.size(); }
};

using OdeRhs = std::function<Vector(double, const Vector&)>;
/// Invoked after each accepted step; may adjust the state in place
/// (e.g. quaternion renormalization).
using StepHook = std::function<void(double, Vector&)>;

/// Classical 4th-order fixed-step integration of xdot = rhs(t, x) over
/// [t0, t0 + N dt], N = round((tf - t0)/dt). Records every sample and aborts
/// with NonFiniteState (time and component index) on the first bad value.
Trajectory integrate(const OdeRhs& rhs, const Vector& x0, double t0, double tf, double dt,
                     const StepHook& post_step = {});

struct DecayFit {
    double rate = 0.0;  // positive = decay
    double r2 = 0.0;
    int samples = 0;
};

/// Least-squares slope of log(norm) over the final tail_fraction of the
/// horizon; samples at or below the machine floor are skipped. Throws
/// DegenerateFit with fewer than 10 usable samples.
DecayFit fit_decay_rate(const std::vector<double>& times, const std::vector<double>& norms,
                        double tail_fraction);

struct LyapunovTrace {
    std::vector<double> t;
    std::vector<Vector> Vo;  // per-block energies R_j |Omega_j|^2
    std::vector<double> V;   // amalgamated function
};

/// Evaluates the per-block energies through `block_energy(t, state)` and
/// amalgamates them with the empirical filter bounds:
///   V[p,p]   = Vo_p
///   V[p,p-1] = Vo_{p-1} + 2 (R_{p-1,max}/R_{p,min}) V[p,p]
///   V[p,J]   = Vo_J + (R_{J,max}/R_{J+1,min}) V[p,J+1],  J = p-2..1
LyapunovTrace lyapunov_trace(const Trajectory& traj,
                             const std::function<Vector(double, const Vector&)>& block_energy,
                             const std::vector<FilterBounds>& bounds);

/// Header row then one row per sample, columns t, states, controls,
/// diagnostics. Deterministic %.17g formatting.
void write_csv(const std::string& path, const Trajectory& traj);

}  // namespace pfc
