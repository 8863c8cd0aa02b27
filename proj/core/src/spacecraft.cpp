#include "pfc/spacecraft.hpp"

#include <cmath>
#include <numbers>

namespace pfc {

double control_v1(double qv1, double omega1, double R1, const GainSignal& g1, double t,
                  double lambda1) {
    if (!(R1 > 0.0)) throw std::invalid_argument("control_v1: R1 must be positive");
    const double g = g1.eval(t, 0);
    const double gd = g1.eval(t, 1);
    // specialization of the r = [2] feedback law to z = (2 qv1, w1); every
    // term keeps a factor of g or gdot, so outage windows command zero
    return -(2.0 * gd / R1 + lambda1 * g / R1 - g * g * g / (2.0 * R1 * R1)) * qv1 -
           (g / R1) * omega1;
}

SpacecraftControls control_v23(const Vector& s, double t, const SpacecraftParams& params) {
    const double R2 = s(sc::R2);
    if (!(R2 > 0.0)) throw std::invalid_argument("control_v23: R2 must be positive");
    const double lh2 = s(sc::lh2);
    const double g2 = params.g2.eval(t, 0);
    const double g2d = params.g2.eval(t, 1);
    const double h = params.g3(t, 0);
    const double hd = params.g3(t, 1);
    const double qv2 = s(sc::qv2), qv3 = s(sc::qv3);
    const double w1 = s(sc::w1), w2 = s(sc::w2), w3 = s(sc::w3);

    const double om2 = w2 + (g2 * g2 / R2) * qv2;
    const double om3 = w3 + (h * h / R2) * qv3;

    // (1/g) d/dt(Omega - omega) expanded so each term carries g or gdot
    const double dres2 = 2.0 * g2d * qv2 / R2 + (g2 / (2.0 * R2)) * w2 +
                         lh2 * (g2 / R2) * qv2 - (g2 * g2 * g2 / (R2 * R2)) * qv2;
    const double dres3 = 2.0 * hd * qv3 / R2 + (h / (2.0 * R2)) * w3 + lh2 * (h / R2) * qv3 -
                         (h * g2 * g2 / (R2 * R2)) * qv3;

    SpacecraftControls out;
    out.v2 = -(g2 / (2.0 * R2)) * om2 + params.k2() * (g2 / R2) * w1 * qv3 - dres2;
    out.v3 = -(h / (2.0 * R2)) * om3 + params.k3() * (h / R2) * w1 * qv2 - dres3;
    out.lambda_hat2_dot = params.nu * R2 * (qv2 * qv2 + qv3 * qv3 + om2 * om2 + om3 * om3);
    return out;
}

SpacecraftControls spacecraft_control(const Vector& s, double t,
                                      const SpacecraftParams& params) {
    SpacecraftControls c = control_v23(s, t, params);
    c.v1 = control_v1(s(sc::qv1), s(sc::w1), s(sc::R1), params.g1, t, params.lambda1);
    return c;
}

Vector spacecraft_rhs(const Vector& s, double t, const SpacecraftParams& params,
                      const SpacecraftControls& c) {
    const double q0 = s(sc::q0);
    const Eigen::Vector3d qv(s(sc::qv1), s(sc::qv2), s(sc::qv3));
    const Eigen::Vector3d w(s(sc::w1), s(sc::w2), s(sc::w3));
    const double g1 = params.g1.eval(t, 0);
    const double g2 = params.g2.eval(t, 0);
    const double h = params.g3(t, 0);

    Vector ds(sc::dim);
    ds(sc::q0) = -0.5 * qv.dot(w);
    const Eigen::Vector3d qvdot = 0.5 * (q0 * w + qv.cross(w));
    ds(sc::qv1) = qvdot(0);
    ds(sc::qv2) = qvdot(1);
    ds(sc::qv3) = qvdot(2);
    ds(sc::w1) = g1 * c.v1;
    ds(sc::w2) = params.k2() * w(0) * w(2) + g2 * c.v2;
    ds(sc::w3) = params.k3() * w(0) * w(1) + h * c.v3;
    ds(sc::R1) = -params.lambda1 * s(sc::R1) + g1 * g1;
    ds(sc::R2) = -s(sc::lh2) * s(sc::R2) + g2 * g2;
    ds(sc::lh2) = c.lambda_hat2_dot;
    return ds;
}

SpacecraftParams paper_params() {
    SpacecraftParams p;
    auto [g1, g2] = bump_schedule();
    p.g1 = g1;
    p.g2 = g2;
    return p;
}

Vector paper_initial_state() {
    const double half_angle = 9.0 * std::numbers::pi / 180.0;
    Vector s(sc::dim);
    s(sc::q0) = std::cos(half_angle);
    const double c = std::sin(half_angle) / std::sqrt(3.0);
    s(sc::qv1) = c;
    s(sc::qv2) = c;
    s(sc::qv3) = c;
    s(sc::w1) = 0.1 * std::numbers::pi / 12.0;
    s(sc::w2) = -0.1 * std::numbers::pi / 6.0;
    s(sc::w3) = 0.1 * std::numbers::pi / 8.0;
    s(sc::R1) = 1.0;
    s(sc::R2) = 1.0;
    s(sc::lh2) = 2.0;
    return s;
}

SpacecraftRun run_spacecraft(const SpacecraftParams& params, const Vector& state0,
                             double horizon, double dt) {
    double max_drift = 0.0;
    auto renormalize = [&max_drift](double, Vector& s) {
        const double n2 = s(sc::q0) * s(sc::q0) + s(sc::qv1) * s(sc::qv1) +
                          s(sc::qv2) * s(sc::qv2) + s(sc::qv3) * s(sc::qv3);
        max_drift = std::max(max_drift, std::abs(n2 - 1.0));
        const double inv = 1.0 / std::sqrt(n2);
        s(sc::q0) *= inv;
        s(sc::qv1) *= inv;
        s(sc::qv2) *= inv;
        s(sc::qv3) *= inv;
    };
    auto rhs = [&params](double t, const Vector& s) {
        return spacecraft_rhs(s, t, params, spacecraft_control(s, t, params));
    };

    SpacecraftRun run;
    run.traj = integrate(rhs, state0, 0.0, horizon, dt, renormalize);
    run.max_qnorm_drift = max_drift;

    run.traj.state_names = {"q0", "qv1", "qv2", "qv3", "w1", "w2", "w3", "R1", "R2",
                            "lambda_hat2"};
    run.traj.control_names = {"u1", "u2", "u3"};
    run.traj.diag_names = {"norm_qv", "norm_w", "g1", "g2"};
    run.traj.controls.reserve(run.traj.size());
    run.traj.diagnostics.reserve(run.traj.size());
    for (size_t i = 0; i < run.traj.size(); ++i) {
        const double t = run.traj.times[i];
        const Vector& s = run.traj.states[i];
        const SpacecraftControls c = spacecraft_control(s, t, params);
        Vector u(3);
        u << params.J1 * c.v1, params.J2 * c.v2, params.J3 * c.v3;
        run.traj.controls.push_back(u);
        Vector d(4);
        d << std::hypot(s(sc::qv1), s(sc::qv2), s(sc::qv3)),
            Eigen::Vector3d(s(sc::w1), s(sc::w2), s(sc::w3)).norm(), params.g1.eval(t, 0),
            params.g2.eval(t, 0);
        run.traj.diagnostics.push_back(d);
    }
    return run;
}

SpacecraftRun run_paper_scenario(double horizon, double dt) {
    return run_spacecraft(paper_params(), paper_initial_state(), horizon, dt);
}

}  // namespace pfc
