#pragma once

#include "pfc/gains.hpp"
#include "pfc/simulator.hpp"

namespace pfc {

/// Axi-symmetric spacecraft (J2 = J3) with two physical actuators: one
/// reorients between axes 1 and 2 (schedules g1, g2), the other shares the
/// g2 schedule on axis 3 (or runs dedicated when g2_dedicated_axis3 is set).
struct SpacecraftParams {
    double J1 = 3.0, J2 = 2.0, J3 = 2.0;  // kg m^2
    double lambda1 = 2.0;                 // axis-1 filter decay
    double nu = 0.01;                     // lambda_hat_2 adaptation gain
    GainSignal g1;
    GainSignal g2;
    bool g2_dedicated_axis3 = false;  // untested published variant: unit gain on axis 3

    double k2() const { return (J3 - J1) / J2; }
    double k3() const { return (J1 - J2) / J3; }
    double g3(double t, int order = 0) const {
        if (!g2_dedicated_axis3) return g2.eval(t, order);
        return order == 0 ? 1.0 : 0.0;
    }
};

/// State layout used throughout this module:
/// [q0, qv1, qv2, qv3, w1, w2, w3, R1, R2, lh2], 10 entries.
namespace sc {
constexpr int q0 = 0, qv1 = 1, qv2 = 2, qv3 = 3;
constexpr int w1 = 4, w2 = 5, w3 = 6;
constexpr int R1 = 7, R2 = 8, lh2 = 9;
constexpr int dim = 10;
}  // namespace sc

/// Modified controls v_i = u_i / J_i plus the lambda_hat_2 rate.
struct SpacecraftControls {
    double v1 = 0.0, v2 = 0.0, v3 = 0.0;
    double lambda_hat2_dot = 0.0;
};

/// Axis-1 law: the persistence-filter feedback for the (q_v1, w1) double
/// integrator with gain g1 and filter R1' = -lambda1 R1 + g1^2 (k = 2).
double control_v1(double qv1, double omega1, double R1, const GainSignal& g1, double t,
                  double lambda1);

/// Axes 2/3 laws with the gyroscopic feedforward terms and the adaptive
/// filter decay rate.
SpacecraftControls control_v23(const Vector& state, double t, const SpacecraftParams& params);

SpacecraftControls spacecraft_control(const Vector& state, double t,
                                      const SpacecraftParams& params);

/// Full nonlinear kinematics and dynamics with the given controls applied.
Vector spacecraft_rhs(const Vector& state, double t, const SpacecraftParams& params,
                      const SpacecraftControls& control);

/// Initial state used by the published simulation: an 18 degree rotation
/// about [1,1,1]/sqrt(3), omega(0) = 0.1 [pi/12, -pi/6, pi/8],
/// R1 = R2 = 1, lambda_hat_2 = 2.
Vector paper_initial_state();
SpacecraftParams paper_params();

struct SpacecraftRun {
    Trajectory traj;          // states per layout above
    double max_qnorm_drift;   // worst |q|^2 - 1 before renormalization
};

/// Runs the published scenario: paper parameters, 4 s actuation cycle,
/// fixed-step integration with per-step quaternion renormalization.
/// Controls (torques J_i v_i) and diagnostics are recorded in the trajectory.
SpacecraftRun run_paper_scenario(double horizon = 200.0, double dt = 1e-3);
SpacecraftRun run_spacecraft(const SpacecraftParams& params, const Vector& state0,
                             double horizon, double dt);

}  // namespace pfc
