#pragma once

#include <Eigen/Dense>

#include "pfc/errors.hpp"
#include "pfc/gains.hpp"

namespace pfc {

enum class LambdaMode { Fixed, Adaptive };

/// Scalar persistence filter Rdot = -lambda R + g^k, one per canonical block.
/// In adaptive mode lambda is the nondecreasing state lambda_hat with
/// lambda_hat_dot = nu * R * |Omega_block|^2.
struct PersistenceFilter {
    double R = 1.0;
    LambdaMode mode = LambdaMode::Fixed;
    int k = 2;
    double lambda = 1.0;      // fixed-mode decay
    double nu = 0.0;          // adaptation gain (adaptive mode)
    double lambda_hat = 0.0;  // adaptive decay state

    double lambda_now() const { return mode == LambdaMode::Fixed ? lambda : lambda_hat; }
};

/// k = max{2, 2^ceil(log2 r)} for block size r >= 1.
int k_exponent(int r);

/// dR/dt = -lambda_now * R + g^k.
double filter_rhs(double R, double lambda_now, double g, int k);
double filter_rhs(const PersistenceFilter& f, double g);

/// dlambda_hat/dt = nu * R * |omega_block|^2 (always >= 0).
double adaptive_lambda_rhs(double nu, double R, const Eigen::Ref<const Eigen::VectorXd>& omega_block);

struct FilterBounds {
    double R_min = 0.0;
    double R_max = 0.0;
};

/// Integrates the fixed-lambda filter over [0, horizon] (classical RK4, step
/// dt) and reports the observed extrema for t >= settle. Throws NotPE when
/// the gain carries no energy over the horizon.
FilterBounds filter_bounds_estimate(const GainSignal& sig, double lambda, int k, double R0,
                                    double horizon, double dt, double settle = 0.0);

}  // namespace pfc
