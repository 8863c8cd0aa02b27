#pragma once

#include <optional>
#include <vector>

#include "pfc/augmentation.hpp"
#include "pfc/lti_model.hpp"
#include "pfc/pfilter.hpp"

namespace pfc {

/// Persistence-filter decays and the derived quantities of the gain
/// inequalities: lambda_j = lambda_j* + rhs_j + slack, gamma_j = lambda_j -
/// lambda_j*, sigma the convergence-rate estimate.
struct ControllerConfig {
    std::vector<double> lambdas;
    std::vector<double> gammas;
    std::vector<double> lambda_stars;
    double slack = 0.0;
    double sigma = 0.0;
};

/// Spectral norm of the coupling block into block k from block j (k < j).
double coupling_norm(const CanonicalData& cd, int k, int j);

/// Smallest lambdas satisfying the three inequality families with the given
/// slack; empty index ranges contribute nothing (single-block and two-block
/// degenerate cases).
ControllerConfig select_lambdas(const CanonicalData& cd, double slack);

/// Convergence-rate estimate from the gammas and coupling norms. Throws
/// NonPositiveRate when the inequalities are violated.
double sigma_estimate(const ControllerConfig& cfg, const CanonicalData& cd);

/// The full-information feedback law. Immutable after construction; per-call
/// filter states are supplied by the caller, so one controller can serve
/// many concurrent simulations.
class Controller {
public:
    struct Options {
        std::optional<int> k_override;  // test hook; default k_exponent(max r)
    };

    Controller(CanonicalData cd, std::vector<GainSignal> block_gains, ControllerConfig cfg,
               Options opts = {});

    int k() const { return k_; }
    const OmegaMap& map() const { return map_; }
    const CanonicalData& canonical() const { return cd_; }
    const ControllerConfig& config() const { return cfg_; }
    const std::vector<GainSignal>& block_gains() const { return gains_; }

    OmegaEvalContext context(double t, const Vector& R) const;

    /// u (length m, redundant inputs pinned to zero) for plant state x;
    /// R holds the per-block filter states.
    Vector control(const Vector& x, double t, const Vector& R) const;

    /// Same law evaluated directly on canonical coordinates.
    Vector control_from_z(const Vector& z, double t, const Vector& R) const;

    /// Augmented states at (x, t); used by diagnostics.
    Vector omega(const Vector& x, double t, const Vector& R) const;

private:
    friend class AdaptiveController;
    CanonicalData cd_;
    std::vector<GainSignal> gains_;  // per block
    ControllerConfig cfg_;
    int k_ = 2;
    OmegaMap map_;
    // (Omega_{j,i} - z_{j,i}) with every coefficient symbolically divided by g
    std::vector<std::vector<std::vector<OmegaTerm>>> pos_div_;
    std::vector<ResidualForm> res_div_;

    std::vector<double> block_controls(const Vector& z, const OmegaEvalContext& ctx,
                                       const Vector& R,
                                       const std::vector<Vector>* alpha_override) const;
};

/// Corollary-style adaptive variant for plants supplied directly in canonical
/// form with unknown companion coefficients: the law runs on estimates
/// alpha_hat, the filters on the nondecreasing lambda_hat states.
struct AdaptiveConfig {
    std::vector<double> nu;           // per block, > 0
    std::vector<Vector> eta;          // per block, per i = 1..r_j, > 0
    std::vector<Vector> alpha_hat0;   // initial estimates
    std::vector<double> lambda_hat0;  // per block, > 0
};

class AdaptiveController {
public:
    AdaptiveController(CanonicalData cd, std::vector<GainSignal> block_gains, AdaptiveConfig cfg);

    struct Output {
        Vector u;                           // length m, redundant inputs zero
        std::vector<Vector> alpha_hat_dot;  // per block, alpha index convention
        Vector lambda_hat_dot;              // per block
    };

    Output control(const Vector& z, double t, const Vector& R, const Vector& lambda_hat,
                   const std::vector<Vector>& alpha_hat) const;

    int k() const { return k_; }
    const OmegaMap& map() const { return map_; }
    const AdaptiveConfig& config() const { return cfg_; }

    OmegaEvalContext context(double t, const Vector& R, const Vector& lambda_hat) const;

private:
    CanonicalData cd_;
    std::vector<GainSignal> gains_;
    AdaptiveConfig cfg_;
    int k_ = 2;
    OmegaMap map_;
    std::vector<std::vector<std::vector<OmegaTerm>>> pos_div_;
    std::vector<ResidualForm> res_div_;
};

}  // namespace pfc
