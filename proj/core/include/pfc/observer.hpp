#pragma once

#include <vector>

#include "pfc/augmentation.hpp"
#include "pfc/controller.hpp"
#include "pfc/lti_model.hpp"

namespace pfc {

/// Dual canonical data for xdot = A x + u, y = G(t) C x: the transform of
/// (A^T, C^T) gives A_o = A_hat^T (upper block triangular, block 1 decoupled)
/// and C_o = B_hat^T whose first p rows are the usable outputs
/// y_i = g_i * z_{i, r_i} under z = (T^{-1})^T x.
struct ObserverData {
    Matrix A;
    Matrix C;
    CanonicalData dual;  // canonical_transform(A^T, C^T)
    Matrix A_o;          // dual.A_hat^T
    Matrix C_o;          // dual.B_hat^T
    Matrix Tz;           // z = Tz * x, Tz = (T^{-1})^T
    int p() const { return dual.p; }
    int n() const { return static_cast<int>(A.rows()); }
    /// Original output row measured by block i.
    int output_of_block(int i) const { return dual.block_input[i - 1]; }
};

/// Throws NotObservable when (A, C) fails the dual controllability test.
ObserverData observer_transform(const Matrix& A, const Matrix& C,
                                const CanonicalOptions& opts = {});

/// Full-state observer xhat_dot = A xhat + u + T^T eta with per-block
/// innovations designed as the exact dual of the single-block feedback law:
/// eta_i = -f_i(t) * ytilde_i where f_i is the Theorem-style gain row of the
/// nominal block. Each block carries its own persistence filter
/// R_i' = -lambda_i R_i + g_i^{k_i}.
class Observer {
public:
    Observer(ObserverData od, std::vector<GainSignal> block_gains, std::vector<double> lambdas);

    const ObserverData& data() const { return od_; }
    int block_k(int i) const { return designs_[i - 1].k; }

    /// Innovation of one block from its measured residual only.
    Vector innovation(int block, double y_tilde, double t, double R_i) const;

    /// The dual gain row f_i(t) (innovation = -f * ytilde).
    Vector feedback_row(int block, double t, double R_i) const;

    /// dxhat/dt given the plant input u (length n) and measurement y
    /// (length >= p, rows beyond p ignored). R holds per-block filter states.
    Vector rhs(const Vector& x_hat, const Vector& u, const Vector& y, double t,
               const Vector& R) const;

    /// Per-block filter derivatives at time t.
    Vector filter_rhs_all(double t, const Vector& R) const;

private:
    struct BlockDesign {
        CanonicalData cd;  // single-block canonical data (T = I)
        OmegaMap map;
        std::vector<std::vector<OmegaTerm>> pos_div;
        ResidualForm res_div;
        std::vector<GainSignal> gain;  // the block's own gain, as a 1-vector
        int k = 2;
        double lambda = 1.0;
        int r = 1;
    };

    ObserverData od_;
    std::vector<BlockDesign> designs_;
};

}  // namespace pfc
