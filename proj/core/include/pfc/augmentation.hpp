#pragma once

#include <string>
#include <vector>

#include "pfc/gain_poly.hpp"
#include "pfc/lti_model.hpp"

namespace pfc {

/// One additive piece of an augmented-state component: coeff(t) * z[z_index].
struct OmegaTerm {
    int z_index = 0;
    GainPoly coeff;
};

struct BlockSnapshot {
    double R = 1.0;
    double lambda = 1.0;  // fixed lambda or the current lambda_hat sample
};

/// Everything needed to turn the symbolic coefficients into numbers at one
/// instant: the per-block gain signals and filter snapshots.
struct OmegaEvalContext {
    double t = 0.0;
    const std::vector<GainSignal>* gains = nullptr;  // per block, index j-1
    std::vector<BlockSnapshot> filters;              // per block, index j-1

    double eval(const GainPoly& coeff) const;
};

/// The time-varying linear map z -> Omega of the augmented-state recurrences.
/// Built once per plant; evaluation is reentrant. In the global layout the
/// weight matrix is lower triangular with unit diagonal, which makes the
/// inverse a forward substitution.
class OmegaMap {
public:
    int p() const { return p_; }
    int n() const { return n_; }
    int k() const { return k_; }
    bool adaptive() const { return adaptive_; }
    int block_size(int j) const { return r_[j - 1]; }
    int block_offset(int j) const { return offset_[j - 1]; }
    int z_index(int j, int i) const { return offset_[j - 1] + i - 1; }

    /// Terms of Omega_{j,i} (block j = 1..p, level i = 1..r_j).
    const std::vector<OmegaTerm>& component(int j, int i) const;

    Matrix weight_matrix(const OmegaEvalContext& ctx) const;
    Vector eval(const OmegaEvalContext& ctx, const Vector& z) const;
    Vector invert(const OmegaEvalContext& ctx, const Vector& omega) const;

    /// One monomial per line: component, z-target, coeff, gain-derivative
    /// exponents, R power.
    std::string dump() const;

private:
    friend OmegaMap build_omega_map(const CanonicalData&, int, bool);
    int p_ = 0, n_ = 0, k_ = 2;
    bool adaptive_ = false;
    std::vector<int> r_, offset_;
    std::vector<std::vector<std::vector<OmegaTerm>>> comps_;  // [j-1][i-1]
};

/// Expands the recurrences Omega_{j,1} = z_{j,1},
/// Omega_{j,i+1} = d/dt Omega_{j,i} + (g_j^k / 2R_j) Omega_{j,i}
///                 - sum_{s>j} beta_{j,s,i} z_{s,1}
/// substituting zdot rows of the canonical dynamics. Raises std::domain_error
/// if a controlled row would be needed during the map build (possible only
/// for block profiles with r_s <= r_j - 3 downstream of a coupled block).
OmegaMap build_omega_map(const CanonicalData& cd, int k, bool adaptive = false);

/// Symbolic expansion of d/dt(Omega_{j,r_j} - z_{j,r_j}) along the full
/// canonical dynamics. Controlled rows reached during the expansion
/// contribute u_terms: coeff(t) * g_s(t) * u_s with the downstream control
/// supplied at evaluation time.
struct ResidualForm {
    int block = 0;
    std::vector<OmegaTerm> z_terms;
    struct UTerm {
        int source_block = 0;
        GainPoly coeff;
    };
    std::vector<UTerm> u_terms;
    bool uses_downstream_alpha = false;

    int divisibility() const;
    ResidualForm divided_by_g() const;  // throws NotDivisible
};

ResidualForm omega_residual_form(const OmegaMap& map, const CanonicalData& cd, int block);

/// Numeric value of the residual derivative at (z, t). downstream_u is
/// indexed by block (size p+1, entry 0 unused); entries for blocks that the
/// form does not reference may be NaN. Throws MissingDownstreamControl.
double omega_residual_derivative(const ResidualForm& form, const OmegaEvalContext& ctx,
                                 const Vector& z, const std::vector<double>& downstream_u);

}  // namespace pfc
