#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "pfc/errors.hpp"

namespace pfc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Continuous-time plant xdot = A x + B G(t) u with diagonal gain matrix G.
struct PlantModel {
    Matrix A;  // n x n drift
    Matrix B;  // n x m input map

    int n() const { return static_cast<int>(A.rows()); }
    int m() const { return static_cast<int>(B.cols()); }

    /// Throws std::invalid_argument on dimension mismatch or non-finite entries.
    void validate() const;
};

/// Reads "n m" on the first line, then n rows of A, then n rows of B,
/// whitespace-separated decimal.
PlantModel read_plant_file(const std::string& path);

/// Block-triangular multivariable canonical form, z = T x.
///
/// Block j (1-based) has size r[j-1] and is driven by input block_input[j-1].
/// The state layout puts block p first: z = [pz; ...; 1z], so block j starts
/// at row block_offset(j) = sum_{s>j} r_s.
struct CanonicalData {
    Matrix T;      // similarity transform, z = T x
    Matrix A_hat;  // T A T^{-1}
    Matrix B_hat;  // T B
    int p = 0;
    std::vector<int> r;            // block sizes, index j-1
    std::vector<int> block_input;  // original input column of each block
    std::vector<int> redundant_inputs;
    // alpha[j-1](i-1) = alpha_{j,i}, i = 1..r_j; char poly of block j is
    // s^{r_j} + alpha_{j,1} s^{r_j-1} + ... + alpha_{j,r_j}.
    std::vector<Vector> alpha;
    // beta[k-1][j-1](l-1) = beta_{k,j,l} for k < j: coupling into row l of
    // block k from the first state of block j. Empty vectors where k >= j.
    std::vector<std::vector<Vector>> beta;

    int n() const { return static_cast<int>(A_hat.rows()); }
    int block_offset(int j) const;                 // 0-based start row of block j
    int z_index(int j, int i) const;               // 0-based index of jz_i
    double beta_of(int k, int j, int l) const;     // beta_{k,j,l}, 0 if absent
};

/// [B, AB, A^2 B, ..., A^{n-1} B], column blocks in that order.
Matrix controllability_matrix(const PlantModel& plant);

/// Result of the input-cyclic column scan of the controllability matrix.
struct ControllabilityIndices {
    int p = 0;                // number of inputs with r_j >= 1
    std::vector<int> r;       // indices, one per reported input
    std::vector<int> inputs;  // which original inputs those are
};

/// Scans b_1..b_m, A b_1..A b_m, ... keeping columns independent (to
/// rank_tol * sigma_max) of everything kept so far. Throws NotControllable
/// if fewer than n independent columns exist.
ControllabilityIndices controllability_indices(const PlantModel& plant, double rank_tol);

struct CanonicalOptions {
    double rank_tol = 1e-9;
    double cond_bound = 1e12;
};

/// Builds the canonical form. Chain sizes come from the input-sequential scan
/// (each input's Krylov chain exhausted before the next input is considered);
/// that is the unique choice for which the target zero pattern is reachable
/// by similarity alone. Throws NotControllable or IllConditioned.
CanonicalData canonical_transform(const PlantModel& plant, const CanonicalOptions& opts = {});

struct StructureReport {
    bool pass = false;
    double max_violation = 0.0;
};

/// Checks every structural constraint of the canonical form: zeros above the
/// block diagonal, companion pattern of diagonal blocks, first-column-only
/// coupling blocks, and the unit-vector columns of B_hat.
StructureReport verify_canonical_structure(const CanonicalData& cd, double tol);

}  // namespace pfc
