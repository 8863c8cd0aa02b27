#include "pfc/lti_model.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>
#include <fstream>
#include <sstream>

namespace pfc {

void PlantModel::validate() const {
    if (A.rows() < 1 || A.rows() != A.cols()) {
        throw std::invalid_argument("PlantModel: A must be square with n >= 1");
    }
    if (B.rows() != A.rows() || B.cols() < 1 || B.cols() > A.rows()) {
        throw std::invalid_argument("PlantModel: B must be n x m with 1 <= m <= n");
    }
    if (!A.allFinite() || !B.allFinite()) {
        throw std::invalid_argument("PlantModel: non-finite entry");
    }
}

PlantModel read_plant_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open plant file: " + path);
    }
    int n = 0, m = 0;
    if (!(in >> n >> m)) {
        throw std::runtime_error("plant file: expected 'n m' on the first line");
    }
    if (n < 1 || m < 1) {
        throw std::runtime_error("plant file: n and m must be positive");
    }
    PlantModel plant;
    plant.A.resize(n, n);
    plant.B.resize(n, m);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (!(in >> plant.A(i, j))) {
                throw std::runtime_error("plant file: truncated A matrix");
            }
        }
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
            if (!(in >> plant.B(i, j))) {
                throw std::runtime_error("plant file: truncated B matrix");
            }
        }
    }
    plant.validate();
    return plant;
}

int CanonicalData::block_offset(int j) const {
    int off = 0;
    for (int s = j + 1; s <= p; ++s) off += r[s - 1];
    return off;
}

int CanonicalData::z_index(int j, int i) const {
    return block_offset(j) + (i - 1);
}

double CanonicalData::beta_of(int k, int j, int l) const {
    if (k >= j) return 0.0;
    const Vector& v = beta[k - 1][j - 1];
    if (v.size() == 0) return 0.0;
    return v(l - 1);
}

Matrix controllability_matrix(const PlantModel& plant) {
    plant.validate();
    const int n = plant.n();
    const int m = plant.m();
    Matrix K(n, n * m);
    Matrix AkB = plant.B;
    for (int k = 0; k < n; ++k) {
        K.block(0, k * m, n, m) = AkB;
        if (k + 1 < n) AkB = plant.A * AkB;
    }
    return K;
}

namespace {

// Incremental independence test against an orthonormal basis. The threshold
// is rank_tol * sigma_max(K), shared by both scan orders.
class ColumnScanner {
public:
    ColumnScanner(int n, double threshold) : basis_(n, n), kept_(0), threshold_(threshold) {}

    bool try_keep(const Vector& c) {
        Vector res = c;
        for (int i = 0; i < kept_; ++i) {
            res -= basis_.col(i).dot(res) * basis_.col(i);
        }
        // second orthogonalization pass for numerical hygiene
        for (int i = 0; i < kept_; ++i) {
            res -= basis_.col(i).dot(res) * basis_.col(i);
        }
        const double nrm = res.norm();
        if (nrm <= threshold_) return false;
        basis_.col(kept_++) = res / nrm;
        return true;
    }

    int kept() const { return kept_; }

private:
    Matrix basis_;
    int kept_;
    double threshold_;
};

}  // namespace

ControllabilityIndices controllability_indices(const PlantModel& plant, double rank_tol) {
    plant.validate();
    if (!(rank_tol > 0.0)) {
        throw std::invalid_argument("controllability_indices: rank_tol must be positive");
    }
    const int n = plant.n();
    const int m = plant.m();
    const Matrix K = controllability_matrix(plant);
    const double sigma_max = K.jacobiSvd().singularValues()(0);

    ColumnScanner scan(n, rank_tol * sigma_max);
    std::vector<int> r_all(m, 0);
    for (int power = 0; power < n && scan.kept() < n; ++power) {
        for (int j = 0; j < m && scan.kept() < n; ++j) {
            if (scan.try_keep(K.col(power * m + j))) ++r_all[j];
        }
    }
    if (scan.kept() < n) {
        throw NotControllable("controllability_indices: rank deficiency, only " +
                              std::to_string(scan.kept()) + " of " + std::to_string(n) +
                              " independent columns");
    }

    ControllabilityIndices out;
    for (int j = 0; j < m; ++j) {
        if (r_all[j] >= 1) {
            out.r.push_back(r_all[j]);
            out.inputs.push_back(j);
        }
    }
    out.p = static_cast<int>(out.r.size());
    return out;
}

CanonicalData canonical_transform(const PlantModel& plant, const CanonicalOptions& opts) {
    plant.validate();
    if (!(opts.rank_tol > 0.0)) {
        throw std::invalid_argument("canonical_transform: rank_tol must be positive");
    }
    const int n = plant.n();
    const int m = plant.m();
    const Matrix K = controllability_matrix(plant);
    const double sigma_max = K.jacobiSvd().singularValues()(0);

    // Input-sequential scan: chains[j] holds b_j, A b_j, ..., A^{r_j - 1} b_j.
    ColumnScanner scan(n, opts.rank_tol * sigma_max);
    std::vector<std::vector<Vector>> chains;
    std::vector<int> block_input;
    std::vector<int> redundant;
    int total = 0;
    for (int j = 0; j < m; ++j) {
        std::vector<Vector> chain;
        Vector c = plant.B.col(j);
        while (total < n && scan.try_keep(c)) {
            chain.push_back(c);
            ++total;
            c = plant.A * c;
        }
        if (chain.empty()) {
            redundant.push_back(j);
        } else {
            chains.push_back(std::move(chain));
            block_input.push_back(j);
        }
    }
    if (total < n) {
        throw NotControllable("canonical_transform: (A,B) not controllable at rank_tol, reached " +
                              std::to_string(total) + " of " + std::to_string(n));
    }

    const int p = static_cast<int>(chains.size());
    std::vector<int> r(p);
    for (int j = 0; j < p; ++j) r[j] = static_cast<int>(chains[j].size());

    // For each block, expand A^{r_j} b_j over the kept chains of blocks 1..j
    // and read the companion coefficients off the own-chain components.
    std::vector<Vector> alpha(p);
    {
        int dim = 0;
        Matrix S(n, n);  // kept columns of blocks 1..j, grown block by block
        for (int j = 0; j < p; ++j) {
            for (int i = 0; i < r[j]; ++i) S.col(dim + i) = chains[j][i];
            dim += r[j];
            const Vector rhs = plant.A * chains[j][r[j] - 1];  // A^{r_j} b_j
            const Vector coef = S.leftCols(dim).colPivHouseholderQr().solve(rhs);
            alpha[j].resize(r[j]);
            const int own = dim - r[j];
            // coefficient of A^{r_j - i} b_j is coef(own + r_j - i)
            for (int i = 1; i <= r[j]; ++i) alpha[j](i - 1) = -coef(own + r[j] - i);
        }
    }

    // Columns of M = T^{-1}: within block j, m_{j,r_j} = b_j and
    // m_{j,i-1} = A m_{j,i} + alpha_{j,r_j-i+1} b_j, assembled in layout
    // order [block p | ... | block 1].
    Matrix M(n, n);
    {
        int col = 0;
        for (int j = p; j >= 1; --j) {
            const Vector& b = chains[j - 1][0];
            std::vector<Vector> cols(r[j - 1]);
            cols[r[j - 1] - 1] = b;
            for (int i = r[j - 1]; i >= 2; --i) {
                cols[i - 2] = plant.A * cols[i - 1] + alpha[j - 1](r[j - 1] - i + 1 - 1) * b;
            }
            for (int i = 0; i < r[j - 1]; ++i) M.col(col++) = cols[i];
        }
    }

    {
        Eigen::JacobiSVD<Matrix> svd(M);
        const double smin = svd.singularValues()(n - 1);
        const double smax = svd.singularValues()(0);
        if (!(smin > 0.0) || smax / smin > opts.cond_bound) {
            throw IllConditioned("canonical_transform: cond(T) = " +
                                 std::to_string(smax / (smin > 0 ? smin : 1e-300)) +
                                 " exceeds bound");
        }
    }

    Eigen::PartialPivLU<Matrix> lu(M);
    CanonicalData cd;
    cd.T = lu.solve(Matrix::Identity(n, n));
    cd.A_hat = lu.solve(plant.A * M);
    cd.B_hat = lu.solve(plant.B);
    cd.p = p;
    cd.r = r;
    cd.block_input = block_input;
    cd.redundant_inputs = redundant;

    // Read alpha and beta off the designated rows/columns of A_hat.
    cd.alpha.resize(p);
    cd.beta.assign(p, std::vector<Vector>(p));
    for (int j = 1; j <= p; ++j) {
        const int off = cd.block_offset(j);
        const int last = off + r[j - 1] - 1;
        cd.alpha[j - 1].resize(r[j - 1]);
        for (int i = 1; i <= r[j - 1]; ++i) {
            cd.alpha[j - 1](i - 1) = -cd.A_hat(last, off + r[j - 1] - i);
        }
        for (int k = 1; k < j; ++k) {
            const int koff = cd.block_offset(k);
            Vector bk(r[k - 1]);
            for (int l = 1; l <= r[k - 1]; ++l) bk(l - 1) = cd.A_hat(koff + l - 1, off);
            cd.beta[k - 1][j - 1] = bk;
        }
    }
    return cd;
}

StructureReport verify_canonical_structure(const CanonicalData& cd, double tol) {
    const int n = cd.n();
    const int p = cd.p;
    StructureReport rep;
    double worst = 0.0;
    auto check = [&worst](double actual, double expected) {
        const double v = std::abs(actual - expected);
        if (v > worst) worst = v;
    };

    for (int j = 1; j <= p; ++j) {
        const int joff = cd.block_offset(j);
        const int rj = cd.r[j - 1];
        // diagonal block: superdiagonal ones, zeros elsewhere off the last row
        for (int row = 0; row < rj; ++row) {
            for (int col = 0; col < rj; ++col) {
                if (row == rj - 1) continue;  // alpha row is free
                check(cd.A_hat(joff + row, joff + col), col == row + 1 ? 1.0 : 0.0);
            }
        }
        for (int k = 1; k <= p; ++k) {
            if (k == j) continue;
            const int koff = cd.block_offset(k);
            const int rk = cd.r[k - 1];
            for (int row = 0; row < rk; ++row) {
                for (int col = 0; col < rj; ++col) {
                    // k < j: coupling allowed only in the first column;
                    // k > j: the whole block is a structural zero.
                    const bool free_entry = (k < j) && (col == 0);
                    if (!free_entry) check(cd.A_hat(koff + row, joff + col), 0.0);
                }
            }
        }
        // B_hat column of the block input: unit at the block's last row
        const int bi = cd.block_input[j - 1];
        for (int row = 0; row < n; ++row) {
            check(cd.B_hat(row, bi), row == joff + rj - 1 ? 1.0 : 0.0);
        }
    }

    rep.max_violation = worst;
    rep.pass = worst <= tol;
    return rep;
}

}  // namespace pfc
