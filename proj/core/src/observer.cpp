#include "pfc/observer.hpp"

#include <cmath>

namespace pfc {

ObserverData observer_transform(const Matrix& A, const Matrix& C, const CanonicalOptions& opts) {
    ObserverData od;
    od.A = A;
    od.C = C;
    PlantModel dual_plant{A.transpose(), C.transpose()};
    try {
        od.dual = canonical_transform(dual_plant, opts);
    } catch (const NotControllable& e) {
        throw NotObservable(std::string("observer_transform: (A, C) not observable: ") +
                            e.what());
    }
    od.A_o = od.dual.A_hat.transpose();
    od.C_o = od.dual.B_hat.transpose();
    od.Tz = od.dual.T.inverse().transpose();
    return od;
}

Observer::Observer(ObserverData od, std::vector<GainSignal> block_gains,
                   std::vector<double> lambdas)
    : od_(std::move(od)) {
    const int p = od_.p();
    if (static_cast<int>(block_gains.size()) != p || static_cast<int>(lambdas.size()) != p) {
        throw std::invalid_argument("Observer: need one gain and one lambda per block");
    }
    designs_.reserve(p);
    for (int i = 1; i <= p; ++i) {
        BlockDesign d;
        d.r = od_.dual.r[i - 1];
        d.k = k_exponent(d.r);
        d.lambda = lambdas[i - 1];
        d.gain = {block_gains[i - 1]};
        // nominal single-block plant, already canonical
        d.cd.T = Matrix::Identity(d.r, d.r);
        d.cd.A_hat = od_.dual.A_hat.block(od_.dual.block_offset(i), od_.dual.block_offset(i),
                                          d.r, d.r);
        d.cd.B_hat = Matrix::Zero(d.r, 1);
        d.cd.B_hat(d.r - 1, 0) = 1.0;
        d.cd.p = 1;
        d.cd.r = {d.r};
        d.cd.block_input = {0};
        d.cd.alpha = {od_.dual.alpha[i - 1]};
        d.cd.beta = {{Vector()}};
        d.map = build_omega_map(d.cd, d.k, /*adaptive=*/false);
        d.pos_div.resize(d.r);
        for (int lvl = 1; lvl <= d.r; ++lvl) {
            const int self = lvl - 1;
            for (const OmegaTerm& term : d.map.component(1, lvl)) {
                if (term.z_index == self) continue;
                d.pos_div[lvl - 1].push_back({term.z_index, term.coeff.divided_by_g()});
            }
        }
        d.res_div = omega_residual_form(d.map, d.cd, 1).divided_by_g();
        designs_.push_back(std::move(d));
    }
}

Vector Observer::feedback_row(int block, double t, double R_i) const {
    const BlockDesign& d = designs_[block - 1];
    OmegaEvalContext ctx;
    ctx.t = t;
    ctx.gains = &d.gain;
    ctx.filters = {{R_i, d.lambda}};

    Vector f = Vector::Zero(d.r);
    const Vector& al = d.cd.alpha[0];
    for (int i = 1; i <= d.r; ++i) {
        for (const OmegaTerm& term : d.pos_div[i - 1]) {
            f(term.z_index) -= al(d.r - i) * ctx.eval(term.coeff);
        }
    }
    for (const OmegaTerm& term : d.res_div.z_terms) {
        f(term.z_index) -= ctx.eval(term.coeff);
    }
    const double g = d.gain[0].eval(t, 0);
    const double w = std::pow(g, d.k - 1) / (2.0 * R_i);
    for (const OmegaTerm& term : d.map.component(1, d.r)) {
        f(term.z_index) -= w * ctx.eval(term.coeff);
    }
    return f;
}

Vector Observer::innovation(int block, double y_tilde, double t, double R_i) const {
    return -feedback_row(block, t, R_i) * y_tilde;
}

Vector Observer::rhs(const Vector& x_hat, const Vector& u, const Vector& y, double t,
                     const Vector& R) const {
    const int p = od_.p();
    const Vector z_hat = od_.Tz * x_hat;
    Vector eta = Vector::Zero(od_.n());
    for (int i = 1; i <= p; ++i) {
        const int off = od_.dual.block_offset(i);
        const int r = od_.dual.r[i - 1];
        const double g = designs_[i - 1].gain[0].eval(t, 0);
        const double y_hat = g * z_hat(off + r - 1);
        const double y_tilde = y(od_.output_of_block(i)) - y_hat;
        eta.segment(off, r) = innovation(i, y_tilde, t, R(i - 1));
    }
    return od_.A * x_hat + u + od_.dual.T.transpose() * eta;
}

Vector Observer::filter_rhs_all(double t, const Vector& R) const {
    Vector dR(od_.p());
    for (int i = 1; i <= od_.p(); ++i) {
        const BlockDesign& d = designs_[i - 1];
        dR(i - 1) = filter_rhs(R(i - 1), d.lambda, d.gain[0].eval(t, 0), d.k);
    }
    return dR;
}

}  // namespace pfc
