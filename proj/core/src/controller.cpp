#include "pfc/controller.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>

namespace pfc {

double coupling_norm(const CanonicalData& cd, int k, int j) {
    const Matrix block = cd.A_hat.block(cd.block_offset(k), cd.block_offset(j), cd.r[k - 1],
                                        cd.r[j - 1]);
    return block.jacobiSvd().singularValues()(0);
}

namespace {

double lambda_star(const CanonicalData& cd, int j) {
    const Vector& al = cd.alpha[j - 1];
    const int rj = cd.r[j - 1];
    double best = 1.0 + std::abs(al(rj - 1));  // 1 + |alpha_{j,r_j}|
    for (int l = 2; l <= rj - 1; ++l) {
        best = std::max(best, 2.0 + std::abs(al(rj - l + 1 - 1)));
    }
    double third = 1.0 - al(0);
    for (int i = 1; i <= rj - 1; ++i) third += std::abs(al(rj - i + 1 - 1));
    return std::max(best, third);
}

double inequality_rhs(const CanonicalData& cd, int j) {
    const int p = cd.p;
    if (p == 1) return 0.0;
    double rhs = 0.0;
    if (j == 1) {
        for (int l = 1; l <= p - 1; ++l) rhs += coupling_norm(cd, 1, 1 + l);
    } else if (j == p) {
        for (int l = 1; l <= p - 1; ++l) rhs += coupling_norm(cd, p - l, p);
    } else {
        for (int l = 1; l <= p - j; ++l) rhs += coupling_norm(cd, j, j + l);
        for (int l = 1; l <= j - 1; ++l) rhs += 2.0 * coupling_norm(cd, j - l, j);
    }
    return rhs;
}

}  // namespace

ControllerConfig select_lambdas(const CanonicalData& cd, double slack) {
    if (slack < 0.0) throw std::invalid_argument("select_lambdas: slack must be >= 0");
    ControllerConfig cfg;
    cfg.slack = slack;
    for (int j = 1; j <= cd.p; ++j) {
        const double star = lambda_star(cd, j);
        const double rhs = inequality_rhs(cd, j);
        cfg.lambda_stars.push_back(star);
        cfg.lambdas.push_back(star + rhs + slack);
        cfg.gammas.push_back(rhs + slack);
    }
    cfg.sigma = slack > 0.0 ? sigma_estimate(cfg, cd) : 0.0;
    return cfg;
}

double sigma_estimate(const ControllerConfig& cfg, const CanonicalData& cd) {
    const int p = cd.p;
    double sigma;
    if (p == 1) {
        sigma = cfg.gammas[0];
    } else {
        sigma = cfg.gammas[p - 1] / 2.0;
        for (int j = 2; j <= p - 1; ++j) {
            double sum = 0.0;
            for (int l = 1; l <= p - j; ++l) sum += coupling_norm(cd, j, j + l);
            sigma = std::min(sigma, (cfg.gammas[j - 1] - sum) / 2.0);
        }
        double sum1 = 0.0;
        for (int l = 1; l <= p - 1; ++l) sum1 += coupling_norm(cd, 1, 1 + l);
        sigma = std::min(sigma, cfg.gammas[0] - sum1);
    }
    if (!(sigma > 0.0)) {
        throw NonPositiveRate("sigma_estimate: rate " + std::to_string(sigma) +
                              " is not positive; gain inequalities violated");
    }
    return sigma;
}

namespace {

// divided (Omega_{j,i} - z_{j,i}) term lists, shared by both controllers
std::vector<std::vector<std::vector<OmegaTerm>>> build_pos_div(const OmegaMap& map,
                                                               const CanonicalData& cd) {
    std::vector<std::vector<std::vector<OmegaTerm>>> out(cd.p);
    for (int j = 1; j <= cd.p; ++j) {
        out[j - 1].resize(cd.r[j - 1]);
        for (int i = 1; i <= cd.r[j - 1]; ++i) {
            const int self = cd.z_index(j, i);
            for (const OmegaTerm& term : map.component(j, i)) {
                if (term.z_index == self) continue;  // unit leading coefficient
                out[j - 1][i - 1].push_back({term.z_index, term.coeff.divided_by_g()});
            }
        }
    }
    return out;
}

std::vector<ResidualForm> build_res_div(const OmegaMap& map, const CanonicalData& cd) {
    std::vector<ResidualForm> out;
    out.reserve(cd.p);
    for (int j = 1; j <= cd.p; ++j) {
        out.push_back(omega_residual_form(map, cd, j).divided_by_g());
    }
    return out;
}

}  // namespace

Controller::Controller(CanonicalData cd, std::vector<GainSignal> block_gains,
                       ControllerConfig cfg, Options opts)
    : cd_(std::move(cd)), gains_(std::move(block_gains)), cfg_(std::move(cfg)) {
    if (static_cast<int>(gains_.size()) != cd_.p) {
        throw std::invalid_argument("Controller: need one gain signal per block");
    }
    int rmax = 1;
    for (int rj : cd_.r) rmax = std::max(rmax, rj);
    k_ = opts.k_override.value_or(k_exponent(rmax));
    map_ = build_omega_map(cd_, k_, /*adaptive=*/false);
    pos_div_ = build_pos_div(map_, cd_);
    res_div_ = build_res_div(map_, cd_);
}

OmegaEvalContext Controller::context(double t, const Vector& R) const {
    OmegaEvalContext ctx;
    ctx.t = t;
    ctx.gains = &gains_;
    ctx.filters.resize(cd_.p);
    for (int j = 0; j < cd_.p; ++j) ctx.filters[j] = {R(j), cfg_.lambdas[j]};
    return ctx;
}

std::vector<double> Controller::block_controls(const Vector& z, const OmegaEvalContext& ctx,
                                               const Vector& R,
                                               const std::vector<Vector>* alpha_override) const {
    std::vector<double> ub(cd_.p + 1, std::numeric_limits<double>::quiet_NaN());
    for (int j = cd_.p; j >= 1; --j) {
        const int rj = cd_.r[j - 1];
        const Vector& al = alpha_override ? (*alpha_override)[j - 1] : cd_.alpha[j - 1];
        double u = 0.0;
        for (int i = 1; i <= rj; ++i) {
            double s = 0.0;
            for (const OmegaTerm& term : pos_div_[j - 1][i - 1]) {
                s += ctx.eval(term.coeff) * z(term.z_index);
            }
            u -= al(rj - i) * s;  // alpha_{j, r_j - i + 1}
        }
        u -= omega_residual_derivative(res_div_[j - 1], ctx, z, ub);
        double om_last = 0.0;
        for (const OmegaTerm& term : map_.component(j, rj)) {
            om_last += ctx.eval(term.coeff) * z(term.z_index);
        }
        const double gj = gains_[j - 1].eval(ctx.t, 0);
        u -= std::pow(gj, k_ - 1) / (2.0 * R(j - 1)) * om_last;
        ub[j] = u;
    }
    return ub;
}

Vector Controller::control_from_z(const Vector& z, double t, const Vector& R) const {
    const OmegaEvalContext ctx = context(t, R);
    const std::vector<double> ub = block_controls(z, ctx, R, nullptr);
    Vector u = Vector::Zero(cd_.B_hat.cols());
    for (int j = 1; j <= cd_.p; ++j) u(cd_.block_input[j - 1]) = ub[j];
    return u;
}

Vector Controller::control(const Vector& x, double t, const Vector& R) const {
    return control_from_z(cd_.T * x, t, R);
}

Vector Controller::omega(const Vector& x, double t, const Vector& R) const {
    return map_.eval(context(t, R), cd_.T * x);
}

AdaptiveController::AdaptiveController(CanonicalData cd, std::vector<GainSignal> block_gains,
                                       AdaptiveConfig cfg)
    : cd_(std::move(cd)), gains_(std::move(block_gains)), cfg_(std::move(cfg)) {
    if (static_cast<int>(gains_.size()) != cd_.p) {
        throw std::invalid_argument("AdaptiveController: need one gain signal per block");
    }
    if (static_cast<int>(cfg_.nu.size()) != cd_.p ||
        static_cast<int>(cfg_.eta.size()) != cd_.p ||
        static_cast<int>(cfg_.alpha_hat0.size()) != cd_.p ||
        static_cast<int>(cfg_.lambda_hat0.size()) != cd_.p) {
        throw std::invalid_argument("AdaptiveController: per-block config size mismatch");
    }
    for (int j = 0; j < cd_.p; ++j) {
        if (!(cfg_.nu[j] > 0.0) || !(cfg_.lambda_hat0[j] > 0.0) ||
            cfg_.eta[j].size() != cd_.r[j] || (cfg_.eta[j].array() <= 0.0).any() ||
            cfg_.alpha_hat0[j].size() != cd_.r[j]) {
            throw std::invalid_argument("AdaptiveController: invalid adaptation gains");
        }
    }
    int rmax = 1;
    for (int rj : cd_.r) rmax = std::max(rmax, rj);
    k_ = k_exponent(rmax);
    map_ = build_omega_map(cd_, k_, /*adaptive=*/true);
    pos_div_ = build_pos_div(map_, cd_);
    res_div_ = build_res_div(map_, cd_);
    for (const ResidualForm& form : res_div_) {
        if (form.uses_downstream_alpha || !form.u_terms.empty()) {
            throw std::logic_error(
                "AdaptiveController: block profile needs true downstream coefficients, which "
                "the adaptive premise does not provide");
        }
    }
}

OmegaEvalContext AdaptiveController::context(double t, const Vector& R,
                                             const Vector& lambda_hat) const {
    OmegaEvalContext ctx;
    ctx.t = t;
    ctx.gains = &gains_;
    ctx.filters.resize(cd_.p);
    for (int j = 0; j < cd_.p; ++j) ctx.filters[j] = {R(j), lambda_hat(j)};
    return ctx;
}

AdaptiveController::Output AdaptiveController::control(
    const Vector& z, double t, const Vector& R, const Vector& lambda_hat,
    const std::vector<Vector>& alpha_hat) const {
    const OmegaEvalContext ctx = context(t, R, lambda_hat);
    std::vector<double> ub(cd_.p + 1, std::numeric_limits<double>::quiet_NaN());
    const Vector omega = map_.eval(ctx, z);

    Output out;
    out.u = Vector::Zero(cd_.B_hat.cols());
    out.alpha_hat_dot.resize(cd_.p);
    out.lambda_hat_dot = Vector::Zero(cd_.p);

    for (int j = cd_.p; j >= 1; --j) {
        const int rj = cd_.r[j - 1];
        const Vector& al = alpha_hat[j - 1];
        double u = 0.0;
        Vector adot = Vector::Zero(rj);
        double omega_sq = 0.0;
        const double om_last = omega(cd_.z_index(j, rj));
        for (int i = 1; i <= rj; ++i) {
            double s = 0.0;
            for (const OmegaTerm& term : pos_div_[j - 1][i - 1]) {
                s += ctx.eval(term.coeff) * z(term.z_index);
            }
            u -= al(rj - i) * s;
            const int idx = cd_.z_index(j, i);
            const double raw = omega(idx) - z(idx);
            adot(rj - i) = 2.0 * cfg_.eta[j - 1](i - 1) * R(j - 1) * om_last * raw;
            omega_sq += omega(idx) * omega(idx);
        }
        u -= omega_residual_derivative(res_div_[j - 1], ctx, z, ub);
        const double gj = gains_[j - 1].eval(t, 0);
        u -= std::pow(gj, k_ - 1) / (2.0 * R(j - 1)) * om_last;
        ub[j] = u;
        out.u(cd_.block_input[j - 1]) = u;
        out.alpha_hat_dot[j - 1] = adot;
        out.lambda_hat_dot(j - 1) = cfg_.nu[j - 1] * R(j - 1) * omega_sq;
    }
    return out;
}

}  // namespace pfc
