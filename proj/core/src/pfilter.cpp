#include "pfc/pfilter.hpp"

#include <cmath>

namespace pfc {

int k_exponent(int r) {
    if (r < 1) throw std::invalid_argument("k_exponent: block size must be >= 1");
    int p2 = 1;
    while (p2 < r) p2 <<= 1;
    return p2 < 2 ? 2 : p2;
}

double filter_rhs(double R, double lambda_now, double g, int k) {
    double gk = 1.0;
    for (int i = 0; i < k; ++i) gk *= g;
    return -lambda_now * R + gk;
}

double filter_rhs(const PersistenceFilter& f, double g) {
    return filter_rhs(f.R, f.lambda_now(), g, f.k);
}

double adaptive_lambda_rhs(double nu, double R,
                           const Eigen::Ref<const Eigen::VectorXd>& omega_block) {
    if (!(nu > 0.0)) throw std::invalid_argument("adaptive_lambda_rhs: nu must be positive");
    if (!(R > 0.0)) throw std::invalid_argument("adaptive_lambda_rhs: R must be positive");
    return nu * R * omega_block.squaredNorm();
}

FilterBounds filter_bounds_estimate(const GainSignal& sig, double lambda, int k, double R0,
                                    double horizon, double dt, double settle) {
    if (!(R0 > 0.0)) throw std::invalid_argument("filter_bounds_estimate: R(0) must be > 0");
    if (!(dt > 0.0) || !(horizon > 0.0)) {
        throw std::invalid_argument("filter_bounds_estimate: need positive dt, horizon");
    }

    {
        // total energy over the horizon; identically-zero gain is not PE
        double total = 0.0;
        const long long cells = std::llround(horizon / dt);
        for (long long i = 0; i < cells; ++i) {
            const double g = sig.eval((i + 0.5) * dt, 0);
            total += g * g * dt;
        }
        if (total <= 0.0) {
            throw NotPE("filter_bounds_estimate: gain carries no energy over the horizon");
        }
    }

    const long long steps = std::llround(horizon / dt);
    double R = R0;
    FilterBounds b;
    bool seeded = false;
    auto record = [&](double t, double value) {
        if (t < settle) return;
        if (!seeded) {
            b.R_min = b.R_max = value;
            seeded = true;
        } else {
            b.R_min = std::min(b.R_min, value);
            b.R_max = std::max(b.R_max, value);
        }
    };
    record(0.0, R);
    for (long long i = 0; i < steps; ++i) {
        const double t = i * dt;
        const double k1 = filter_rhs(R, lambda, sig.eval(t, 0), k);
        const double k2 = filter_rhs(R + 0.5 * dt * k1, lambda, sig.eval(t + 0.5 * dt, 0), k);
        const double k3 = filter_rhs(R + 0.5 * dt * k2, lambda, sig.eval(t + 0.5 * dt, 0), k);
        const double k4 = filter_rhs(R + dt * k3, lambda, sig.eval(t + dt, 0), k);
        R += dt / 6.0 * (k1 + 2.0 * (k2 + k3) + k4);
        record(t + dt, R);
    }
    return b;
}

}  // namespace pfc
