#include "pfc/gain_poly.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace pfc {

int GainMonoKey::g_exponent(int order) const {
    for (const auto& [d, e] : g) {
        if (d == order) return e;
    }
    return 0;
}

GainMonoKey GainMonoKey::with_g_bump(int order, int delta) const {
    GainMonoKey out = *this;
    for (auto it = out.g.begin(); it != out.g.end(); ++it) {
        if (it->first == order) {
            it->second += delta;
            if (it->second == 0) out.g.erase(it);
            return out;
        }
        if (it->first > order) {
            out.g.insert(it, {order, delta});
            return out;
        }
    }
    out.g.push_back({order, delta});
    return out;
}

GainPoly GainPoly::constant(double c, int block) {
    GainPoly p(block);
    p.add_term(GainMonoKey{}, c);
    return p;
}

GainPoly GainPoly::monomial(double coeff, GainMonoKey key, int block) {
    GainPoly p(block);
    p.add_term(key, coeff);
    return p;
}

void GainPoly::add_term(const GainMonoKey& key, double coeff) {
    if (coeff == 0.0) return;
    auto [it, inserted] = terms_.try_emplace(key, coeff);
    if (!inserted) {
        it->second += coeff;
        if (it->second == 0.0) terms_.erase(it);
    }
}

int GainPoly::divisibility() const {
    if (terms_.empty()) return std::numeric_limits<int>::max();
    int d = std::numeric_limits<int>::max();
    for (const auto& [key, c] : terms_) d = std::min(d, key.g_exponent(0));
    return d;
}

GainPoly GainPoly::differentiated(int k, bool adaptive_lambda) const {
    GainPoly out(block_);
    for (const auto& [key, c] : terms_) {
        if (key.lambda_pow > 0 && adaptive_lambda) {
            throw std::logic_error(
                "GainPoly: cannot differentiate a lambda_hat-carrying monomial in adaptive "
                "mode (lambda_hat is a sampled scalar)");
        }
        // gain factors
        for (const auto& [d, e] : key.g) {
            GainMonoKey nk = key.with_g_bump(d, -1).with_g_bump(d + 1, +1);
            out.add_term(nk, c * e);
        }
        // R^{-q} factor via the filter dynamics
        if (key.R_pow > 0) {
            GainMonoKey lam = key;
            lam.lambda_pow += 1;
            out.add_term(lam, c * key.R_pow);
            GainMonoKey forced = key.with_g_bump(0, k);
            forced.R_pow += 1;
            out.add_term(forced, -c * key.R_pow);
        }
    }
    return out;
}

GainPoly GainPoly::divided_by_g() const {
    GainPoly out(block_);
    for (const auto& [key, c] : terms_) {
        if (key.g_exponent(0) < 1) {
            throw NotDivisible("GainPoly: monomial carries no factor of g (block " +
                               std::to_string(block_) + "); k exponent too small");
        }
        out.add_term(key.with_g_bump(0, -1), c);
    }
    return out;
}

GainPoly GainPoly::times_weight(int k) const {
    GainPoly out(block_);
    for (const auto& [key, c] : terms_) {
        GainMonoKey nk = key.with_g_bump(0, k);
        nk.R_pow += 1;
        out.add_term(nk, 0.5 * c);
    }
    return out;
}

GainPoly GainPoly::scaled(double s) const {
    GainPoly out(block_);
    for (const auto& [key, c] : terms_) out.add_term(key, c * s);
    return out;
}

GainPoly& GainPoly::add(const GainPoly& other) {
    if (terms_.empty() && block_ == 0) block_ = other.block_;
    if (!other.terms_.empty() && other.block_ != block_) {
        throw std::logic_error("GainPoly: cannot add polynomials of different blocks");
    }
    for (const auto& [key, c] : other.terms_) add_term(key, c);
    return *this;
}

double GainPoly::eval(const GainSignal& sig, double t, double R, double lambda) const {
    double total = 0.0;
    for (const auto& [key, c] : terms_) {
        double v = c;
        for (int i = 0; i < key.lambda_pow; ++i) v *= lambda;
        for (const auto& [d, e] : key.g) {
            const double gd = sig.eval(t, d);
            for (int i = 0; i < e; ++i) v *= gd;
        }
        for (int i = 0; i < key.R_pow; ++i) v /= R;
        total += v;
    }
    return total;
}

std::string GainPoly::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [key, c] : terms_) {
        if (!first) os << "\n";
        first = false;
        os << c;
        if (key.lambda_pow > 0) os << " lam^" << key.lambda_pow;
        for (const auto& [d, e] : key.g) os << " g" << d << "^" << e;
        if (key.R_pow > 0) os << " R^-" << key.R_pow;
    }
    return os.str();
}

}  // namespace pfc
