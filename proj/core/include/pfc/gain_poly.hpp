#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pfc/errors.hpp"
#include "pfc/gains.hpp"

namespace pfc {

/// One monomial coeff * lambda^lambda_pow * prod_d (g^(d))^{e_d} * R^{-R_pow}.
/// `g` holds (derivative order, exponent) pairs, sorted, exponents >= 1.
struct GainMonoKey {
    int lambda_pow = 0;
    int R_pow = 0;
    std::vector<std::pair<int, int>> g;

    auto operator<=>(const GainMonoKey&) const = default;

    int g_exponent(int order) const;
    GainMonoKey with_g_bump(int order, int delta) const;
};

/// Formal sum of monomials in derivatives of one block's gain g and inverse
/// powers of its filter state R. Closed under exactly the operations the
/// augmented-state recurrences need: d/dt (with Rdot = -lambda R + g^k
/// substituted), multiplication by g^k/(2R), scalar combination, and the
/// symbolic division by g that the control law performs.
class GainPoly {
public:
    GainPoly() = default;
    explicit GainPoly(int block) : block_(block) {}

    static GainPoly zero(int block) { return GainPoly(block); }
    static GainPoly constant(double c, int block);
    static GainPoly monomial(double coeff, GainMonoKey key, int block);

    int block() const { return block_; }
    bool is_zero() const { return terms_.empty(); }
    const std::map<GainMonoKey, double>& terms() const { return terms_; }

    /// Min over monomials of the exponent of the underived gain; this is the
    /// number of symbolic g divisions the polynomial supports. Zero poly
    /// reports a large value (divisible by anything).
    int divisibility() const;

    /// Product-rule time derivative. g^(d) -> g^(d+1); d/dt R^{-q} =
    /// q lambda R^{-q} - q g^k R^{-q-1}. In adaptive mode lambda_hat is a
    /// sampled scalar, so differentiating a lambda-carrying monomial is not
    /// representable and raises.
    GainPoly differentiated(int k, bool adaptive_lambda) const;

    /// Decrements the underived-g exponent of every monomial; raises
    /// NotDivisible when some monomial has none left (k chosen too small).
    GainPoly divided_by_g() const;

    /// Multiplication by the recurrence weight g^k / (2R).
    GainPoly times_weight(int k) const;

    GainPoly scaled(double s) const;
    GainPoly& add(const GainPoly& other);  // same block required

    /// Numeric value at time t with filter snapshot (R, lambda).
    double eval(const GainSignal& sig, double t, double R, double lambda) const;

    /// One monomial per line: coeff, g-derivative exponents, R power.
    std::string to_string() const;

private:
    int block_ = 0;  // 1-based canonical block owning (g, R)
    std::map<GainMonoKey, double> terms_;

    void add_term(const GainMonoKey& key, double coeff);
};

}  // namespace pfc
