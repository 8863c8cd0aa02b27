#include "pfc/augmentation.hpp"

#include <cmath>
#include <map>
#include <sstream>

namespace pfc {

double OmegaEvalContext::eval(const GainPoly& coeff) const {
    const int b = coeff.block();
    return coeff.eval((*gains)[b - 1], t, filters[b - 1].R, filters[b - 1].lambda);
}

const std::vector<OmegaTerm>& OmegaMap::component(int j, int i) const {
    return comps_[j - 1][i - 1];
}

Matrix OmegaMap::weight_matrix(const OmegaEvalContext& ctx) const {
    Matrix W = Matrix::Zero(n_, n_);
    for (int j = 1; j <= p_; ++j) {
        for (int i = 1; i <= r_[j - 1]; ++i) {
            const int row = z_index(j, i);
            for (const OmegaTerm& term : comps_[j - 1][i - 1]) {
                W(row, term.z_index) += ctx.eval(term.coeff);
            }
        }
    }
    return W;
}

Vector OmegaMap::eval(const OmegaEvalContext& ctx, const Vector& z) const {
    Vector omega = Vector::Zero(n_);
    for (int j = 1; j <= p_; ++j) {
        for (int i = 1; i <= r_[j - 1]; ++i) {
            double acc = 0.0;
            for (const OmegaTerm& term : comps_[j - 1][i - 1]) {
                acc += ctx.eval(term.coeff) * z(term.z_index);
            }
            omega(z_index(j, i)) = acc;
        }
    }
    return omega;
}

Vector OmegaMap::invert(const OmegaEvalContext& ctx, const Vector& omega) const {
    // W is unit lower triangular in the global ordering (downstream blocks
    // come first), so a forward substitution recovers z exactly.
    const Matrix W = weight_matrix(ctx);
    Vector z = Vector::Zero(n_);
    for (int row = 0; row < n_; ++row) {
        double acc = omega(row);
        for (int col = 0; col < row; ++col) acc -= W(row, col) * z(col);
        z(row) = acc;
    }
    return z;
}

std::string OmegaMap::dump() const {
    std::ostringstream os;
    for (int j = 1; j <= p_; ++j) {
        for (int i = 1; i <= r_[j - 1]; ++i) {
            for (const OmegaTerm& term : comps_[j - 1][i - 1]) {
                std::istringstream lines(term.coeff.to_string());
                std::string line;
                while (std::getline(lines, line)) {
                    os << "Omega[" << j << "," << i << "] z[" << term.z_index << "] " << line
                       << "\n";
                }
            }
        }
    }
    return os.str();
}

namespace {

// working representation during the build: target z index -> coefficient
using TermMap = std::map<int, GainPoly>;

void acc(TermMap& into, int z_index, const GainPoly& coeff) {
    if (coeff.is_zero()) return;
    auto [it, inserted] = into.try_emplace(z_index, coeff);
    if (!inserted) {
        it->second.add(coeff);
        if (it->second.is_zero()) into.erase(it);
    }
}

std::vector<OmegaTerm> flatten(const TermMap& m) {
    std::vector<OmegaTerm> out;
    out.reserve(m.size());
    for (const auto& [idx, poly] : m) out.push_back({idx, poly});
    return out;
}

struct Layout {
    const CanonicalData& cd;
    // reverse lookup: global z index -> (block, level)
    std::pair<int, int> locate(int z_index) const {
        for (int j = 1; j <= cd.p; ++j) {
            const int off = cd.block_offset(j);
            if (z_index >= off && z_index < off + cd.r[j - 1]) {
                return {j, z_index - off + 1};
            }
        }
        throw std::logic_error("OmegaMap: z index out of range");
    }
};

}  // namespace

OmegaMap build_omega_map(const CanonicalData& cd, int k, bool adaptive) {
    OmegaMap map;
    map.p_ = cd.p;
    map.n_ = cd.n();
    map.k_ = k;
    map.adaptive_ = adaptive;
    map.r_ = cd.r;
    map.offset_.resize(cd.p);
    for (int j = 1; j <= cd.p; ++j) map.offset_[j - 1] = cd.block_offset(j);
    map.comps_.assign(cd.p, {});

    const Layout layout{cd};
    for (int j = 1; j <= cd.p; ++j) {
        const int rj = cd.r[j - 1];
        std::vector<TermMap> comp(rj);
        acc(comp[0], cd.z_index(j, 1), GainPoly::constant(1.0, j));

        for (int i = 1; i < rj; ++i) {
            TermMap next;
            for (const auto& [idx, c] : comp[i - 1]) {
                // d/dt coeff * z
                acc(next, idx, c.differentiated(k, adaptive));
                // coeff * zdot, substituting the canonical row
                const auto [b, l] = layout.locate(idx);
                if (l < cd.r[b - 1]) {
                    acc(next, idx + 1, c);
                    for (int s = b + 1; s <= cd.p; ++s) {
                        const double beta = cd.beta_of(b, s, l);
                        if (beta != 0.0) acc(next, cd.z_index(s, 1), c.scaled(beta));
                    }
                } else {
                    throw std::domain_error(
                        "build_omega_map: recursion for block " + std::to_string(j) +
                        " reached the controlled row of block " + std::to_string(b) +
                        "; this block-size profile is unsupported at map level");
                }
            }
            // + (g^k / 2R) * Omega_{j,i}
            for (const auto& [idx, c] : comp[i - 1]) acc(next, idx, c.times_weight(k));
            // - sum_{s>j} beta_{j,s,i} * Omega_{s,1}
            for (int s = j + 1; s <= cd.p; ++s) {
                const double beta = cd.beta_of(j, s, i);
                if (beta != 0.0) {
                    acc(next, cd.z_index(s, 1), GainPoly::constant(-beta, j));
                }
            }
            comp[i] = std::move(next);
        }

        map.comps_[j - 1].resize(rj);
        for (int i = 0; i < rj; ++i) map.comps_[j - 1][i] = flatten(comp[i]);
    }
    return map;
}

int ResidualForm::divisibility() const {
    int d = std::numeric_limits<int>::max();
    for (const auto& term : z_terms) d = std::min(d, term.coeff.divisibility());
    for (const auto& term : u_terms) d = std::min(d, term.coeff.divisibility());
    return d;
}

ResidualForm ResidualForm::divided_by_g() const {
    ResidualForm out;
    out.block = block;
    out.uses_downstream_alpha = uses_downstream_alpha;
    for (const auto& term : z_terms) out.z_terms.push_back({term.z_index, term.coeff.divided_by_g()});
    for (const auto& term : u_terms) {
        out.u_terms.push_back({term.source_block, term.coeff.divided_by_g()});
    }
    return out;
}

ResidualForm omega_residual_form(const OmegaMap& map, const CanonicalData& cd, int block) {
    const int rj = map.block_size(block);
    const int last = cd.z_index(block, rj);
    const Layout layout{cd};

    // E = Omega_{j,r_j} - z_{j,r_j}; the leading coefficient is exactly 1.
    TermMap E;
    for (const OmegaTerm& term : map.component(block, rj)) acc(E, term.z_index, term.coeff);
    acc(E, last, GainPoly::constant(-1.0, block));

    TermMap z_out;
    std::map<int, GainPoly> u_out;
    bool used_alpha = false;
    for (const auto& [idx, c] : E) {
        acc(z_out, idx, c.differentiated(map.k(), map.adaptive()));
        const auto [b, l] = layout.locate(idx);
        if (l < cd.r[b - 1]) {
            acc(z_out, idx + 1, c);
            for (int s = b + 1; s <= cd.p; ++s) {
                const double beta = cd.beta_of(b, s, l);
                if (beta != 0.0) acc(z_out, cd.z_index(s, 1), c.scaled(beta));
            }
        } else {
            // controlled row: zdot_{b,r_b} = -sum_i alpha_{b,r_b-i+1} z_{b,i}
            //                  + sum_{s>b} beta_{b,s,r_b} z_{s,1} + g_b u_b
            used_alpha = used_alpha || (b != block);
            const Vector& al = cd.alpha[b - 1];
            for (int i = 1; i <= cd.r[b - 1]; ++i) {
                const double a = al(cd.r[b - 1] - i + 1 - 1);
                if (a != 0.0) acc(z_out, cd.z_index(b, i), c.scaled(-a));
            }
            for (int s = b + 1; s <= cd.p; ++s) {
                const double beta = cd.beta_of(b, s, cd.r[b - 1]);
                if (beta != 0.0) acc(z_out, cd.z_index(s, 1), c.scaled(beta));
            }
            auto [it, inserted] = u_out.try_emplace(b, c);
            if (!inserted) it->second.add(c);
        }
    }

    ResidualForm form;
    form.block = block;
    form.uses_downstream_alpha = used_alpha;
    form.z_terms = flatten(z_out);
    for (const auto& [b, c] : u_out) {
        if (!c.is_zero()) form.u_terms.push_back({b, c});
    }
    return form;
}

double omega_residual_derivative(const ResidualForm& form, const OmegaEvalContext& ctx,
                                 const Vector& z, const std::vector<double>& downstream_u) {
    double total = 0.0;
    for (const auto& term : form.z_terms) total += ctx.eval(term.coeff) * z(term.z_index);
    for (const auto& term : form.u_terms) {
        const int s = term.source_block;
        if (s >= static_cast<int>(downstream_u.size()) || std::isnan(downstream_u[s])) {
            throw MissingDownstreamControl(
                "omega_residual_derivative: control of downstream block " + std::to_string(s) +
                " required before block " + std::to_string(form.block));
        }
        const double gs = (*ctx.gains)[s - 1].eval(ctx.t, 0);
        total += ctx.eval(term.coeff) * gs * downstream_u[s];
    }
    return total;
}

}  // namespace pfc
