#include "fiscids/transform.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fiscids {

namespace {

std::string fresh_name(const std::vector<std::string>& taken, const std::string& candidate,
                       const std::string& fallback_prefix, std::size_t i) {
    auto used = [&](const std::string& s) {
        return std::find(taken.begin(), taken.end(), s) != taken.end();
    };
    if (!used(candidate)) return candidate;
    std::string alt = fallback_prefix + std::to_string(i + 1);
    while (used(alt)) alt += "_";
    return alt;
}

// One deduplicated denominator with its content-free core for matching.
struct BasisEntry {
    Poly rep;      // the representative denominator as it appeared
    Rational c;    // rep = c * core
    Poly core;
};

struct DenCollection {
    std::vector<BasisEntry> basis;

    // Returns (index, power, scale) with 1/den = scale * beta_index^power.
    struct Use {
        std::size_t index;
        unsigned power;
        Rational scale;
    };

    Use resolve(const Poly& den) const {
        auto [c_d, core_d] = den.content_normalized();
        unsigned deg_d = core_d.total_degree();
        for (std::size_t i = 0; i < basis.size(); ++i) {
            unsigned deg_b = basis[i].core.total_degree();
            if (deg_b == 0 || deg_d % deg_b != 0) continue;
            unsigned k = deg_d / deg_b;
            if (k == 0) continue;
            if (basis[i].core.pow(k) == core_d) {
                // den = c_d * core_b^k = (c_d / c_b^k) * rep^k.
                Rational scale = rational_pow(basis[i].c, static_cast<long>(k)) / c_d;
                return {i, k, scale};
            }
        }
        throw Error("denominator not covered by the collected basis");
    }
};

DenCollection collect_denominators(const FiscidsSystem& sys) {
    // Gather nonconstant denominators in deterministic entry order, then sort
    // by core degree so roots are registered before their powers.
    std::vector<Poly> seen;
    auto visit = [&](const RationalFn& entry) {
        if (entry.is_polynomial()) return;
        auto [c, core] = entry.den.content_normalized();
        for (const Poly& s : seen)
            if (s.content_normalized().second == core) return;
        seen.push_back(entry.den);
    };
    for (const auto& row : sys.F)
        for (const auto& entry : row) visit(entry);
    for (const auto& entry : sys.h) visit(entry);

    std::stable_sort(seen.begin(), seen.end(), [](const Poly& a, const Poly& b) {
        return a.total_degree() < b.total_degree();
    });

    DenCollection out;
    for (const Poly& den : seen) {
        auto [c, core] = den.content_normalized();
        bool covered = false;
        for (const BasisEntry& b : out.basis) {
            unsigned deg_b = b.core.total_degree();
            if (deg_b == 0 || core.total_degree() % deg_b != 0) continue;
            unsigned k = core.total_degree() / deg_b;
            if (k >= 1 && b.core.pow(k) == core) {
                covered = true;
                break;
            }
        }
        if (!covered) out.basis.push_back({den, c, core});
    }
    return out;
}

}  // namespace

DenominatorBasis denominator_basis(const FiscidsSystem& sys) {
    DenominatorBasis out;
    for (const BasisEntry& b : collect_denominators(sys).basis)
        out.denominators.push_back(b.rep);
    return out;
}

FiscidsSystem r_to_p(const FiscidsSystem& sys) {
    if (!validate_class(sys, SystemClass::Rational).pass)
        throw ClassError("r_to_p requires a rational-class system");
    check_system(sys);

    DenCollection dens = collect_denominators(sys);
    std::size_t N = sys.N, M = dens.basis.size(), NE = N + M;

    // Denominators must not vanish at the initial state; use exact arithmetic
    // when every z0 entry is an exact rational.
    bool exact = true;
    std::vector<Rational> z0_exact;
    for (const Expr& e : sys.z0) {
        if (e.kind() == ExprKind::Const)
            z0_exact.push_back(e.value());
        else
            exact = false;
    }
    std::vector<double> z0_values = sys.z0_values();
    for (std::size_t i = 0; i < M; ++i) {
        if (exact) {
            if (dens.basis[i].rep.eval_exact(z0_exact) == 0) throw DenominatorVanishesAtBase(i);
        } else if (dens.basis[i].rep.eval(z0_values) == 0.0) {
            throw DenominatorVanishesAtBase(i);
        }
    }

    // Rewrite num/den entries as polynomials of (z, beta).
    auto rewrite = [&](const RationalFn& entry) -> Poly {
        if (entry.is_polynomial()) return entry.to_polynomial().padded(NE);
        DenCollection::Use use = dens.resolve(entry.den);
        Monomial beta_pow = Monomial::unit(NE);
        beta_pow.exponents[N + use.index] = use.power;
        return (entry.num.padded(NE) * Poly::from_term(NE, beta_pow, use.scale));
    };

    FiscidsSystem out;
    out.n = sys.n;
    out.m = sys.m;
    out.N = NE;
    out.cls = SystemClass::Polynomial;
    out.input_names = sys.input_names;
    out.state_names = sys.state_names;
    for (std::size_t i = 0; i < M; ++i)
        out.state_names.push_back(
            fresh_name(out.state_names, "z" + std::to_string(N + i + 1), "beta", i));
    out.base_point = sys.base_point;

    std::vector<std::vector<Poly>> F_top;  // original rows, rewritten
    for (std::size_t i = 0; i < N; ++i) {
        std::vector<Poly> row;
        for (std::size_t j = 0; j < sys.n; ++j) row.push_back(rewrite(sys.F[i][j]));
        F_top.push_back(std::move(row));
    }
    for (std::size_t i = 0; i < N; ++i) {
        std::vector<RationalFn> row;
        for (std::size_t j = 0; j < sys.n; ++j) row.push_back(rat_from_poly(F_top[i][j]));
        out.F.push_back(std::move(row));
    }
    // dbeta_i = -beta_i^2 * sum_j (dd_i/dz_j) * dz_j.
    for (std::size_t i = 0; i < M; ++i) {
        Monomial beta_sq = Monomial::unit(NE);
        beta_sq.exponents[N + i] = 2;
        Poly beta_sq_poly = Poly::from_term(NE, beta_sq, Rational(-1));
        std::vector<RationalFn> row;
        for (std::size_t l = 0; l < sys.n; ++l) {
            Poly acc(NE);
            for (std::size_t j = 0; j < N; ++j) {
                Poly dd = dens.basis[i].rep.partial(j);
                if (dd.is_zero()) continue;
                acc += dd.padded(NE) * F_top[j][l];
            }
            row.push_back(rat_from_poly(beta_sq_poly * acc));
        }
        out.F.push_back(std::move(row));
    }

    for (const auto& entry : sys.h) out.h.push_back(rat_from_poly(rewrite(entry)));

    out.z0 = sys.z0;
    std::vector<VarId> states = sys.state_vars();
    for (std::size_t i = 0; i < M; ++i) {
        Expr den_expr = substitute(poly_to_expr(dens.basis[i].rep, states),
                                   [&](const VarId& v) -> std::optional<Expr> {
                                       return sys.z0[static_cast<std::size_t>(v.index)];
                                   });
        out.z0.push_back(Expr::div(Expr::constant(1), den_expr));
    }

    check_system(out);
    return out;
}

namespace {

// Degree ascending, lexicographically descending within one degree; this
// lists low-order composites like z2*z3 ahead of z3^2.
bool gamma_order(const Monomial& a, const Monomial& b) {
    if (a.degree() != b.degree()) return a.degree() < b.degree();
    return a.exponents > b.exponents;
}

}  // namespace

MonomialDictionary build_monomial_dictionary(const FiscidsSystem& sys) {
    std::size_t N = sys.N;
    ExponentSet exponents;
    auto visit = [&](const RationalFn& entry) {
        Poly p = entry.to_polynomial();
        for (const auto& [mono, coeff] : p.terms()) exponents.elements.insert(mono);
    };
    for (const auto& row : sys.F)
        for (const auto& entry : row) visit(entry);
    for (const auto& entry : sys.h) visit(entry);
    // The original states are always part of the dictionary, so their
    // trajectories stay recoverable and the output map can stay affine.
    for (std::size_t j = 0; j < N; ++j) exponents.elements.insert(Monomial::axis(N, j));

    ExponentSet closed = divisor_closure(exponents);

    MonomialDictionary dict;
    for (std::size_t j = 0; j < N; ++j) dict.gamma.push_back(Monomial::axis(N, j));
    std::vector<Monomial> composites;
    for (const Monomial& m : closed.elements)
        if (m.degree() >= 2) composites.push_back(m);
    std::sort(composites.begin(), composites.end(), gamma_order);
    dict.gamma.insert(dict.gamma.end(), composites.begin(), composites.end());
    for (std::size_t k = 0; k < dict.gamma.size(); ++k) dict.index[dict.gamma[k]] = k;
    return dict;
}

FiscidsSystem p_to_q(const FiscidsSystem& sys) {
    if (!validate_class(sys, SystemClass::Polynomial).pass)
        throw ClassError("p_to_q requires a polynomial-class system");
    check_system(sys);

    MonomialDictionary dict = build_monomial_dictionary(sys);
    std::size_t N = sys.N, M = dict.gamma.size();

    // Affine rewrite over the dictionary: constant terms stay constant, every
    // other monomial is a dictionary state by construction of the closure.
    auto affine = [&](const Poly& p) -> Poly {
        Poly out(M);
        for (const auto& [mono, coeff] : p.terms()) {
            if (mono.degree() == 0) {
                out.add_term(Monomial::unit(M), coeff);
                continue;
            }
            auto it = dict.index.find(mono);
            if (it == dict.index.end()) throw Error("monomial missing from dictionary");
            out.add_term(Monomial::axis(M, it->second), coeff);
        }
        return out;
    };

    std::vector<std::vector<Poly>> F_affine;  // N x n, affine in gamma
    for (const auto& row : sys.F) {
        std::vector<Poly> out_row;
        for (const auto& entry : row) out_row.push_back(affine(entry.to_polynomial()));
        F_affine.push_back(std::move(out_row));
    }

    // G[k][j] = d(gamma_k)/dz_j, affine in gamma since the closure is
    // divisor-closed.
    auto derivative_affine = [&](std::size_t k, std::size_t j) -> Poly {
        Poly out(M);
        const Monomial& mono = dict.gamma[k];
        unsigned e = mono.exponents[j];
        if (e == 0) return out;
        Monomial down = mono;
        down.exponents[j] -= 1;
        if (down.degree() == 0) {
            out.add_term(Monomial::unit(M), Rational(e));
        } else {
            auto it = dict.index.find(down);
            if (it == dict.index.end()) throw Error("closure is not divisor-closed");
            out.add_term(Monomial::axis(M, it->second), Rational(e));
        }
        return out;
    };

    FiscidsSystem out;
    out.n = sys.n;
    out.m = sys.m;
    out.N = M;
    out.cls = SystemClass::Quadratic;
    out.input_names = sys.input_names;
    out.base_point = sys.base_point;
    for (std::size_t k = 0; k < M; ++k) {
        if (k < N) {
            out.state_names.push_back(sys.state_names[k]);
        } else {
            out.state_names.push_back(
                fresh_name(out.state_names, "z" + std::to_string(k + 1), "g", k));
        }
    }

    // dgamma_k/dt = sum_j G[k][j] * (row j of the affine system matrix).
    for (std::size_t k = 0; k < M; ++k) {
        std::vector<RationalFn> row;
        for (std::size_t l = 0; l < sys.n; ++l) {
            Poly acc(M);
            for (std::size_t j = 0; j < N; ++j) {
                if (dict.gamma[k].exponents[j] == 0) continue;
                acc += derivative_affine(k, j) * F_affine[j][l];
            }
            row.push_back(rat_from_poly(acc));
        }
        out.F.push_back(std::move(row));
    }
    for (const auto& entry : sys.h) out.h.push_back(rat_from_poly(affine(entry.to_polynomial())));

    // Initial state: the dictionary monomials evaluated at z0, exactly.
    for (std::size_t k = 0; k < M; ++k) {
        std::vector<Expr> factors;
        for (std::size_t j = 0; j < N; ++j)
            if (dict.gamma[k].exponents[j] > 0)
                factors.push_back(Expr::ipow(sys.z0[j], dict.gamma[k].exponents[j]));
        out.z0.push_back(Expr::mul(std::move(factors)));
    }

    check_system(out);
    return out;
}

}  // namespace fiscids
