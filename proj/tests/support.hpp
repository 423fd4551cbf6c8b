#pragma once

#include <random>
#include <vector>

#include "fiscids/expr.hpp"
#include "fiscids/poly.hpp"
#include "fiscids/system.hpp"

namespace testsupport {

using fiscids::Expr;
using fiscids::FuncKind;
using fiscids::Monomial;
using fiscids::Poly;
using fiscids::Rational;
using fiscids::VarId;

using Rng = std::mt19937_64;

inline int rand_int(Rng& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline double rand_double(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Rational rand_rational(Rng& rng, int num_range, int den_max) {
    int num = rand_int(rng, -num_range, num_range);
    int den = rand_int(rng, 1, den_max);
    return Rational(num, den);
}

inline Rational rand_nonzero_rational(Rng& rng, int num_range, int den_max) {
    Rational r = rand_rational(rng, num_range, den_max);
    return r == 0 ? Rational(1, den_max) : r;
}

// Expressions built so every function argument is globally in-domain:
// logarithms and square roots see arguments bounded below by 2, quotient
// denominators are bounded below by 1, and exp/tan arguments are scaled down.
inline Expr random_expr(Rng& rng, const std::vector<VarId>& vars, int depth) {
    auto positive_wrap = [&](const Expr& u) {
        return Expr::add({Expr::constant(2),
                          Expr::mul({Expr::constant(Rational(1, 4)), Expr::ipow(u, 2)})});
    };
    auto safe_den = [&](const Expr& u) {
        return Expr::add({Expr::constant(1),
                          Expr::mul({Expr::constant(Rational(1, 4)), Expr::ipow(u, 2)})});
    };
    auto shrink = [&](const Expr& u) {
        return Expr::mul({Expr::constant(Rational(1, 4)), u});
    };
    if (depth <= 0 || rand_int(rng, 0, 3) == 0) {
        if (rand_int(rng, 0, 2) == 0) return Expr::constant(rand_rational(rng, 4, 3));
        return Expr::variable(vars[static_cast<std::size_t>(
            rand_int(rng, 0, static_cast<int>(vars.size()) - 1))]);
    }
    switch (rand_int(rng, 0, 11)) {
        case 0:
        case 1:
            return Expr::add({random_expr(rng, vars, depth - 1),
                              random_expr(rng, vars, depth - 1)});
        case 2:
        case 3:
            return Expr::mul({random_expr(rng, vars, depth - 1),
                              random_expr(rng, vars, depth - 1)});
        case 4:
            return Expr::div(random_expr(rng, vars, depth - 1),
                             safe_den(random_expr(rng, vars, depth - 1)));
        case 5:
            return Expr::ipow(random_expr(rng, vars, depth - 1), rand_int(rng, 2, 3));
        case 6:
            return Expr::call(FuncKind::Exp, shrink(random_expr(rng, vars, depth - 1)));
        case 7:
            return Expr::call(FuncKind::Log, positive_wrap(random_expr(rng, vars, depth - 1)));
        case 8:
            return Expr::call(rand_int(rng, 0, 1) ? FuncKind::Sin : FuncKind::Cos,
                              random_expr(rng, vars, depth - 1));
        case 9:
            return Expr::call(FuncKind::Tan, shrink(random_expr(rng, vars, depth - 1)));
        case 10:
            return Expr::call(FuncKind::Atan, random_expr(rng, vars, depth - 1));
        default:
            if (rand_int(rng, 0, 1))
                return Expr::call(FuncKind::Sqrt,
                                  positive_wrap(random_expr(rng, vars, depth - 1)));
            return Expr::rpow(positive_wrap(random_expr(rng, vars, depth - 1)),
                              Rational(3, 2));
    }
}

inline Monomial random_monomial(Rng& rng, std::size_t nvars, unsigned max_degree) {
    Monomial m = Monomial::unit(nvars);
    unsigned budget = static_cast<unsigned>(rand_int(rng, 0, static_cast<int>(max_degree)));
    for (unsigned d = 0; d < budget; ++d) {
        std::size_t j = static_cast<std::size_t>(
            rand_int(rng, 0, static_cast<int>(nvars) - 1));
        m.exponents[j] += 1;
    }
    return m;
}

inline Poly random_poly(Rng& rng, std::size_t nvars, unsigned max_degree, int max_terms) {
    Poly p(nvars);
    int terms = rand_int(rng, 1, max_terms);
    for (int t = 0; t < terms; ++t)
        p.add_term(random_monomial(rng, nvars, max_degree), rand_rational(rng, 9, 4));
    return p;
}

// Small rational-class systems whose trajectories stay bounded on [0,1] for
// inputs in [-1/4, 1/4]: coefficients are small, and every denominator has
// the form 1 + (affine)^2, hence is at least 1 everywhere.
inline fiscids::FiscidsSystem random_rational_system(Rng& rng) {
    using fiscids::FiscidsSystem;
    using fiscids::RationalFn;
    std::size_t N = static_cast<std::size_t>(rand_int(rng, 1, 3));
    std::size_t n = static_cast<std::size_t>(rand_int(rng, 1, 2));

    auto small_poly = [&](unsigned max_degree) {
        Poly p(N);
        int terms = rand_int(rng, 1, 3);
        for (int t = 0; t < terms; ++t) {
            Rational c = Rational(rand_int(rng, -2, 2), 8);
            p.add_term(random_monomial(rng, N, max_degree), c);
        }
        return p;
    };

    bool with_den = rand_int(rng, 0, 1) == 1;
    Poly den = Poly::constant(N, Rational(1));
    if (with_den) {
        Poly lin = Poly::constant(N, rand_rational(rng, 2, 4));
        for (std::size_t j = 0; j < N; ++j) {
            Rational c = Rational(rand_int(rng, -2, 2), 4);
            lin += Poly::variable(N, j).scaled(c);
        }
        den = Poly::constant(N, Rational(1)) + lin * lin;
    }

    FiscidsSystem sys;
    sys.N = N;
    sys.n = n;
    sys.m = 1;
    sys.cls = fiscids::SystemClass::Rational;
    for (std::size_t j = 0; j < n; ++j) sys.input_names.push_back("x" + std::to_string(j + 1));
    for (std::size_t i = 0; i < N; ++i) sys.state_names.push_back("z" + std::to_string(i + 1));
    for (std::size_t i = 0; i < N; ++i) {
        std::vector<RationalFn> row;
        for (std::size_t j = 0; j < n; ++j) {
            bool rational_entry = with_den && rand_int(rng, 0, 1) == 1;
            if (rational_entry)
                row.push_back(fiscids::normalize_rational(small_poly(2), den));
            else
                row.push_back(fiscids::rat_from_poly(small_poly(2)));
        }
        sys.F.push_back(std::move(row));
    }
    if (with_den)
        sys.h.push_back(fiscids::normalize_rational(small_poly(2), den));
    else
        sys.h.push_back(fiscids::rat_from_poly(small_poly(2)));
    for (std::size_t i = 0; i < N; ++i)
        sys.z0.push_back(Expr::constant(Rational(rand_int(rng, -2, 2), 4)));
    return sys;
}

inline std::vector<double> random_point(Rng& rng, std::size_t dim, double lo, double hi) {
    std::vector<double> out(dim);
    for (double& v : out) v = rand_double(rng, lo, hi);
    return out;
}

}  // namespace testsupport
