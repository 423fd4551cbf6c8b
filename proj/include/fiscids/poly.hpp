#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "fiscids/expr.hpp"
#include "fiscids/rational.hpp"

namespace fiscids {

// Multi-exponent over a fixed ambient variable set.
struct Monomial {
    std::vector<unsigned> exponents;

    Monomial() = default;
    explicit Monomial(std::vector<unsigned> e) : exponents(std::move(e)) {}
    static Monomial unit(std::size_t nvars) { return Monomial(std::vector<unsigned>(nvars, 0)); }
    static Monomial axis(std::size_t nvars, std::size_t j) {
        Monomial m = unit(nvars);
        m.exponents[j] = 1;
        return m;
    }

    std::size_t size() const { return exponents.size(); }
    unsigned degree() const {
        unsigned d = 0;
        for (unsigned e : exponents) d += e;
        return d;
    }
    bool divides(const Monomial& other) const;
    Monomial times(const Monomial& other) const;

    bool operator==(const Monomial& other) const { return exponents == other.exponents; }
};

// Graded lexicographic: degree first, then lexicographic on exponents.
bool grlex_less(const Monomial& a, const Monomial& b);

struct GrlexLess {
    bool operator()(const Monomial& a, const Monomial& b) const { return grlex_less(a, b); }
};

// Exact sparse multivariate polynomial; zero coefficients are never stored.
class Poly {
public:
    using TermMap = std::map<Monomial, Rational, GrlexLess>;

    explicit Poly(std::size_t nvars = 0) : nvars_(nvars) {}
    static Poly constant(std::size_t nvars, const Rational& c);
    static Poly variable(std::size_t nvars, std::size_t j);
    static Poly from_term(std::size_t nvars, const Monomial& m, const Rational& c);

    std::size_t nvars() const { return nvars_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    Rational constant_value() const;  // requires is_constant()

    void add_term(const Monomial& m, const Rational& c);

    Poly operator-() const;
    Poly& operator+=(const Poly& other);
    Poly& operator-=(const Poly& other);
    Poly scaled(const Rational& c) const;
    Poly pow(unsigned k) const;

    Poly partial(std::size_t j) const;
    unsigned total_degree() const;  // degree of the zero polynomial is 0

    // Leading term in graded lex order (greatest monomial).
    const Rational& leading_coefficient() const;

    // Positive rational c with p/c having integer, collectively coprime
    // coefficients: gcd of numerators over lcm of denominators.
    Rational content() const;

    // Factors p = c * core where core has content 1 and a positive leading
    // coefficient; the zero polynomial yields (1, 0).
    std::pair<Rational, Poly> content_normalized() const;

    // Embeds into a larger ambient set, keeping variable positions.
    Poly padded(std::size_t new_nvars) const;

    double eval(const std::vector<double>& point) const;
    Rational eval_exact(const std::vector<Rational>& point) const;

    bool operator==(const Poly& other) const {
        return nvars_ == other.nvars_ && terms_ == other.terms_;
    }

private:
    std::size_t nvars_;
    TermMap terms_;
};

Poly operator+(Poly a, const Poly& b);
Poly operator-(Poly a, const Poly& b);
Poly operator*(const Poly& a, const Poly& b);

// Canonical numerator/denominator pair; see normalize_rational.
struct RationalFn {
    Poly num, den;

    explicit RationalFn(std::size_t nvars = 0)
        : num(nvars), den(Poly::constant(nvars, Rational(1))) {}

    std::size_t nvars() const { return num.nvars(); }
    bool is_polynomial() const { return den.is_constant(); }
    Poly to_polynomial() const;  // requires is_polynomial()

    double eval(const std::vector<double>& point) const;

    bool operator==(const RationalFn& other) const {
        return num == other.num && den == other.den;
    }
};

// Canonical form: common monomial content of the pair stripped, numerator
// coefficient content reduced to 1, denominator leading coefficient positive.
// Structural equality of outputs is equivalent to the inputs differing by a
// scalar-times-monomial factor. Zero numerators normalize to 0/1.
RationalFn normalize_rational(const Poly& num, const Poly& den);

RationalFn rat_from_poly(const Poly& p);
RationalFn rat_constant(std::size_t nvars, const Rational& c);
RationalFn rat_variable(std::size_t nvars, std::size_t j);
RationalFn rat_add(const RationalFn& a, const RationalFn& b);
RationalFn rat_mul(const RationalFn& a, const RationalFn& b);
RationalFn rat_div(const RationalFn& a, const RationalFn& b);  // ZeroDenominator if b == 0
RationalFn rat_pow(const RationalFn& a, long k);
RationalFn rat_scaled(const RationalFn& a, const Rational& c);

// Set of multi-exponents over a fixed ambient set.
struct ExponentSet {
    std::set<Monomial, GrlexLess> elements;

    bool contains(const Monomial& m) const { return elements.count(m) > 0; }
    bool is_divisor_closed() const;
};

// Smallest superset closed under componentwise-descending exponents; the
// empty set stays empty, any nonempty set gains the zero exponent.
ExponentSet divisor_closure(const ExponentSet& s);

// The canonical rational function equal to e, when e is a rational function
// of exactly the given state symbols (free variables outside `states`, named
// constants, and transcendental nodes all yield an absent result).
std::optional<RationalFn> as_rational(const Expr& e, const std::vector<VarId>& states);

// Exact conversion helpers between polynomial data and expressions.
Expr poly_to_expr(const Poly& p, const std::vector<VarId>& states);
Expr rational_fn_to_expr(const RationalFn& f, const std::vector<VarId>& states);

}  // namespace fiscids
