#include "fiscids/poly.hpp"

#include <algorithm>

namespace fiscids {

bool Monomial::divides(const Monomial& other) const {
    if (exponents.size() != other.exponents.size()) return false;
    for (std::size_t i = 0; i < exponents.size(); ++i)
        if (exponents[i] > other.exponents[i]) return false;
    return true;
}

Monomial Monomial::times(const Monomial& other) const {
    Monomial out = *this;
    for (std::size_t i = 0; i < exponents.size(); ++i)
        out.exponents[i] += other.exponents[i];
    return out;
}

bool grlex_less(const Monomial& a, const Monomial& b) {
    unsigned da = a.degree(), db = b.degree();
    if (da != db) return da < db;
    return a.exponents < b.exponents;
}

Poly Poly::constant(std::size_t nvars, const Rational& c) {
    Poly p(nvars);
    if (c != 0) p.terms_[Monomial::unit(nvars)] = c;
    return p;
}

Poly Poly::variable(std::size_t nvars, std::size_t j) {
    Poly p(nvars);
    p.terms_[Monomial::axis(nvars, j)] = 1;
    return p;
}

Poly Poly::from_term(std::size_t nvars, const Monomial& m, const Rational& c) {
    Poly p(nvars);
    if (m.size() != nvars) throw AmbientMismatch("monomial length != variable count");
    if (c != 0) p.terms_[m] = c;
    return p;
}

bool Poly::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.degree() == 0);
}

Rational Poly::constant_value() const {
    if (terms_.empty()) return Rational(0);
    if (!is_constant()) throw Error("constant_value on a nonconstant polynomial");
    return terms_.begin()->second;
}

void Poly::add_term(const Monomial& m, const Rational& c) {
    if (m.size() != nvars_) throw AmbientMismatch("monomial length != variable count");
    if (c == 0) return;
    auto [it, inserted] = terms_.emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

Poly Poly::operator-() const { return scaled(Rational(-1)); }

Poly& Poly::operator+=(const Poly& other) {
    if (nvars_ != other.nvars_) throw AmbientMismatch("polynomial addition");
    for (const auto& [m, c] : other.terms_) add_term(m, c);
    return *this;
}

Poly& Poly::operator-=(const Poly& other) {
    if (nvars_ != other.nvars_) throw AmbientMismatch("polynomial subtraction");
    for (const auto& [m, c] : other.terms_) add_term(m, Rational(-c));
    return *this;
}

Poly Poly::scaled(const Rational& c) const {
    Poly out(nvars_);
    if (c == 0) return out;
    for (const auto& [m, coeff] : terms_) out.terms_[m] = coeff * c;
    return out;
}

Poly Poly::pow(unsigned k) const {
    Poly acc = Poly::constant(nvars_, Rational(1));
    for (unsigned i = 0; i < k; ++i) acc = acc * *this;
    return acc;
}

Poly Poly::partial(std::size_t j) const {
    if (j >= nvars_) throw AmbientMismatch("partial derivative variable out of range");
    Poly out(nvars_);
    for (const auto& [m, c] : terms_) {
        if (m.exponents[j] == 0) continue;
        Monomial d = m;
        unsigned e = d.exponents[j]--;
        out.add_term(d, c * Rational(e));
    }
    return out;
}

unsigned Poly::total_degree() const {
    if (terms_.empty()) return 0;
    return terms_.rbegin()->first.degree();  // grlex max has the max degree
}

const Rational& Poly::leading_coefficient() const {
    if (terms_.empty()) throw Error("leading coefficient of the zero polynomial");
    return terms_.rbegin()->second;
}

Rational Poly::content() const {
    Integer num_gcd = 0, den_lcm = 1;
    for (const auto& [m, c] : terms_) {
        num_gcd = boost::multiprecision::gcd(num_gcd, numerator(c));
        den_lcm = boost::multiprecision::lcm(den_lcm, denominator(c));
    }
    if (num_gcd == 0) return Rational(1);
    if (num_gcd < 0) num_gcd = -num_gcd;
    return Rational(num_gcd, den_lcm);
}

std::pair<Rational, Poly> Poly::content_normalized() const {
    if (is_zero()) return {Rational(1), *this};
    Rational c = content();
    if (leading_coefficient() < 0) c = -c;
    return {c, scaled(Rational(1) / c)};
}

Poly Poly::padded(std::size_t new_nvars) const {
    if (new_nvars < nvars_) throw AmbientMismatch("cannot shrink ambient set");
    Poly out(new_nvars);
    for (const auto& [m, c] : terms_) {
        Monomial padded = Monomial::unit(new_nvars);
        std::copy(m.exponents.begin(), m.exponents.end(), padded.exponents.begin());
        out.terms_[padded] = c;
    }
    return out;
}

double Poly::eval(const std::vector<double>& point) const {
    if (point.size() != nvars_) throw AmbientMismatch("evaluation point length");
    double acc = 0;
    for (const auto& [m, c] : terms_) {
        double t = c.convert_to<double>();
        for (std::size_t j = 0; j < nvars_; ++j)
            for (unsigned e = 0; e < m.exponents[j]; ++e) t *= point[j];
        acc += t;
    }
    return acc;
}

Rational Poly::eval_exact(const std::vector<Rational>& point) const {
    if (point.size() != nvars_) throw AmbientMismatch("evaluation point length");
    Rational acc = 0;
    for (const auto& [m, c] : terms_) {
        Rational t = c;
        for (std::size_t j = 0; j < nvars_; ++j)
            for (unsigned e = 0; e < m.exponents[j]; ++e) t *= point[j];
        acc += t;
    }
    return acc;
}

Poly operator+(Poly a, const Poly& b) {
    a += b;
    return a;
}

Poly operator-(Poly a, const Poly& b) {
    a -= b;
    return a;
}

Poly operator*(const Poly& a, const Poly& b) {
    if (a.nvars() != b.nvars()) throw AmbientMismatch("polynomial multiplication");
    Poly out(a.nvars());
    for (const auto& [ma, ca] : a.terms())
        for (const auto& [mb, cb] : b.terms()) out.add_term(ma.times(mb), ca * cb);
    return out;
}

Poly RationalFn::to_polynomial() const {
    if (!is_polynomial()) throw Error("to_polynomial on a nonpolynomial rational function");
    return num.scaled(Rational(1) / den.constant_value());
}

double RationalFn::eval(const std::vector<double>& point) const {
    double d = den.eval(point);
    if (d == 0) throw DomainError("rational function denominator vanished");
    return num.eval(point) / d;
}

RationalFn normalize_rational(const Poly& num, const Poly& den) {
    if (den.is_zero()) throw ZeroDenominator();
    std::size_t nv = num.nvars();
    if (nv != den.nvars()) throw AmbientMismatch("rational function normalization");
    RationalFn out(nv);
    if (num.is_zero()) return out;  // 0/1

    // Common monomial content over all terms of both polynomials.
    Monomial shift = num.terms().begin()->first;
    auto lower = [&](const Poly& p) {
        for (const auto& [m, c] : p.terms())
            for (std::size_t j = 0; j < nv; ++j)
                shift.exponents[j] = std::min(shift.exponents[j], m.exponents[j]);
    };
    lower(num);
    lower(den);

    Poly n(nv), d(nv);
    auto strip = [&](const Poly& src, Poly& dst) {
        for (const auto& [m, c] : src.terms()) {
            Monomial reduced = m;
            for (std::size_t j = 0; j < nv; ++j) reduced.exponents[j] -= shift.exponents[j];
            dst.add_term(reduced, c);
        }
    };
    strip(num, n);
    strip(den, d);

    Rational c = n.content();
    if (d.leading_coefficient() < 0) c = -c;
    out.num = n.scaled(Rational(1) / c);
    out.den = d.scaled(Rational(1) / c);
    return out;
}

RationalFn rat_from_poly(const Poly& p) {
    return normalize_rational(p, Poly::constant(p.nvars(), Rational(1)));
}

RationalFn rat_constant(std::size_t nvars, const Rational& c) {
    return rat_from_poly(Poly::constant(nvars, c));
}

RationalFn rat_variable(std::size_t nvars, std::size_t j) {
    return rat_from_poly(Poly::variable(nvars, j));
}

RationalFn rat_add(const RationalFn& a, const RationalFn& b) {
    return normalize_rational(a.num * b.den + b.num * a.den, a.den * b.den);
}

RationalFn rat_mul(const RationalFn& a, const RationalFn& b) {
    return normalize_rational(a.num * b.num, a.den * b.den);
}

RationalFn rat_div(const RationalFn& a, const RationalFn& b) {
    return normalize_rational(a.num * b.den, a.den * b.num);
}

RationalFn rat_pow(const RationalFn& a, long k) {
    if (k >= 0)
        return normalize_rational(a.num.pow(static_cast<unsigned>(k)),
                                  a.den.pow(static_cast<unsigned>(k)));
    return normalize_rational(a.den.pow(static_cast<unsigned>(-k)),
                              a.num.pow(static_cast<unsigned>(-k)));
}

RationalFn rat_scaled(const RationalFn& a, const Rational& c) {
    return normalize_rational(a.num.scaled(c), a.den);
}

bool ExponentSet::is_divisor_closed() const {
    for (const Monomial& m : elements) {
        for (std::size_t j = 0; j < m.size(); ++j) {
            if (m.exponents[j] == 0) continue;
            Monomial down = m;
            down.exponents[j]--;
            if (!contains(down)) return false;
        }
    }
    return true;
}

ExponentSet divisor_closure(const ExponentSet& s) {
    ExponentSet out;
    for (const Monomial& m : s.elements) {
        // Odometer over all exponent vectors componentwise below m.
        Monomial cur = Monomial::unit(m.size());
        while (true) {
            out.elements.insert(cur);
            std::size_t j = 0;
            while (j < m.size()) {
                if (cur.exponents[j] < m.exponents[j]) {
                    cur.exponents[j]++;
                    break;
                }
                cur.exponents[j] = 0;
                ++j;
            }
            if (j == m.size()) break;
        }
    }
    return out;
}

namespace {

std::optional<RationalFn> as_rational_rec(const Expr& e, const std::vector<VarId>& states) {
    std::size_t nv = states.size();
    switch (e.kind()) {
        case ExprKind::Const:
            return rat_constant(nv, e.value());
        case ExprKind::Named:
            return std::nullopt;  // irrational constants are not rational coefficients
        case ExprKind::Var:
            for (std::size_t j = 0; j < nv; ++j)
                if (states[j].name == e.var().name) return rat_variable(nv, j);
            return std::nullopt;
        case ExprKind::Add: {
            RationalFn acc = rat_constant(nv, Rational(0));
            for (const Expr& t : e.args()) {
                auto r = as_rational_rec(t, states);
                if (!r) return std::nullopt;
                acc = rat_add(acc, *r);
            }
            return acc;
        }
        case ExprKind::Mul: {
            RationalFn acc = rat_constant(nv, Rational(1));
            for (const Expr& f : e.args()) {
                auto r = as_rational_rec(f, states);
                if (!r) return std::nullopt;
                acc = rat_mul(acc, *r);
            }
            return acc;
        }
        case ExprKind::Div: {
            auto n = as_rational_rec(e.args()[0], states);
            auto d = as_rational_rec(e.args()[1], states);
            if (!n || !d || d->num.is_zero()) return std::nullopt;
            return rat_div(*n, *d);
        }
        case ExprKind::IntPow: {
            auto b = as_rational_rec(e.args()[0], states);
            if (!b) return std::nullopt;
            if (e.int_exponent() < 0 && b->num.is_zero()) return std::nullopt;
            return rat_pow(*b, e.int_exponent());
        }
        case ExprKind::RatPow:
        case ExprKind::Call:
            return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace

std::optional<RationalFn> as_rational(const Expr& e, const std::vector<VarId>& states) {
    return as_rational_rec(e, states);
}

Expr poly_to_expr(const Poly& p, const std::vector<VarId>& states) {
    if (p.nvars() != states.size()) throw AmbientMismatch("poly_to_expr");
    std::vector<Expr> terms;
    for (const auto& [m, c] : p.terms()) {
        std::vector<Expr> factors{Expr::constant(c)};
        for (std::size_t j = 0; j < states.size(); ++j)
            if (m.exponents[j] > 0)
                factors.push_back(Expr::ipow(Expr::variable(states[j]), m.exponents[j]));
        terms.push_back(Expr::mul(std::move(factors)));
    }
    return Expr::add(std::move(terms));
}

Expr rational_fn_to_expr(const RationalFn& f, const std::vector<VarId>& states) {
    Expr num = poly_to_expr(f.num, states);
    if (f.is_polynomial() && f.den.constant_value() == 1) return num;
    return Expr::div(num, poly_to_expr(f.den, states));
}

}  // namespace fiscids
