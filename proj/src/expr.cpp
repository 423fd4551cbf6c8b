#include "fiscids/expr.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace fiscids {

struct Expr::Node {
    ExprKind kind = ExprKind::Const;
    Rational value;        // Const value, or RatPow exponent
    NamedConst named = NamedConst::Pi;
    VarId var;
    long iexp = 0;
    FuncKind fn = FuncKind::Exp;
    std::vector<Expr> args;
};

namespace {

Expr make_node(Expr::Node n) {
    return Expr(std::make_shared<const Expr::Node>(std::move(n)));
}

int compare_vectors(const std::vector<Expr>& a, const std::vector<Expr>& b) {
    std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i)
        if (int c = compare(a[i], b[i])) return c;
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    return 0;
}

int compare_rational(const Rational& a, const Rational& b) {
    if (a < b) return -1;
    if (b < a) return 1;
    return 0;
}

// Splits a term into (rational coefficient, remaining factor) for like-term
// collection in sums.
std::pair<Rational, Expr> split_coefficient(const Expr& e) {
    if (e.kind() == ExprKind::Const) return {e.value(), Expr::constant(1)};
    if (e.kind() == ExprKind::Mul && e.args().front().kind() == ExprKind::Const) {
        std::vector<Expr> rest(e.args().begin() + 1, e.args().end());
        return {e.args().front().value(), Expr::mul(std::move(rest))};
    }
    return {Rational(1), e};
}

}  // namespace

Expr::Expr() : node_(std::make_shared<const Node>()) {}

ExprKind Expr::kind() const { return node_->kind; }
const Rational& Expr::value() const { return node_->value; }
NamedConst Expr::named_const() const { return node_->named; }
const VarId& Expr::var() const { return node_->var; }
const std::vector<Expr>& Expr::args() const { return node_->args; }
long Expr::int_exponent() const { return node_->iexp; }
const Rational& Expr::rat_exponent() const { return node_->value; }
FuncKind Expr::func() const { return node_->fn; }

bool Expr::is_constant(const Rational& v) const {
    return node_->kind == ExprKind::Const && node_->value == v;
}

const char* func_name(FuncKind f) {
    switch (f) {
        case FuncKind::Exp: return "exp";
        case FuncKind::Log: return "log";
        case FuncKind::Sin: return "sin";
        case FuncKind::Cos: return "cos";
        case FuncKind::Tan: return "tan";
        case FuncKind::Atan: return "atan";
        case FuncKind::Sqrt: return "sqrt";
    }
    return "?";
}

int compare(const Expr& a, const Expr& b) {
    if (&a.node() == &b.node()) return 0;
    if (a.kind() != b.kind()) return a.kind() < b.kind() ? -1 : 1;
    switch (a.kind()) {
        case ExprKind::Const:
            return compare_rational(a.value(), b.value());
        case ExprKind::Named:
            if (a.named_const() != b.named_const())
                return a.named_const() < b.named_const() ? -1 : 1;
            return 0;
        case ExprKind::Var:
            if (a.var().index != b.var().index) return a.var().index < b.var().index ? -1 : 1;
            return a.var().name.compare(b.var().name) < 0   ? -1
                   : a.var().name.compare(b.var().name) > 0 ? 1
                                                            : 0;
        case ExprKind::IntPow:
            if (int c = compare(a.args()[0], b.args()[0])) return c;
            if (a.int_exponent() != b.int_exponent())
                return a.int_exponent() < b.int_exponent() ? -1 : 1;
            return 0;
        case ExprKind::RatPow:
            if (int c = compare(a.args()[0], b.args()[0])) return c;
            return compare_rational(a.rat_exponent(), b.rat_exponent());
        case ExprKind::Call:
            if (a.func() != b.func()) return a.func() < b.func() ? -1 : 1;
            return compare(a.args()[0], b.args()[0]);
        case ExprKind::Add:
        case ExprKind::Mul:
        case ExprKind::Div:
            return compare_vectors(a.args(), b.args());
    }
    return 0;
}

Expr Expr::constant(Rational v) {
    Node n;
    n.kind = ExprKind::Const;
    n.value = std::move(v);
    return make_node(std::move(n));
}

Expr Expr::named(NamedConst c) {
    Node n;
    n.kind = ExprKind::Named;
    n.named = c;
    return make_node(std::move(n));
}

Expr Expr::variable(VarId v) {
    Node n;
    n.kind = ExprKind::Var;
    n.var = std::move(v);
    return make_node(std::move(n));
}

Expr Expr::add(std::vector<Expr> terms) {
    Rational const_term(0);
    std::map<Expr, Rational, ExprLess> collected;
    std::vector<Expr> queue = std::move(terms);
    for (std::size_t i = 0; i < queue.size(); ++i) {
        const Expr& t = queue[i];
        if (t.kind() == ExprKind::Add) {
            queue.insert(queue.end(), t.args().begin(), t.args().end());
            continue;
        }
        if (t.kind() == ExprKind::Const) {
            const_term += t.value();
            continue;
        }
        auto [coeff, core] = split_coefficient(t);
        if (core.kind() == ExprKind::Const) {
            const_term += coeff * core.value();
            continue;
        }
        collected[core] += coeff;
    }
    std::vector<Expr> out;
    for (const auto& [core, coeff] : collected) {
        if (coeff == 0) continue;
        if (coeff == 1)
            out.push_back(core);
        else
            out.push_back(mul({constant(coeff), core}));
    }
    if (const_term != 0) out.push_back(constant(const_term));
    if (out.empty()) return constant(0);
    if (out.size() == 1) return out.front();
    Node n;
    n.kind = ExprKind::Add;
    n.args = std::move(out);
    return make_node(std::move(n));
}

Expr Expr::mul(std::vector<Expr> factors) {
    Rational coeff(1);
    std::map<Expr, long, ExprLess> powers;
    std::vector<Expr> numerators, denominators;
    std::vector<Expr> queue = std::move(factors);
    for (std::size_t i = 0; i < queue.size(); ++i) {
        const Expr& f = queue[i];
        switch (f.kind()) {
            case ExprKind::Mul:
                queue.insert(queue.end(), f.args().begin(), f.args().end());
                break;
            case ExprKind::Const:
                coeff *= f.value();
                break;
            case ExprKind::Div:
                numerators.push_back(f.args()[0]);
                denominators.push_back(f.args()[1]);
                break;
            case ExprKind::IntPow:
                powers[f.args()[0]] += f.int_exponent();
                break;
            default:
                powers[f] += 1;
                break;
        }
    }
    if (!denominators.empty()) {
        // Rationalize: pull every quotient factor up to a single top-level one.
        std::vector<Expr> num_factors{constant(coeff)};
        for (const auto& [base, e] : powers) num_factors.push_back(ipow(base, e));
        num_factors.insert(num_factors.end(), numerators.begin(), numerators.end());
        return div(mul(std::move(num_factors)), mul(std::move(denominators)));
    }
    if (coeff == 0) return constant(0);
    std::vector<Expr> out;
    if (coeff != 1) out.push_back(constant(coeff));
    for (const auto& [base, e] : powers) {
        if (e == 0) continue;
        Expr p = ipow(base, e);
        if (p.kind() == ExprKind::Const) {
            if (p.value() == 1) continue;
            // Rare: a collected power folded to a constant (e.g. sqrt(u)^2 of
            // a constant); restart so it joins the coefficient.
            std::vector<Expr> again{constant(coeff), p};
            for (const auto& [b2, e2] : powers)
                if (compare(b2, base) != 0) again.push_back(ipow(b2, e2));
            return mul(std::move(again));
        }
        out.push_back(std::move(p));
    }
    if (out.empty()) return constant(coeff);
    if (out.size() == 1) return out.front();
    // A collected power may itself be a product (e.g. sqrt(u)^2 -> u where u
    // is a product); reflatten once if so.
    for (const Expr& f : out)
        if (f.kind() == ExprKind::Mul || f.kind() == ExprKind::Div) return mul(std::move(out));
    Node n;
    n.kind = ExprKind::Mul;
    n.args = std::move(out);
    return make_node(std::move(n));
}

Expr Expr::neg(const Expr& e) { return mul({constant(-1), e}); }

Expr Expr::sub(const Expr& a, const Expr& b) { return add({a, neg(b)}); }

Expr Expr::div(const Expr& num, const Expr& den) {
    if (den.kind() == ExprKind::Const && den.value() != 0)
        return mul({constant(Rational(1) / den.value()), num});
    if (num.is_zero() && !(den.kind() == ExprKind::Const && den.value() == 0))
        return constant(0);
    if (num.kind() == ExprKind::Div)
        return div(num.args()[0], mul({num.args()[1], den}));
    if (den.kind() == ExprKind::Div)
        return div(mul({num, den.args()[1]}), den.args()[0]);
    if (den.kind() == ExprKind::Mul && den.args().front().kind() == ExprKind::Const) {
        std::vector<Expr> rest(den.args().begin() + 1, den.args().end());
        Rational c = den.args().front().value();
        return mul({constant(Rational(1) / c), div(num, mul(std::move(rest)))});
    }
    Node n;
    n.kind = ExprKind::Div;
    n.args = {num, den};
    return make_node(std::move(n));
}

Expr Expr::ipow(const Expr& base, long exponent) {
    if (exponent == 0) return constant(1);
    if (exponent == 1) return base;
    switch (base.kind()) {
        case ExprKind::Const:
            if (base.value() != 0) return constant(rational_pow(base.value(), exponent));
            if (exponent > 0) return constant(0);
            break;  // 0^negative stays symbolic; evaluation reports the domain error
        case ExprKind::IntPow:
            return ipow(base.args()[0], base.int_exponent() * exponent);
        case ExprKind::RatPow:
            return rpow(base.args()[0], base.rat_exponent() * exponent);
        case ExprKind::Call:
            if (base.func() == FuncKind::Sqrt)
                return rpow(base.args()[0], Rational(exponent, 2));
            break;
        case ExprKind::Mul: {
            std::vector<Expr> out;
            out.reserve(base.args().size());
            for (const Expr& f : base.args()) out.push_back(ipow(f, exponent));
            return mul(std::move(out));
        }
        case ExprKind::Div:
            if (exponent > 0)
                return div(ipow(base.args()[0], exponent), ipow(base.args()[1], exponent));
            return div(ipow(base.args()[1], -exponent), ipow(base.args()[0], -exponent));
        default:
            break;
    }
    Node n;
    n.kind = ExprKind::IntPow;
    n.iexp = exponent;
    n.args = {base};
    return make_node(std::move(n));
}

Expr Expr::rpow(const Expr& base, const Rational& exponent) {
    if (denominator(exponent) == 1)
        return ipow(base, static_cast<long>(numerator(exponent)));
    if (base.kind() == ExprKind::Const && base.value() > 0) {
        // Fold only when the result is exactly rational: base must be a
        // perfect q-th power for exponent p/q.
        Integer p = numerator(exponent), q = denominator(exponent);
        if (q == 2) {
            Rational root;
            if (rational_sqrt(base.value(), root))
                return constant(rational_pow(root, static_cast<long>(p)));
        }
    }
    if (base.is_zero() && exponent > 0) return constant(0);
    if (base.kind() == ExprKind::RatPow)
        return rpow(base.args()[0], base.rat_exponent() * exponent);
    if (base.kind() == ExprKind::Call && base.func() == FuncKind::Sqrt)
        return rpow(base.args()[0], exponent / 2);
    Expr::Node n;
    n.kind = ExprKind::RatPow;
    n.value = exponent;
    n.args = {base};
    return make_node(std::move(n));
}

Expr Expr::call(FuncKind f, const Expr& arg) {
    if (arg.kind() == ExprKind::Const) {
        const Rational& v = arg.value();
        switch (f) {
            case FuncKind::Exp:
                if (v == 0) return constant(1);
                break;
            case FuncKind::Log:
                if (v == 1) return constant(0);
                break;
            case FuncKind::Sin:
            case FuncKind::Tan:
            case FuncKind::Atan:
                if (v == 0) return constant(0);
                break;
            case FuncKind::Cos:
                if (v == 0) return constant(1);
                break;
            case FuncKind::Sqrt: {
                Rational root;
                if (v >= 0 && rational_sqrt(v, root)) return constant(root);
                break;
            }
        }
    }
    Node n;
    n.kind = ExprKind::Call;
    n.fn = f;
    n.args = {arg};
    return make_node(std::move(n));
}

Expr differentiate(const Expr& e, const VarId& v) {
    switch (e.kind()) {
        case ExprKind::Const:
        case ExprKind::Named:
            return Expr::constant(0);
        case ExprKind::Var:
            return Expr::constant(e.var().name == v.name ? 1 : 0);
        case ExprKind::Add: {
            std::vector<Expr> parts;
            parts.reserve(e.args().size());
            for (const Expr& t : e.args()) parts.push_back(differentiate(t, v));
            return Expr::add(std::move(parts));
        }
        case ExprKind::Mul: {
            std::vector<Expr> terms;
            for (std::size_t i = 0; i < e.args().size(); ++i) {
                std::vector<Expr> fs = e.args();
                fs[i] = differentiate(e.args()[i], v);
                terms.push_back(Expr::mul(std::move(fs)));
            }
            return Expr::add(std::move(terms));
        }
        case ExprKind::Div: {
            const Expr &u = e.args()[0], &w = e.args()[1];
            Expr du = differentiate(u, v), dw = differentiate(w, v);
            return Expr::div(Expr::sub(Expr::mul({du, w}), Expr::mul({u, dw})),
                             Expr::ipow(w, 2));
        }
        case ExprKind::IntPow: {
            const Expr& u = e.args()[0];
            long k = e.int_exponent();
            return Expr::mul({Expr::constant(k), Expr::ipow(u, k - 1), differentiate(u, v)});
        }
        case ExprKind::RatPow: {
            // d(u^r) = r * u^r * du / u, kept in terms of u^r itself.
            const Expr& u = e.args()[0];
            return Expr::mul({Expr::constant(e.rat_exponent()), e,
                              Expr::div(differentiate(u, v), u)});
        }
        case ExprKind::Call: {
            const Expr& u = e.args()[0];
            Expr du = differentiate(u, v);
            switch (e.func()) {
                case FuncKind::Exp:
                    return Expr::mul({e, du});
                case FuncKind::Log:
                    return Expr::div(du, u);
                case FuncKind::Sin:
                    return Expr::mul({Expr::call(FuncKind::Cos, u), du});
                case FuncKind::Cos:
                    return Expr::neg(Expr::mul({Expr::call(FuncKind::Sin, u), du}));
                case FuncKind::Tan:
                    return Expr::mul(
                        {Expr::add({Expr::constant(1), Expr::ipow(e, 2)}), du});
                case FuncKind::Atan:
                    return Expr::div(du, Expr::add({Expr::constant(1), Expr::ipow(u, 2)}));
                case FuncKind::Sqrt:
                    // d(sqrt(u)) = du / (2*sqrt(u)), self-referential.
                    return Expr::div(du, Expr::mul({Expr::constant(2), e}));
            }
        }
    }
    throw Error("differentiate: unhandled node");
}

double eval(const Expr& e, const std::function<double(const VarId&)>& lookup) {
    switch (e.kind()) {
        case ExprKind::Const:
            return e.value().convert_to<double>();
        case ExprKind::Named:
            return e.named_const() == NamedConst::Pi ? std::numbers::pi : std::numbers::e;
        case ExprKind::Var:
            return lookup(e.var());
        case ExprKind::Add: {
            double s = 0;
            for (const Expr& t : e.args()) s += eval(t, lookup);
            return s;
        }
        case ExprKind::Mul: {
            double p = 1;
            for (const Expr& f : e.args()) p *= eval(f, lookup);
            return p;
        }
        case ExprKind::Div: {
            double den = eval(e.args()[1], lookup);
            if (den == 0) throw DomainError("division by zero");
            return eval(e.args()[0], lookup) / den;
        }
        case ExprKind::IntPow: {
            double b = eval(e.args()[0], lookup);
            if (b == 0 && e.int_exponent() < 0)
                throw DomainError("zero raised to a negative power");
            return std::pow(b, static_cast<double>(e.int_exponent()));
        }
        case ExprKind::RatPow: {
            double b = eval(e.args()[0], lookup);
            if (b < 0) throw DomainError("rational power of a negative value");
            if (b == 0 && e.rat_exponent() < 0)
                throw DomainError("zero raised to a negative power");
            return std::pow(b, e.rat_exponent().convert_to<double>());
        }
        case ExprKind::Call: {
            double a = eval(e.args()[0], lookup);
            switch (e.func()) {
                case FuncKind::Exp: return std::exp(a);
                case FuncKind::Log:
                    if (a <= 0) throw DomainError("log of a nonpositive value");
                    return std::log(a);
                case FuncKind::Sin: return std::sin(a);
                case FuncKind::Cos: return std::cos(a);
                case FuncKind::Tan: return std::tan(a);
                case FuncKind::Atan: return std::atan(a);
                case FuncKind::Sqrt:
                    if (a < 0) throw DomainError("sqrt of a negative value");
                    return std::sqrt(a);
            }
        }
    }
    throw Error("eval: unhandled node");
}

double eval(const Expr& e, const std::vector<double>& values_by_index) {
    return eval(e, [&](const VarId& v) -> double {
        if (v.index < 0 || static_cast<std::size_t>(v.index) >= values_by_index.size())
            throw UnboundVariable(v.name);
        return values_by_index[static_cast<std::size_t>(v.index)];
    });
}

double eval(const Expr& e, const std::map<std::string, double>& values_by_name) {
    return eval(e, [&](const VarId& v) -> double {
        auto it = values_by_name.find(v.name);
        if (it == values_by_name.end()) throw UnboundVariable(v.name);
        return it->second;
    });
}

Expr substitute(const Expr& e,
                const std::function<std::optional<Expr>(const VarId&)>& repl) {
    switch (e.kind()) {
        case ExprKind::Const:
        case ExprKind::Named:
            return e;
        case ExprKind::Var: {
            auto r = repl(e.var());
            return r ? *r : e;
        }
        case ExprKind::Add:
        case ExprKind::Mul: {
            std::vector<Expr> parts;
            parts.reserve(e.args().size());
            for (const Expr& a : e.args()) parts.push_back(substitute(a, repl));
            return e.kind() == ExprKind::Add ? Expr::add(std::move(parts))
                                             : Expr::mul(std::move(parts));
        }
        case ExprKind::Div:
            return Expr::div(substitute(e.args()[0], repl), substitute(e.args()[1], repl));
        case ExprKind::IntPow:
            return Expr::ipow(substitute(e.args()[0], repl), e.int_exponent());
        case ExprKind::RatPow:
            return Expr::rpow(substitute(e.args()[0], repl), e.rat_exponent());
        case ExprKind::Call:
            return Expr::call(e.func(), substitute(e.args()[0], repl));
    }
    throw Error("substitute: unhandled node");
}

void collect_free_variables(const Expr& e, std::vector<VarId>& out) {
    switch (e.kind()) {
        case ExprKind::Var: {
            for (const VarId& v : out)
                if (v.name == e.var().name) return;
            out.push_back(e.var());
            return;
        }
        case ExprKind::Const:
        case ExprKind::Named:
            return;
        default:
            for (const Expr& a : e.args()) collect_free_variables(a, out);
    }
}

bool is_constant_expression(const Expr& e) {
    std::vector<VarId> vars;
    collect_free_variables(e, vars);
    return vars.empty();
}

namespace {

// Precedence levels for printing: sums < leading minus < products/quotients
// < powers < atoms.
enum Prec { PrecAdd = 1, PrecNeg = 2, PrecMul = 3, PrecPow = 4, PrecAtom = 5 };

int prec_of(const Expr& e) {
    switch (e.kind()) {
        case ExprKind::Add:
            return PrecAdd;
        case ExprKind::Mul:
        case ExprKind::Div:
            return PrecMul;
        case ExprKind::IntPow:
        case ExprKind::RatPow:
            return PrecPow;
        case ExprKind::Const:
            return e.value() < 0 ? PrecNeg : PrecAtom;
        default:
            return PrecAtom;
    }
}

void print_core(std::ostream& os, const Expr& e);

void print(std::ostream& os, const Expr& e, int min_prec) {
    if (prec_of(e) < min_prec) {
        os << '(';
        print_core(os, e);
        os << ')';
    } else {
        print_core(os, e);
    }
}

void print_core(std::ostream& os, const Expr& e) {
    switch (e.kind()) {
        case ExprKind::Const:
            os << rational_to_string(e.value());
            return;
        case ExprKind::Named:
            os << (e.named_const() == NamedConst::Pi ? "pi" : "e");
            return;
        case ExprKind::Var:
            os << e.var().name;
            return;
        case ExprKind::Add: {
            bool first = true;
            for (const Expr& t : e.args()) {
                auto [coeff, core] = split_coefficient(t);
                bool negative = coeff < 0;
                if (first) {
                    if (negative) os << '-';
                    first = false;
                } else {
                    os << (negative ? " - " : " + ");
                }
                Rational mag = negative ? Rational(-coeff) : coeff;
                if (core.is_one())
                    os << rational_to_string(mag);
                else if (mag == 1)
                    print(os, core, PrecMul);
                else
                    print(os, Expr::mul({Expr::constant(mag), core}), PrecMul);
            }
            return;
        }
        case ExprKind::Mul: {
            bool first = true;
            for (const Expr& f : e.args()) {
                if (!first) os << '*';
                // The leading factor may be a bare negative constant; later
                // factors need parentheses around any leading minus.
                print(os, f, first ? PrecNeg : PrecPow);
                first = false;
            }
            return;
        }
        case ExprKind::Div:
            print(os, e.args()[0], PrecMul);
            os << '/';
            // a/(b*c) must keep its parentheses; a/x^2 need not.
            print(os, e.args()[1], PrecPow);
            return;
        case ExprKind::IntPow:
            print(os, e.args()[0], PrecAtom);
            os << '^';
            if (e.int_exponent() < 0)
                os << '(' << e.int_exponent() << ')';
            else
                os << e.int_exponent();
            return;
        case ExprKind::RatPow:
            print(os, e.args()[0], PrecAtom);
            os << "^(" << rational_to_string(e.rat_exponent()) << ')';
            return;
        case ExprKind::Call:
            os << func_name(e.func()) << '(';
            print(os, e.args()[0], PrecAdd);
            os << ')';
            return;
    }
}

}  // namespace

std::string to_string(const Expr& e) {
    std::ostringstream os;
    print(os, e, PrecAdd);
    return os.str();
}

}  // namespace fiscids
