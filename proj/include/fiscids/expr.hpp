#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fiscids/errors.hpp"
#include "fiscids/rational.hpp"

namespace fiscids {

struct VarId {
    std::string name;
    int index = 0;  // position in the declared variable ordering
};

inline bool operator==(const VarId& a, const VarId& b) { return a.name == b.name; }

inline std::vector<VarId> make_vars(const std::vector<std::string>& names) {
    std::vector<VarId> out;
    out.reserve(names.size());
    for (std::size_t i = 0; i < names.size(); ++i)
        out.push_back({names[i], static_cast<int>(i)});
    return out;
}

enum class ExprKind { Const, Named, Var, Add, Mul, Div, IntPow, RatPow, Call };
enum class NamedConst { Pi, Euler };
enum class FuncKind { Exp, Log, Sin, Cos, Tan, Atan, Sqrt };

const char* func_name(FuncKind f);

// Immutable expression handle. All factory constructors canonicalize:
// nested sums/products are flattened, constants folded exactly, commutative
// operands sorted by a deterministic structural order, and like terms and
// like factors collected. Negation is represented as multiplication by -1,
// so canonical trees never contain a dedicated negation node.
class Expr {
public:
    Expr();  // the constant 0

    static Expr constant(Rational v);
    static Expr constant(long v) { return constant(Rational(v)); }
    static Expr named(NamedConst c);
    static Expr variable(VarId v);
    static Expr add(std::vector<Expr> terms);
    static Expr mul(std::vector<Expr> factors);
    static Expr neg(const Expr& e);
    static Expr sub(const Expr& a, const Expr& b);
    static Expr div(const Expr& num, const Expr& den);
    static Expr ipow(const Expr& base, long exponent);
    static Expr rpow(const Expr& base, const Rational& exponent);
    static Expr call(FuncKind f, const Expr& arg);

    ExprKind kind() const;
    const Rational& value() const;           // Const
    NamedConst named_const() const;          // Named
    const VarId& var() const;                // Var
    const std::vector<Expr>& args() const;   // children (Div: {num, den})
    long int_exponent() const;               // IntPow
    const Rational& rat_exponent() const;    // RatPow
    FuncKind func() const;                   // Call

    bool is_constant(const Rational& v) const;
    bool is_zero() const { return is_constant(Rational(0)); }
    bool is_one() const { return is_constant(Rational(1)); }

    struct Node;
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    const Node& node() const { return *node_; }

private:
    std::shared_ptr<const Node> node_;
};

// Deterministic structural total order; zero means structurally equal.
int compare(const Expr& a, const Expr& b);
inline bool structurally_equal(const Expr& a, const Expr& b) { return compare(a, b) == 0; }

struct ExprLess {
    bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
};

// Exact partial derivative with respect to v (matched by name). Rules for
// sqrt and rational powers are emitted in self-referential form, e.g.
// d(sqrt(u)) = du / (2*sqrt(u)), so differential closures stay rational in
// the function value itself.
Expr differentiate(const Expr& e, const VarId& v);

double eval(const Expr& e, const std::function<double(const VarId&)>& lookup);
double eval(const Expr& e, const std::vector<double>& values_by_index);
double eval(const Expr& e, const std::map<std::string, double>& values_by_name);
inline double eval_constant(const Expr& e) {
    return eval(e, std::vector<double>{});
}

// Rebuilds e with vars replaced where the callback returns a value; the
// result is re-canonicalized, so substituting constants folds them.
Expr substitute(const Expr& e, const std::function<std::optional<Expr>(const VarId&)>& repl);

void collect_free_variables(const Expr& e, std::vector<VarId>& out);
bool is_constant_expression(const Expr& e);

// Emits the same grammar parse_expression accepts; parse(to_string(e)) == e.
std::string to_string(const Expr& e);

// Infix grammar: + - * / ^, parentheses, f(arg) calls, decimal or integer
// literals (rationals are spelled p/q and fold exactly). '^' requires an
// exponent that folds to a rational constant. Identifiers must be declared
// variables, supported function names, or the constants pi / e.
Expr parse_expression(const std::string& text, const std::vector<VarId>& vars);

}  // namespace fiscids
