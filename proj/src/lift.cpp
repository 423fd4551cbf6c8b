#include "fiscids/lift.hpp"

#include <cmath>
#include <map>
#include <optional>
#include <utility>

namespace fiscids {

namespace {

// A state is stored as (coefficient, core) so that scalar multiples of a
// tracked expression are recognized: if z_k defines c_k*core, then a term
// c*core rewrites to (c/c_k)*z_k.
struct StateEntry {
    Expr definition;  // full defining expression in the inputs
    Rational coeff;
    Expr core;
};

std::pair<Rational, Expr> split_scalar(const Expr& e) {
    if (e.kind() == ExprKind::Mul && e.args().front().kind() == ExprKind::Const) {
        std::vector<Expr> rest(e.args().begin() + 1, e.args().end());
        return {e.args().front().value(), Expr::mul(std::move(rest))};
    }
    return {Rational(1), e};
}

struct ExpressResult {
    std::optional<RationalFn> fn;
    std::optional<Expr> residual;  // innermost non-rational subexpression

    static ExpressResult ok(RationalFn f) { return {std::move(f), std::nullopt}; }
    static ExpressResult fail(Expr r) { return {std::nullopt, std::move(r)}; }
};

class Closure {
public:
    Closure(const std::vector<VarId>& inputs, std::size_t cap)
        : inputs_(inputs), cap_(cap) {}

    // Returns the index of the state defining e, adding it if new.
    std::size_t add_state(const Expr& e) {
        auto [c, core] = split_scalar(e);
        auto it = core_index_.find(core);
        if (it != core_index_.end()) return it->second;
        if (states_.size() >= cap_) throw ClosureCapExceeded(cap_);
        states_.push_back({e, c, core});
        core_index_.emplace(core, states_.size() - 1);
        return states_.size() - 1;
    }

    void add_with_companions(const Expr& residual) {
        add_state(residual);
        if (residual.kind() == ExprKind::Call) {
            const Expr& u = residual.args()[0];
            if (residual.func() == FuncKind::Sin) add_state(Expr::call(FuncKind::Cos, u));
            if (residual.func() == FuncKind::Cos) add_state(Expr::call(FuncKind::Sin, u));
        }
    }

    std::size_t size() const { return states_.size(); }
    const std::vector<StateEntry>& states() const { return states_; }

    // Rewrites e (an expression in the inputs) as a rational function of the
    // current state symbols, or reports the innermost blocking subexpression.
    ExpressResult express(const Expr& e) const {
        std::size_t nv = states_.size();
        // A whole-node match takes priority over structural descent.
        auto [c, core] = split_scalar(e);
        auto it = core_index_.find(core);
        if (it != core_index_.end()) {
            Rational scale = c / states_[it->second].coeff;
            return ExpressResult::ok(
                rat_scaled(rat_variable(nv, it->second), scale));
        }
        switch (e.kind()) {
            case ExprKind::Const:
                return ExpressResult::ok(rat_constant(nv, e.value()));
            case ExprKind::Named:
                return ExpressResult::fail(e);  // becomes a constant state
            case ExprKind::Var:
                // All inputs are seeded as states, so this is unreachable for
                // well-formed phi; treat it as a blocking leaf regardless.
                return ExpressResult::fail(e);
            case ExprKind::Add: {
                RationalFn acc = rat_constant(nv, Rational(0));
                for (const Expr& t : e.args()) {
                    ExpressResult r = express(t);
                    if (!r.fn) return r;
                    acc = rat_add(acc, *r.fn);
                }
                return ExpressResult::ok(std::move(acc));
            }
            case ExprKind::Mul: {
                RationalFn acc = rat_constant(nv, Rational(1));
                for (const Expr& f : e.args()) {
                    ExpressResult r = express(f);
                    if (!r.fn) return r;
                    acc = rat_mul(acc, *r.fn);
                }
                return ExpressResult::ok(std::move(acc));
            }
            case ExprKind::Div: {
                ExpressResult num = express(e.args()[0]);
                if (!num.fn) return num;
                ExpressResult den = express(e.args()[1]);
                if (!den.fn) return den;
                if (den.fn->num.is_zero()) throw Error("division by zero in closure");
                return ExpressResult::ok(rat_div(*num.fn, *den.fn));
            }
            case ExprKind::IntPow: {
                ExpressResult base = express(e.args()[0]);
                if (!base.fn) return base;
                return ExpressResult::ok(rat_pow(*base.fn, e.int_exponent()));
            }
            case ExprKind::RatPow:
            case ExprKind::Call: {
                // Innermost first: a blocked argument wins over this node.
                ExpressResult arg = express(e.args()[0]);
                if (!arg.fn) return arg;
                return ExpressResult::fail(e);
            }
        }
        return ExpressResult::fail(e);
    }

private:
    const std::vector<VarId>& inputs_;
    std::size_t cap_;
    std::vector<StateEntry> states_;
    std::map<Expr, std::size_t, ExprLess> core_index_;
};

}  // namespace

FiscidsSystem lift(const std::vector<Expr>& phi, const std::vector<VarId>& inputs,
                   const LiftOptions& options) {
    if (phi.empty()) throw Error("lift requires at least one output expression");
    std::vector<Rational> base = options.base_point;
    if (base.empty()) base.assign(inputs.size(), Rational(0));
    if (base.size() != inputs.size()) throw Error("base point length != input count");

    Closure closure(inputs, options.cap);

    // Output components first, then the raw inputs, then closure residuals.
    std::vector<std::size_t> output_states;
    for (const Expr& component : phi) {
        std::vector<VarId> free;
        collect_free_variables(component, free);
        for (const VarId& v : free) {
            bool known = false;
            for (const VarId& in : inputs) known = known || in.name == v.name;
            if (!known) throw UnknownIdentifier(v.name);
        }
        output_states.push_back(closure.add_state(component));
    }
    for (const VarId& in : inputs) closure.add_state(Expr::variable(in));

    // Differentiate every state by every input; absorb residuals until the
    // closure is rational.
    std::vector<std::vector<Expr>> derivatives;
    for (bool closed = false; !closed;) {
        closed = true;
        derivatives.assign(closure.size(), {});
        for (std::size_t k = 0; k < closure.size() && closed; ++k) {
            derivatives[k].clear();
            for (const VarId& in : inputs)
                derivatives[k].push_back(differentiate(closure.states()[k].definition, in));
            for (const Expr& d : derivatives[k]) {
                ExpressResult r = closure.express(d);
                if (!r.fn) {
                    closure.add_with_companions(*r.residual);
                    closed = false;
                    break;
                }
            }
        }
    }

    FiscidsSystem sys;
    sys.n = inputs.size();
    sys.m = phi.size();
    sys.N = closure.size();
    sys.cls = SystemClass::Rational;
    for (const VarId& in : inputs) sys.input_names.push_back(in.name);
    for (std::size_t k = 0; k < sys.N; ++k)
        sys.state_names.push_back("z" + std::to_string(k + 1));

    for (std::size_t k = 0; k < sys.N; ++k) {
        std::vector<RationalFn> row;
        for (std::size_t j = 0; j < sys.n; ++j) {
            ExpressResult r = closure.express(derivatives[k][j]);
            if (!r.fn) throw Error("closure left a non-rational derivative");
            row.push_back(std::move(*r.fn));
        }
        sys.F.push_back(std::move(row));
    }
    for (std::size_t i : output_states) sys.h.push_back(rat_variable(sys.N, i));

    // Fixed initial state: each state definition evaluated at the base point.
    for (std::size_t k = 0; k < sys.N; ++k) {
        Expr at_base = substitute(
            closure.states()[k].definition, [&](const VarId& v) -> std::optional<Expr> {
                for (std::size_t j = 0; j < inputs.size(); ++j)
                    if (inputs[j].name == v.name) return Expr::constant(base[j]);
                return std::nullopt;
            });
        if (!is_constant_expression(at_base))
            throw Error("state definition retains free variables at the base point");
        try {
            double v = eval_constant(at_base);
            if (!std::isfinite(v))
                throw DomainError("non-finite value");
        } catch (const DomainError& e) {
            throw BasePointDomainError(sys.state_names[k], e.what());
        }
        sys.z0.push_back(std::move(at_base));
    }

    bool shifted = false;
    for (const Rational& b : base) shifted = shifted || b != 0;
    if (shifted) sys.base_point = base;

    check_system(sys);
    return sys;
}

}  // namespace fiscids
