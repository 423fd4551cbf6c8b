#include "fiscids/presets.hpp"

#include <cmath>

#include "fiscids/lift.hpp"
#include "fiscids/transform.hpp"

namespace fiscids::presets {

const char* kGaussianExprText = "exp(-1/2*(x1^2 + x1*x2 + x2^2) + x1 + 1/2*x2)";
const char* kLogpolyExprText = "log(2 + x1 + 1/2*x1^2)";

FiscidsSystem gaussian() {
    std::vector<VarId> vars = make_vars({"x1", "x2"});
    FiscidsSystem sys = lift({parse_expression(kGaussianExprText, vars)}, vars);
    return with_class(std::move(sys), SystemClass::Quadratic);
}

double gaussian_reference(double x1, double x2) {
    return std::exp(-0.5 * (x1 * x1 + x1 * x2 + x2 * x2) + x1 + 0.5 * x2);
}

FiscidsSystem logpoly_r() {
    std::vector<VarId> vars = make_vars({"x1"});
    return lift({parse_expression(kLogpolyExprText, vars)}, vars);
}

FiscidsSystem logpoly_p() { return r_to_p(logpoly_r()); }

FiscidsSystem logpoly_q() { return p_to_q(logpoly_p()); }

double logpoly_reference(double x1) { return std::log(2.0 + x1 + 0.5 * x1 * x1); }

FiscidsSystem tt_system() {
    FiscidsSystem sys;
    sys.n = 2;
    sys.m = 1;
    sys.N = 2;
    sys.cls = SystemClass::Quadratic;
    sys.input_names = {"x1", "x2"};
    sys.state_names = {"z1", "z2"};

    Poly z1 = Poly::variable(2, 0), z2 = Poly::variable(2, 1);
    sys.F = {
        {rat_from_poly(z2 - z1), rat_constant(2, Rational(0))},
        {rat_constant(2, Rational(0)), rat_from_poly(z2 * z2 - z1 * z2)},
    };
    sys.h = {rat_from_poly(z1)};
    sys.z0 = {Expr::constant(0), Expr::constant(1)};
    check_system(sys);
    return sys;
}

}  // namespace fiscids::presets
