#pragma once

#include <map>
#include <vector>

#include "fiscids/system.hpp"

namespace fiscids {

// Deduplicated denominator polynomials of a rational system, together with
// the reciprocal states adjoined for them. Scalar multiples of one
// denominator share a basis member (the first one encountered), and a
// denominator that is a power of a member reuses that member's reciprocal.
struct DenominatorBasis {
    std::vector<Poly> denominators;  // over the original state ambient
};

// Rewrites a rational-class system as a polynomial one by adjoining one
// reciprocal state per basis denominator: new states beta_i = 1/d_i(z) with
// dynamics dbeta_i = -beta_i^2 * (dd_i/dz) dz/dt. The input system is
// returned with N + M_R states, class Polynomial, and identical outputs.
FiscidsSystem r_to_p(const FiscidsSystem& sys);

// Collects the basis without transforming (exposed for inspection/tests).
DenominatorBasis denominator_basis(const FiscidsSystem& sys);

// Monomial dictionary backing the quadratization: all monomials of the
// divisor closure of the system's exponents except 1, with the original
// degree-1 states pinned first (in state order) and composite monomials
// following in degree-ascending order.
struct MonomialDictionary {
    std::vector<Monomial> gamma;                    // over the input ambient
    std::map<Monomial, std::size_t, GrlexLess> index;
};

MonomialDictionary build_monomial_dictionary(const FiscidsSystem& sys);

// Rewrites a polynomial-class system as a quadratic one over the monomial
// dictionary: F and h become affine in the dictionary states, the dictionary
// dynamics are the affine derivative matrix times the affine system matrix
// (hence at most quadratic), and the initial state is the dictionary
// evaluated at z0.
FiscidsSystem p_to_q(const FiscidsSystem& sys);

}  // namespace fiscids
