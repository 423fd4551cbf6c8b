#pragma once

#include <vector>

#include "fiscids/system.hpp"

namespace fiscids {

struct LiftOptions {
    std::vector<Rational> base_point;  // defaults to the origin
    std::size_t cap = 64;              // maximum closure state count
};

// Builds a rational-class system representing phi by differential closure:
// the states are seeded with the phi components and the inputs, every state
// is differentiated with respect to every input, and any derivative that is
// not a rational function of the current states contributes its innermost
// non-rational subexpression as a new state (sin and cos enter as a pair)
// until the closure is rational or the cap is hit. The output selects the
// phi-component states, and z0 evaluates the states at the base point.
FiscidsSystem lift(const std::vector<Expr>& phi, const std::vector<VarId>& inputs,
                   const LiftOptions& options = {});

}  // namespace fiscids
