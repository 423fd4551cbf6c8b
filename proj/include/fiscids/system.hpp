#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fiscids/expr.hpp"
#include "fiscids/poly.hpp"

namespace fiscids {

// Validated structure classes, ordered weakest to strongest.
enum class SystemClass { General, Rational, Polynomial, Quadratic };

const char* class_name(SystemClass c);
SystemClass class_from_name(const std::string& name);

using OpaqueMap = std::function<std::vector<double>(const std::vector<double>&)>;

// Input-affine system dz/dt = F(z) xi with fixed initial state z0 and output
// y = h(z); the represented function is xi -> y(1; xi). Symbolic entries are
// canonical rational functions over the state ambient; the output map may
// instead be an opaque callback, which confines the system to class General.
struct FiscidsSystem {
    std::size_t n = 0;  // inputs
    std::size_t m = 0;  // outputs
    std::size_t N = 0;  // states

    std::vector<std::vector<RationalFn>> F;  // N rows of n entries
    std::vector<RationalFn> h;               // m entries; empty when opaque
    OpaqueMap opaque_output;                 // set only for General systems

    std::vector<Expr> z0;  // N constant expressions, exact where possible
    SystemClass cls = SystemClass::General;
    std::vector<std::string> state_names;
    std::vector<std::string> input_names;

    // Optional input shift: the constant input applied is xi - base_point.
    std::optional<std::vector<Rational>> base_point;

    bool has_opaque_output() const { return static_cast<bool>(opaque_output); }
    std::vector<VarId> state_vars() const;
    std::vector<VarId> input_vars() const;
    std::vector<double> z0_values() const;
    std::vector<double> output_values(const std::vector<double>& state) const;
};

// Throws Error on inconsistent dimensions or a non-constant z0 entry.
void check_system(const FiscidsSystem& sys);

struct ClassDiagnostic {
    std::string location;  // e.g. "F[2][0]"
    std::string message;
};

struct ClassReport {
    bool pass = false;
    std::vector<ClassDiagnostic> diagnostics;
};

// Rational: every entry a rational function of the states (the output map
// must be symbolic). Polynomial: additionally every denominator constant.
// Quadratic: additionally deg F <= 2 and deg h <= 1. Failure is reported,
// never thrown.
ClassReport validate_class(const FiscidsSystem& sys, SystemClass target);

// Strongest class the system validates as.
SystemClass strongest_class(const FiscidsSystem& sys);

// Returns the system retagged as cls; throws ClassError if validation fails.
FiscidsSystem with_class(FiscidsSystem sys, SystemClass cls);

// dz/dt = xi, z(0) = 0, y = phi(z): exact for any phi but not parametric.
struct TrivialRepresentation {
    std::size_t n = 0;
    std::size_t m = 0;
    OpaqueMap phi;

    FiscidsSystem to_system() const;
};

// Probes phi at the origin to determine the output dimension.
TrivialRepresentation trivial_representation(OpaqueMap phi, std::size_t n);

// Versioned JSON document; systems with opaque output maps are rejected.
nlohmann::json serialize(const FiscidsSystem& sys);
FiscidsSystem deserialize(const nlohmann::json& doc);

void save_system(const FiscidsSystem& sys, const std::string& path);
FiscidsSystem load_system(const std::string& path);

}  // namespace fiscids
