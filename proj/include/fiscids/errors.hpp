#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fiscids {

// Root of all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct SyntaxError : Error {
    std::size_t position;
    SyntaxError(std::size_t pos, const std::string& msg)
        : Error("syntax error at position " + std::to_string(pos) + ": " + msg),
          position(pos) {}
};

struct UnknownIdentifier : Error {
    std::string name;
    explicit UnknownIdentifier(const std::string& ident)
        : Error("unknown identifier '" + ident + "'"), name(ident) {}
};

struct UnsupportedFunction : Error {
    std::string name;
    explicit UnsupportedFunction(const std::string& fn)
        : Error("unsupported function '" + fn + "'"), name(fn) {}
};

struct UnboundVariable : Error {
    std::string name;
    explicit UnboundVariable(const std::string& var)
        : Error("unbound variable '" + var + "'"), name(var) {}
};

struct DomainError : Error {
    explicit DomainError(const std::string& msg) : Error("domain error: " + msg) {}
};

struct AmbientMismatch : Error {
    explicit AmbientMismatch(const std::string& msg)
        : Error("ambient variable set mismatch: " + msg) {}
};

struct ZeroDenominator : Error {
    ZeroDenominator() : Error("denominator is the zero polynomial") {}
};

struct SchemaError : Error {
    std::string path;
    SchemaError(const std::string& at, const std::string& msg)
        : Error("schema error at " + at + ": " + msg), path(at) {}
};

struct ClassError : Error {
    explicit ClassError(const std::string& msg) : Error("class error: " + msg) {}
};

struct DenominatorVanishesAtBase : Error {
    std::size_t index;
    explicit DenominatorVanishesAtBase(std::size_t i)
        : Error("denominator " + std::to_string(i) + " vanishes at the initial state"),
          index(i) {}
};

struct BasePointDomainError : Error {
    std::string state;
    BasePointDomainError(const std::string& state_name, const std::string& reason)
        : Error("state '" + state_name + "' undefined at base point: " + reason),
          state(state_name) {}
};

struct ClosureCapExceeded : Error {
    std::size_t cap;
    explicit ClosureCapExceeded(std::size_t limit)
        : Error("differential closure exceeded the state cap of " + std::to_string(limit)),
          cap(limit) {}
};

struct BracketFailure : Error {
    explicit BracketFailure(const std::string& msg) : Error("bracketing failed: " + msg) {}
};

// Integration failures carry the time at which they were detected.
struct IntegrationError : Error {
    double t;
    IntegrationError(const std::string& msg, double at)
        : Error(msg + " at t=" + std::to_string(at)), t(at) {}
};

struct Blowup : IntegrationError {
    explicit Blowup(double at) : IntegrationError("state blow-up", at) {}
};

struct StepUnderflow : IntegrationError {
    explicit StepUnderflow(double at) : IntegrationError("step size underflow", at) {}
};

struct MaxStepsExceeded : IntegrationError {
    explicit MaxStepsExceeded(double at) : IntegrationError("maximum step count exceeded", at) {}
};

}  // namespace fiscids
