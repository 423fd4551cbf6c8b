#pragma once

#include <vector>

#include "fiscids/system.hpp"

namespace fiscids {

enum class Method { AdaptiveRK45, FixedRK4 };

struct IntegrationConfig {
    Method method = Method::AdaptiveRK45;
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int fixed_steps = 1000;
    long max_steps = 1000000;
    double blowup_bound = 1e12;
};

// Accepted-step samples of one integration run. On a full run times front/back
// are exactly 0 and 1, and states.front() is z0 bit-for-bit.
struct Trajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> states;
    std::vector<std::vector<double>> outputs;
};

// Right-hand side compiled to flattened term lists: one double coefficient
// per term, constant denominators folded into the numerator. No symbolic
// evaluation happens in the stepping loop.
class CompiledSystem {
public:
    explicit CompiledSystem(const FiscidsSystem& sys);

    std::size_t n() const { return n_; }
    std::size_t N() const { return N_; }
    const std::vector<double>& z0() const { return z0_; }

    // xi - base_point (identity when no base point is set).
    std::vector<double> effective_input(const std::vector<double>& xi) const;

    void derivative(const std::vector<double>& z, const std::vector<double>& xi_eff,
                    std::vector<double>& dz) const;
    std::vector<double> output(const std::vector<double>& z) const;

private:
    struct Term {
        double coeff;
        std::vector<std::pair<unsigned, unsigned>> powers;  // (state index, exponent)
    };
    struct Entry {
        std::vector<Term> num;
        std::vector<Term> den;  // empty for polynomial entries
    };

    static Entry compile_entry(const RationalFn& fn);
    static double eval_terms(const std::vector<Term>& terms, const std::vector<double>& z);
    static double eval_entry(const Entry& e, const std::vector<double>& z);

    std::size_t n_ = 0, m_ = 0, N_ = 0;
    std::vector<std::vector<Entry>> F_;
    std::vector<Entry> h_;
    OpaqueMap opaque_;
    std::vector<double> z0_;
    std::vector<double> base_point_;
};

// Integrates dz/dt = F(z) (xi - xi0) over [0, 1] from z0. Throws Blowup,
// StepUnderflow, or MaxStepsExceeded; a blow-up means xi lies outside the
// representable domain of the system.
Trajectory integrate(const FiscidsSystem& sys, const std::vector<double>& xi,
                     const IntegrationConfig& config = {});

// h(z(t; xi)). No integration happens at t = 0: the result is h(z0) exactly.
std::vector<double> output_at(const FiscidsSystem& sys, const std::vector<double>& xi,
                              double t, const IntegrationConfig& config = {});

// One integration pass to the last requested time, with outputs interpolated
// from the method's dense interpolant at each time. Times must be sorted
// within [0, 1].
std::vector<std::vector<double>> sample_outputs(const FiscidsSystem& sys,
                                                const std::vector<double>& xi,
                                                const std::vector<double>& times,
                                                const IntegrationConfig& config = {});

// Like sample_outputs, but an integration failure yields the samples reached
// so far plus the failure kind instead of throwing.
struct SampleRun {
    std::vector<std::vector<double>> outputs;  // one per leading sample time
    std::string failure;                       // empty on full success
};
SampleRun sample_outputs_partial(const FiscidsSystem& sys, const std::vector<double>& xi,
                                 const std::vector<double>& times,
                                 const IntegrationConfig& config = {});

// Short machine-readable tag for a failure ("blowup", "domain-error", ...).
std::string failure_kind(const std::exception& e);

}  // namespace fiscids
