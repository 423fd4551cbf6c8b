#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "fiscids/integrate.hpp"
#include "fiscids/system.hpp"

namespace fiscids {

struct AxisSpec {
    double lo = 0, hi = 1;
    std::size_t count = 2;
};

// Cartesian evaluation grid; dimension 0 varies slowest in index order.
struct GridSpec {
    std::vector<AxisSpec> axes;

    std::size_t total_points() const;
    std::vector<double> point(std::size_t index) const;
    void validate() const;  // lo < hi, count >= 2
};

struct GridFailure {
    std::size_t index = 0;
    std::vector<double> point;
    std::string kind;
};

// Pointwise comparison summary. Every grid point is either a success counted
// into the maxima or an enumerated failure; nothing is skipped silently.
struct ErrorReport {
    double max_abs = 0;
    double max_rel = 0;  // relative to max(1, |reference|), componentwise
    std::vector<double> argmax_point;
    std::size_t successes = 0;
    std::vector<GridFailure> failures;

    std::size_t total_points() const { return successes + failures.size(); }
};

using Reference = std::function<std::vector<double>(const std::vector<double>&)>;

// Terminal output y(1; xi) against an opaque reference evaluator over the
// grid. threads <= 0 picks FISCIDS_THREADS or the hardware count.
ErrorReport grid_compare(const FiscidsSystem& sys, const Reference& reference,
                         const GridSpec& grid, const IntegrationConfig& config = {},
                         int threads = 0);

// Pointwise terminal-output difference of two systems on one grid.
ErrorReport cross_compare(const FiscidsSystem& a, const FiscidsSystem& b,
                          const GridSpec& grid, const IntegrationConfig& config = {},
                          int threads = 0);

std::string format_report(const ErrorReport& report);

// F(s, x) = integral_0^s du / (x e^u - u), by adaptive Simpson quadrature
// with absolute tolerance tol. Requires x > 1/e, which keeps the integrand
// denominator at least 1 + log(x) > 0; that bound is asserted at every
// sample point. Strictly increasing in s.
double tt_F(double s, double x, double tol = 1e-10);

// Self-test route for tt_F: fixed-order Gauss-Legendre panels, independent
// of the Simpson path.
double tt_F_gauss(double s, double x, std::size_t panels = 64);

// Inverse of w = F(s, x) in s on the domain 0 < w < 1/x, x > 1/e, found by
// bracketed bisection on the increasing F. |F(result, x) - w| <= tol.
double tt_G(double w, double x, double tol = 1e-10);

// Quadrature-plus-inversion value of y(1; xi1, xi2) for the built-in
// two-state test system, valid on 0 < xi1 < e*xi2, 0 < xi2 < 1; no ODE
// integration is involved.
double tt_oracle(double xi1, double xi2, double tol = 1e-9);

// Snapshot table of outputs over (times x grid): one row per pair, ordered
// times-major then grid index. Failed points carry a failure marker in the
// status column instead of fabricated values.
struct SnapshotTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

SnapshotTable snapshot(const FiscidsSystem& sys, const GridSpec& grid,
                       const std::vector<double>& times,
                       const IntegrationConfig& config = {}, int threads = 0);

void write_csv(const SnapshotTable& table, std::ostream& out);

// Runs fn(0..count-1) on a deterministic stripe partition; fn must not throw.
void parallel_for_indices(std::size_t count, int threads,
                          const std::function<void(std::size_t)>& fn);

}  // namespace fiscids
