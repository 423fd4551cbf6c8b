#include "fiscids/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

namespace fiscids {

std::size_t GridSpec::total_points() const {
    std::size_t total = 1;
    for (const AxisSpec& a : axes) total *= a.count;
    return axes.empty() ? 0 : total;
}

void GridSpec::validate() const {
    for (const AxisSpec& a : axes) {
        if (!(a.lo < a.hi)) throw Error("grid axis requires lo < hi");
        if (a.count < 2) throw Error("grid axis requires count >= 2");
    }
}

std::vector<double> GridSpec::point(std::size_t index) const {
    std::vector<double> out(axes.size());
    for (std::size_t d = axes.size(); d-- > 0;) {
        const AxisSpec& a = axes[d];
        std::size_t i = index % a.count;
        index /= a.count;
        out[d] = a.lo + (a.hi - a.lo) * static_cast<double>(i) /
                            static_cast<double>(a.count - 1);
    }
    return out;
}

void parallel_for_indices(std::size_t count, int threads,
                          const std::function<void(std::size_t)>& fn) {
    unsigned t = threads > 0 ? static_cast<unsigned>(threads) : 0;
    if (t == 0) {
        if (const char* env = std::getenv("FISCIDS_THREADS")) {
            long v = std::strtol(env, nullptr, 10);
            if (v > 0) t = static_cast<unsigned>(v);
        }
    }
    if (t == 0) t = std::max(1u, std::thread::hardware_concurrency());
    t = static_cast<unsigned>(std::min<std::size_t>(t, std::max<std::size_t>(count, 1)));
    if (t <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(t);
    for (unsigned w = 0; w < t; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < count; i += t) fn(i);
        });
    }
    for (std::thread& th : pool) th.join();
}

namespace {

struct PointOutcome {
    bool ok = false;
    double abs_diff = 0;
    double rel_diff = 0;
    std::string kind;
};

ErrorReport reduce_outcomes(const GridSpec& grid, const std::vector<PointOutcome>& outcomes) {
    ErrorReport report;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const PointOutcome& o = outcomes[i];
        if (!o.ok) {
            report.failures.push_back({i, grid.point(i), o.kind});
            continue;
        }
        ++report.successes;
        if (report.successes == 1 || o.abs_diff > report.max_abs) {
            report.max_abs = o.abs_diff;
            report.argmax_point = grid.point(i);
        }
        report.max_rel = std::max(report.max_rel, o.rel_diff);
    }
    return report;
}

ErrorReport compare_on_grid(const FiscidsSystem& sys, const Reference& reference,
                            const GridSpec& grid, const IntegrationConfig& config,
                            int threads) {
    grid.validate();
    std::size_t total = grid.total_points();
    std::vector<PointOutcome> outcomes(total);
    parallel_for_indices(total, threads, [&](std::size_t i) {
        PointOutcome& o = outcomes[i];
        std::vector<double> xi = grid.point(i);
        try {
            std::vector<double> got = output_at(sys, xi, 1.0, config);
            std::vector<double> want = reference(xi);
            if (got.size() != want.size()) {
                o.kind = "output-dimension-mismatch";
                return;
            }
            for (std::size_t c = 0; c < got.size(); ++c) {
                double d = std::abs(got[c] - want[c]);
                o.abs_diff = std::max(o.abs_diff, d);
                o.rel_diff = std::max(o.rel_diff, d / std::max(1.0, std::abs(want[c])));
            }
            if (!std::isfinite(o.abs_diff)) {
                o.kind = "non-finite-difference";
                return;
            }
            o.ok = true;
        } catch (const std::exception& e) {
            o.kind = failure_kind(e);
        }
    });
    return reduce_outcomes(grid, outcomes);
}

}  // namespace

ErrorReport grid_compare(const FiscidsSystem& sys, const Reference& reference,
                         const GridSpec& grid, const IntegrationConfig& config,
                         int threads) {
    return compare_on_grid(sys, reference, grid, config, threads);
}

ErrorReport cross_compare(const FiscidsSystem& a, const FiscidsSystem& b,
                          const GridSpec& grid, const IntegrationConfig& config,
                          int threads) {
    if (a.n != b.n || a.m != b.m)
        throw Error("cross_compare requires matching input/output dimensions");
    Reference b_terminal = [&b, config](const std::vector<double>& xi) {
        return output_at(b, xi, 1.0, config);
    };
    return compare_on_grid(a, b_terminal, grid, config, threads);
}

std::string format_report(const ErrorReport& report) {
    std::ostringstream os;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", report.max_abs);
    os << "points: " << report.total_points() << "  ok: " << report.successes
       << "  failed: " << report.failures.size() << "\n";
    os << "max_abs: " << buf;
    std::snprintf(buf, sizeof buf, "%.17g", report.max_rel);
    os << "  max_rel: " << buf << "\n";
    if (!report.argmax_point.empty()) {
        os << "argmax:";
        for (double v : report.argmax_point) {
            std::snprintf(buf, sizeof buf, " %.17g", v);
            os << buf;
        }
        os << "\n";
    }
    for (const GridFailure& f : report.failures) {
        os << "failure[" << f.index << "]:";
        for (double v : f.point) {
            std::snprintf(buf, sizeof buf, " %.17g", v);
            os << buf;
        }
        os << "  " << f.kind << "\n";
    }
    return os.str();
}

namespace {

constexpr double kInvE = 0.36787944117144233;  // 1/e

// Integrand of F with the positivity bound asserted at every sample.
double tt_integrand(double u, double x, double floor_value) {
    double den = x * std::exp(u) - u;
    if (den < floor_value - 1e-12)
        throw Error("quadrature integrand fell below its positivity bound");
    return 1.0 / den;
}

double simpson_panel(double fa, double fm, double fb, double h) {
    return (fa + 4 * fm + fb) * h / 6.0;
}

struct SimpsonWorker {
    double x;
    double floor_value;
    int max_depth = 48;

    double f(double u) const { return tt_integrand(u, x, floor_value); }

    double recurse(double a, double b, double fa, double fm, double fb, double whole,
                   double tol, int depth) const {
        double m = 0.5 * (a + b);
        double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
        double flm = f(lm), frm = f(rm);
        double left = simpson_panel(fa, flm, fm, m - a);
        double right = simpson_panel(fm, frm, fb, b - m);
        double err = left + right - whole;
        if (depth >= max_depth || std::abs(err) <= 15.0 * tol)
            return left + right + err / 15.0;
        return recurse(a, m, fa, flm, fm, left, tol / 2, depth + 1) +
               recurse(m, b, fm, frm, fb, right, tol / 2, depth + 1);
    }

    double integrate(double a, double b, double tol) const {
        if (a == b) return 0.0;
        double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
        double whole = simpson_panel(fa, fm, fb, b - a);
        return recurse(a, b, fa, fm, fb, whole, tol, 0);
    }
};

void require_tt_domain(double x) {
    if (!(x > kInvE)) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "x = %.17g is not above 1/e", x);
        throw DomainError(buf);
    }
}

}  // namespace

double tt_F(double s, double x, double tol) {
    require_tt_domain(x);
    if (tol <= 0) throw Error("quadrature tolerance must be positive");
    if (s == 0) return 0.0;
    SimpsonWorker worker{x, 1.0 + std::log(x)};
    if (s > 0) return worker.integrate(0.0, s, tol);
    return -worker.integrate(s, 0.0, tol);
}

double tt_F_gauss(double s, double x, std::size_t panels) {
    require_tt_domain(x);
    if (panels == 0) throw Error("panel count must be positive");
    // 8-point Gauss-Legendre nodes and weights on [-1, 1].
    static const double nodes[4] = {0.1834346424956498, 0.5255324099163290,
                                    0.7966664774136267, 0.9602898564975363};
    static const double weights[4] = {0.3626837833783620, 0.3137066458778873,
                                      0.2223810344533745, 0.1012285362903763};
    double floor_value = 1.0 + std::log(x);
    double acc = 0.0;
    double h = s / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
        double mid = (static_cast<double>(p) + 0.5) * h;
        double half = 0.5 * h;
        for (int i = 0; i < 4; ++i) {
            acc += weights[i] * half *
                   (tt_integrand(mid - half * nodes[i], x, floor_value) +
                    tt_integrand(mid + half * nodes[i], x, floor_value));
        }
    }
    return acc;
}

double tt_G(double w, double x, double tol) {
    require_tt_domain(x);
    if (!(w > 0) || !(w < 1.0 / x)) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "w = %.17g outside (0, 1/x)", w);
        throw DomainError(buf);
    }
    if (tol <= 0) throw Error("inversion tolerance must be positive");
    double qtol = tol / 8;

    double lo = 0.0, hi = 1.0;
    int expansions = 0;
    while (tt_F(hi, x, qtol) < w) {
        hi *= 2;
        if (++expansions > 60) throw BracketFailure("no upper bracket for the inverse");
    }
    // Bisection on the strictly increasing F.
    double mid = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        mid = 0.5 * (lo + hi);
        double fm = tt_F(mid, x, qtol);
        if (std::abs(fm - w) <= tol && hi - lo <= 1e-12 * std::max(1.0, hi)) return mid;
        if (fm < w)
            lo = mid;
        else
            hi = mid;
    }
    return mid;
}

double tt_oracle(double xi1, double xi2, double tol) {
    if (!(xi1 > 0) || !(xi2 > 0) || !(xi2 < 1) || !(xi1 < std::exp(1.0) * xi2)) {
        char buf[128];
        std::snprintf(buf, sizeof buf,
                      "(%.17g, %.17g) outside 0 < xi1 < e*xi2, 0 < xi2 < 1", xi1, xi2);
        throw DomainError(buf);
    }
    double x = xi2 / xi1;
    double s = tt_G(xi1, x, tol);
    return xi1 * s / xi2;
}

namespace {

std::string format_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

SnapshotTable snapshot(const FiscidsSystem& sys, const GridSpec& grid,
                       const std::vector<double>& times, const IntegrationConfig& config,
                       int threads) {
    grid.validate();
    if (grid.axes.size() != sys.n) throw Error("grid dimension != system input count");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < 0 || times[i] > 1) throw Error("snapshot time outside [0, 1]");
        if (i > 0 && times[i] < times[i - 1]) throw Error("snapshot times must be sorted");
    }

    SnapshotTable table;
    table.columns.push_back("t");
    for (const std::string& name : sys.input_names) table.columns.push_back(name);
    for (std::size_t i = 0; i < sys.m; ++i)
        table.columns.push_back("y" + std::to_string(i + 1));
    table.columns.push_back("status");

    std::size_t total = grid.total_points();
    std::vector<SampleRun> runs(total);
    parallel_for_indices(total, threads, [&](std::size_t i) {
        runs[i] = sample_outputs_partial(sys, grid.point(i), times, config);
    });

    for (std::size_t ti = 0; ti < times.size(); ++ti) {
        for (std::size_t gi = 0; gi < total; ++gi) {
            std::vector<std::string> row;
            row.push_back(format_value(times[ti]));
            for (double v : grid.point(gi)) row.push_back(format_value(v));
            if (ti < runs[gi].outputs.size()) {
                for (double v : runs[gi].outputs[ti]) row.push_back(format_value(v));
                row.push_back("ok");
            } else {
                for (std::size_t c = 0; c < sys.m; ++c) row.push_back("");
                row.push_back(runs[gi].failure.empty() ? "error" : runs[gi].failure);
            }
            table.rows.push_back(std::move(row));
        }
    }
    return table;
}

void write_csv(const SnapshotTable& table, std::ostream& out) {
    auto write_row = [&](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << row[i];
        }
        out << '\n';
    };
    write_row(table.columns);
    for (const auto& row : table.rows) write_row(row);
}

}  // namespace fiscids
