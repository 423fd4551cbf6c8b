#include "fiscids/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace fiscids {

CompiledSystem::Entry CompiledSystem::compile_entry(const RationalFn& fn) {
    Entry entry;
    auto compile_poly = [](const Poly& p, double scale) {
        std::vector<Term> out;
        out.reserve(p.terms().size());
        for (const auto& [mono, coeff] : p.terms()) {
            Term t;
            t.coeff = coeff.convert_to<double>() * scale;
            for (unsigned j = 0; j < mono.size(); ++j)
                if (mono.exponents[j] > 0) t.powers.emplace_back(j, mono.exponents[j]);
            out.push_back(std::move(t));
        }
        return out;
    };
    if (fn.is_polynomial()) {
        double inv_den = 1.0 / fn.den.constant_value().convert_to<double>();
        entry.num = compile_poly(fn.num, inv_den);
    } else {
        entry.num = compile_poly(fn.num, 1.0);
        entry.den = compile_poly(fn.den, 1.0);
    }
    return entry;
}

double CompiledSystem::eval_terms(const std::vector<Term>& terms,
                                  const std::vector<double>& z) {
    double acc = 0;
    for (const Term& t : terms) {
        double v = t.coeff;
        for (const auto& [j, e] : t.powers) {
            double zj = z[j];
            for (unsigned k = 0; k < e; ++k) v *= zj;
        }
        acc += v;
    }
    return acc;
}

double CompiledSystem::eval_entry(const Entry& e, const std::vector<double>& z) {
    double v = eval_terms(e.num, z);
    if (!e.den.empty()) v /= eval_terms(e.den, z);
    return v;
}

CompiledSystem::CompiledSystem(const FiscidsSystem& sys) {
    check_system(sys);
    n_ = sys.n;
    m_ = sys.m;
    N_ = sys.N;
    for (const auto& row : sys.F) {
        std::vector<Entry> compiled;
        compiled.reserve(row.size());
        for (const auto& fn : row) compiled.push_back(compile_entry(fn));
        F_.push_back(std::move(compiled));
    }
    if (sys.has_opaque_output()) {
        opaque_ = sys.opaque_output;
    } else {
        for (const auto& fn : sys.h) h_.push_back(compile_entry(fn));
    }
    z0_ = sys.z0_values();
    if (sys.base_point) {
        for (const Rational& r : *sys.base_point)
            base_point_.push_back(r.convert_to<double>());
    }
}

std::vector<double> CompiledSystem::effective_input(const std::vector<double>& xi) const {
    if (xi.size() != n_) throw Error("input length != n");
    if (base_point_.empty()) return xi;
    std::vector<double> out(n_);
    for (std::size_t j = 0; j < n_; ++j) out[j] = xi[j] - base_point_[j];
    return out;
}

void CompiledSystem::derivative(const std::vector<double>& z,
                                const std::vector<double>& xi_eff,
                                std::vector<double>& dz) const {
    dz.assign(N_, 0.0);
    for (std::size_t i = 0; i < N_; ++i) {
        double acc = 0;
        for (std::size_t j = 0; j < n_; ++j) {
            if (xi_eff[j] == 0.0) continue;
            acc += eval_entry(F_[i][j], z) * xi_eff[j];
        }
        dz[i] = acc;
    }
}

std::vector<double> CompiledSystem::output(const std::vector<double>& z) const {
    if (opaque_) return opaque_(z);
    std::vector<double> out;
    out.reserve(h_.size());
    for (const Entry& e : h_) {
        if (!e.den.empty()) {
            double den = eval_terms(e.den, z);
            if (den == 0) throw DomainError("output map denominator vanished");
            out.push_back(eval_terms(e.num, z) / den);
            continue;
        }
        out.push_back(eval_terms(e.num, z));
    }
    return out;
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247,
                 A64 = 49.0 / 176, A65 = -5103.0 / 18656;
constexpr double A71 = 35.0 / 384, A73 = 500.0 / 1113, A74 = 125.0 / 192,
                 A75 = -2187.0 / 6784, A76 = 11.0 / 84;
constexpr double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9;
// Difference between the 5th and embedded 4th order weights.
constexpr double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920,
                 E5 = -17253.0 / 339200, E6 = 22.0 / 525, E7 = -1.0 / 40;
// Dense output coefficients.
constexpr double D1 = -12715105075.0 / 11282082432.0;
constexpr double D3 = 87487479700.0 / 32700410799.0;
constexpr double D4 = -10690763975.0 / 1880347072.0;
constexpr double D5 = 701980252875.0 / 199316789632.0;
constexpr double D6 = -1453857185.0 / 822651844.0;
constexpr double D7 = 69997945.0 / 29380423.0;

using Vec = std::vector<double>;

void axpy(Vec& out, const Vec& y, double h, std::initializer_list<std::pair<double, const Vec*>> ks) {
    std::size_t n = y.size();
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0;
        for (const auto& [c, k] : ks) acc += c * (*k)[i];
        out[i] = y[i] + h * acc;
    }
}

bool all_finite(const Vec& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

// Quartic interpolant over one accepted step; exact at both endpoints.
struct DenseStep {
    Vec r1, r2, r3, r4, r5;
    void eval(double theta, Vec& out) const {
        double t1 = 1.0 - theta;
        out.resize(r1.size());
        for (std::size_t i = 0; i < r1.size(); ++i)
            out[i] = r1[i] +
                     theta * (r2[i] + t1 * (r3[i] + theta * (r4[i] + t1 * r5[i])));
    }
};

struct StepConsumer {
    // Called after every accepted step with the dense interpolant.
    virtual void on_step(double t0, double t1, const Vec& y1, const DenseStep& dense) = 0;
    virtual ~StepConsumer() = default;
};

void check_state(const Vec& y, double t, double bound) {
    for (double x : y)
        if (!std::isfinite(x) || std::abs(x) > bound) throw Blowup(t);
}

double initial_step(const CompiledSystem& cs, const Vec& xi, const Vec& y0, const Vec& f0,
                    double t_end, const IntegrationConfig& cfg) {
    std::size_t N = y0.size();
    double d0 = 0, d1 = 0;
    for (std::size_t i = 0; i < N; ++i) {
        double sc = cfg.abs_tol + cfg.rel_tol * std::abs(y0[i]);
        d0 += (y0[i] / sc) * (y0[i] / sc);
        d1 += (f0[i] / sc) * (f0[i] / sc);
    }
    d0 = std::sqrt(d0 / N);
    d1 = std::sqrt(d1 / N);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, t_end);
    // One Euler probe to estimate the second derivative scale.
    Vec y1(N), f1(N);
    for (std::size_t i = 0; i < N; ++i) y1[i] = y0[i] + h0 * f0[i];
    cs.derivative(y1, xi, f1);
    double d2 = 0;
    for (std::size_t i = 0; i < N; ++i) {
        double sc = cfg.abs_tol + cfg.rel_tol * std::abs(y0[i]);
        double df = (f1[i] - f0[i]) / sc;
        d2 += df * df;
    }
    d2 = std::sqrt(d2 / N) / h0;
    double dm = std::max(d1, d2);
    double h1 = dm > 1e-15 ? std::pow(0.01 / dm, 0.2) : std::max(1e-6, h0 * 1e-3);
    double h = std::min({100 * h0, h1, t_end});
    return std::isfinite(h) && h > 0 ? h : 1e-6;
}

void run_adaptive(const CompiledSystem& cs, const Vec& xi_eff, double t_end,
                  const IntegrationConfig& cfg, StepConsumer& consumer) {
    std::size_t N = cs.N();
    Vec y = cs.z0();
    double t = 0;
    check_state(y, 0.0, cfg.blowup_bound);
    if (t_end <= 0) return;

    Vec k1(N), k2(N), k3(N), k4(N), k5(N), k6(N), k7(N), ytmp(N), ynew(N);
    cs.derivative(y, xi_eff, k1);
    double h = initial_step(cs, xi_eff, y, k1, t_end, cfg);
    long steps = 0;

    while (t < t_end) {
        if (++steps > cfg.max_steps) throw MaxStepsExceeded(t);
        bool clamped = h >= t_end - t;
        if (clamped) h = t_end - t;
        if (h < 1e-14 * t_end) throw StepUnderflow(t);

        axpy(ytmp, y, h, {{A21, &k1}});
        cs.derivative(ytmp, xi_eff, k2);
        axpy(ytmp, y, h, {{A31, &k1}, {A32, &k2}});
        cs.derivative(ytmp, xi_eff, k3);
        axpy(ytmp, y, h, {{A41, &k1}, {A42, &k2}, {A43, &k3}});
        cs.derivative(ytmp, xi_eff, k4);
        axpy(ytmp, y, h, {{A51, &k1}, {A52, &k2}, {A53, &k3}, {A54, &k4}});
        cs.derivative(ytmp, xi_eff, k5);
        axpy(ytmp, y, h, {{A61, &k1}, {A62, &k2}, {A63, &k3}, {A64, &k4}, {A65, &k5}});
        cs.derivative(ytmp, xi_eff, k6);
        axpy(ynew, y, h, {{A71, &k1}, {A73, &k3}, {A74, &k4}, {A75, &k5}, {A76, &k6}});
        cs.derivative(ynew, xi_eff, k7);

        double err = 0;
        bool finite = all_finite(ynew) && all_finite(k7);
        if (finite) {
            for (std::size_t i = 0; i < N; ++i) {
                double e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] +
                                E6 * k6[i] + E7 * k7[i]);
                double sc = cfg.abs_tol +
                            cfg.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
                err += (e / sc) * (e / sc);
            }
            err = std::sqrt(err / N);
        }

        if (!finite || !std::isfinite(err)) {
            h *= 0.5;
            continue;
        }
        if (err > 1.0) {
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            continue;
        }

        // Accepted.
        double t1 = clamped ? t_end : t + h;
        check_state(ynew, t1, cfg.blowup_bound);

        DenseStep dense;
        dense.r1 = y;
        dense.r2.resize(N);
        dense.r3.resize(N);
        dense.r4.resize(N);
        dense.r5.resize(N);
        for (std::size_t i = 0; i < N; ++i) {
            double ydiff = ynew[i] - y[i];
            double bspl = h * k1[i] - ydiff;
            dense.r2[i] = ydiff;
            dense.r3[i] = bspl;
            dense.r4[i] = ydiff - h * k7[i] - bspl;
            dense.r5[i] = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] +
                               D6 * k6[i] + D7 * k7[i]);
        }
        consumer.on_step(t, t1, ynew, dense);

        y = ynew;
        k1 = k7;  // first-same-as-last
        t = t1;
        if (t < t_end) {
            double factor = err > 0 ? std::min(5.0, std::max(0.2, 0.9 * std::pow(err, -0.2)))
                                    : 5.0;
            h *= factor;
        }
    }
}

void run_fixed(const CompiledSystem& cs, const Vec& xi_eff, double t_end,
               const IntegrationConfig& cfg, StepConsumer& consumer) {
    std::size_t N = cs.N();
    Vec y = cs.z0();
    check_state(y, 0.0, cfg.blowup_bound);
    if (t_end <= 0) return;
    int steps = std::max(1, cfg.fixed_steps);
    double h = t_end / steps;
    Vec k1(N), k2(N), k3(N), k4(N), ytmp(N), ynew(N), f1(N);

    for (int s = 0; s < steps; ++s) {
        double t0 = t_end * s / steps;
        double t1 = s + 1 == steps ? t_end : t_end * (s + 1) / steps;
        cs.derivative(y, xi_eff, k1);
        axpy(ytmp, y, h / 2, {{1.0, &k1}});
        cs.derivative(ytmp, xi_eff, k2);
        axpy(ytmp, y, h / 2, {{1.0, &k2}});
        cs.derivative(ytmp, xi_eff, k3);
        axpy(ytmp, y, h, {{1.0, &k3}});
        cs.derivative(ytmp, xi_eff, k4);
        for (std::size_t i = 0; i < N; ++i)
            ynew[i] = y[i] + (h / 6) * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        if (!all_finite(ynew)) throw Blowup(t1);
        check_state(ynew, t1, cfg.blowup_bound);

        // Cubic Hermite dense output in the quartic interpolant layout:
        // r1 + th*(r2 + (1-th)*(r3 + th*r4)), r5 = 0.
        cs.derivative(ynew, xi_eff, f1);
        DenseStep dense;
        dense.r1 = y;
        dense.r2.resize(N);
        dense.r3.resize(N);
        dense.r4.resize(N);
        dense.r5.assign(N, 0.0);
        for (std::size_t i = 0; i < N; ++i) {
            double ydiff = ynew[i] - y[i];
            dense.r2[i] = ydiff;
            dense.r3[i] = h * k1[i] - ydiff;
            dense.r4[i] = ydiff - h * f1[i] - dense.r3[i];
        }
        consumer.on_step(t0, t1, ynew, dense);
        y = ynew;
    }
}

void run_driver(const CompiledSystem& cs, const Vec& xi_eff, double t_end,
                const IntegrationConfig& cfg, StepConsumer& consumer) {
    if (cfg.abs_tol <= 0 || cfg.rel_tol <= 0) throw Error("tolerances must be positive");
    if (cfg.blowup_bound <= 0) throw Error("blowup bound must be positive");
    if (cfg.method == Method::AdaptiveRK45)
        run_adaptive(cs, xi_eff, t_end, cfg, consumer);
    else
        run_fixed(cs, xi_eff, t_end, cfg, consumer);
}

struct TrajectoryConsumer : StepConsumer {
    const CompiledSystem& cs;
    Trajectory traj;

    explicit TrajectoryConsumer(const CompiledSystem& c) : cs(c) {
        traj.times.push_back(0.0);
        traj.states.push_back(cs.z0());
        traj.outputs.push_back(cs.output(cs.z0()));
    }

    void on_step(double, double t1, const Vec& y1, const DenseStep&) override {
        traj.times.push_back(t1);
        traj.states.push_back(y1);
        traj.outputs.push_back(cs.output(y1));
    }
};

struct SamplingConsumer : StepConsumer {
    const CompiledSystem& cs;
    const std::vector<double>& times;
    std::size_t next = 0;
    std::vector<std::vector<double>> outputs;
    Vec scratch;

    SamplingConsumer(const CompiledSystem& c, const std::vector<double>& ts)
        : cs(c), times(ts) {
        // Times at (or numerically before) zero sample the initial state.
        while (next < times.size() && times[next] <= 0.0) {
            outputs.push_back(cs.output(cs.z0()));
            ++next;
        }
    }

    void on_step(double t0, double t1, const Vec& y1, const DenseStep& dense) override {
        while (next < times.size() && times[next] <= t1) {
            double theta = (times[next] - t0) / (t1 - t0);
            dense.eval(theta, scratch);
            outputs.push_back(cs.output(scratch));
            ++next;
        }
        (void)y1;
    }
};

}  // namespace

Trajectory integrate(const FiscidsSystem& sys, const std::vector<double>& xi,
                     const IntegrationConfig& config) {
    CompiledSystem cs(sys);
    TrajectoryConsumer consumer(cs);
    run_driver(cs, cs.effective_input(xi), 1.0, config, consumer);
    return std::move(consumer.traj);
}

std::vector<double> output_at(const FiscidsSystem& sys, const std::vector<double>& xi,
                              double t, const IntegrationConfig& config) {
    if (t < 0 || t > 1) throw Error("output time outside [0, 1]");
    CompiledSystem cs(sys);
    if (t == 0) return cs.output(cs.z0());
    struct Terminal : StepConsumer {
        Vec last;
        void on_step(double, double, const Vec& y1, const DenseStep&) override { last = y1; }
    } consumer;
    consumer.last = cs.z0();
    run_driver(cs, cs.effective_input(xi), t, config, consumer);
    return cs.output(consumer.last);
}

std::vector<std::vector<double>> sample_outputs(const FiscidsSystem& sys,
                                                const std::vector<double>& xi,
                                                const std::vector<double>& times,
                                                const IntegrationConfig& config) {
    if (times.empty()) return {};
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < 0 || times[i] > 1) throw Error("sample time outside [0, 1]");
        if (i > 0 && times[i] < times[i - 1]) throw Error("sample times must be sorted");
    }
    CompiledSystem cs(sys);
    SamplingConsumer consumer(cs, times);
    if (consumer.next < times.size())
        run_driver(cs, cs.effective_input(xi), times.back(), config, consumer);
    return std::move(consumer.outputs);
}

std::string failure_kind(const std::exception& e) {
    if (dynamic_cast<const Blowup*>(&e)) return "blowup";
    if (dynamic_cast<const StepUnderflow*>(&e)) return "step-underflow";
    if (dynamic_cast<const MaxStepsExceeded*>(&e)) return "max-steps";
    if (dynamic_cast<const DomainError*>(&e)) return "domain-error";
    return "error";
}

SampleRun sample_outputs_partial(const FiscidsSystem& sys, const std::vector<double>& xi,
                                 const std::vector<double>& times,
                                 const IntegrationConfig& config) {
    SampleRun run;
    if (times.empty()) return run;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < 0 || times[i] > 1) throw Error("sample time outside [0, 1]");
        if (i > 0 && times[i] < times[i - 1]) throw Error("sample times must be sorted");
    }
    CompiledSystem cs(sys);
    std::unique_ptr<SamplingConsumer> consumer;
    try {
        consumer = std::make_unique<SamplingConsumer>(cs, times);
        if (consumer->next < times.size())
            run_driver(cs, cs.effective_input(xi), times.back(), config, *consumer);
    } catch (const std::exception& e) {
        run.failure = failure_kind(e);
    }
    if (consumer) run.outputs = std::move(consumer->outputs);
    return run;
}

}  // namespace fiscids
