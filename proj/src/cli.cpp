#include "fiscids/cli.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "fiscids/lift.hpp"
#include "fiscids/presets.hpp"
#include "fiscids/transform.hpp"
#include "fiscids/verify.hpp"

namespace fiscids {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

Rational parse_rational_value(const std::string& text) {
    Expr e = parse_expression(text, {});
    if (e.kind() != ExprKind::Const)
        throw Error("'" + text + "' is not an exact rational value");
    return e.value();
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    for (const std::string& item : split(text, ',')) {
        try {
            std::size_t used = 0;
            double v = std::stod(item, &used);
            if (used != item.size()) throw Error("trailing characters");
            out.push_back(v);
        } catch (const std::exception&) {
            throw Error("'" + item + "' is not a number");
        }
    }
    return out;
}

GridSpec parse_box(const std::string& text) {
    GridSpec grid;
    for (const std::string& axis : split(text, ',')) {
        std::vector<std::string> parts = split(axis, ':');
        if (parts.size() != 3) throw Error("box axis must be lo:hi:count");
        AxisSpec spec;
        try {
            spec.lo = std::stod(parts[0]);
            spec.hi = std::stod(parts[1]);
            long count = std::stol(parts[2]);
            if (count < 2) throw Error("count");
            spec.count = static_cast<std::size_t>(count);
        } catch (const std::exception&) {
            throw Error("malformed box axis '" + axis + "'");
        }
        grid.axes.push_back(spec);
    }
    grid.validate();
    return grid;
}

struct SolverFlags {
    std::string method = "adaptive";
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int fixed_steps = 1000;
    long max_steps = 1000000;
    double blowup_bound = 1e12;

    void attach(CLI::App* cmd) {
        cmd->add_option("--method", method, "Integration method: adaptive|fixed")
            ->check(CLI::IsMember({"adaptive", "fixed"}));
        cmd->add_option("--abs-tol", abs_tol, "Absolute tolerance");
        cmd->add_option("--rel-tol", rel_tol, "Relative tolerance");
        cmd->add_option("--fixed-steps", fixed_steps, "Steps for the fixed method");
        cmd->add_option("--max-steps", max_steps, "Adaptive step limit");
        cmd->add_option("--blowup-bound", blowup_bound, "State magnitude limit");
    }

    IntegrationConfig config() const {
        IntegrationConfig cfg;
        cfg.method = method == "fixed" ? Method::FixedRK4 : Method::AdaptiveRK45;
        cfg.abs_tol = abs_tol;
        cfg.rel_tol = rel_tol;
        cfg.fixed_steps = fixed_steps;
        cfg.max_steps = max_steps;
        cfg.blowup_bound = blowup_bound;
        return cfg;
    }
};

std::string format_output_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

// Applies the transform ladder only where the target validation fails.
FiscidsSystem to_target_class(FiscidsSystem sys, SystemClass target) {
    if (target == SystemClass::Polynomial || target == SystemClass::Quadratic) {
        if (!validate_class(sys, SystemClass::Polynomial).pass) sys = r_to_p(std::move(sys));
    }
    if (target == SystemClass::Quadratic) {
        if (!validate_class(sys, SystemClass::Quadratic).pass) sys = p_to_q(std::move(sys));
    }
    return with_class(std::move(sys), target);
}

SystemClass target_from_flag(const std::string& flag) {
    if (flag == "r") return SystemClass::Rational;
    if (flag == "p") return SystemClass::Polynomial;
    return SystemClass::Quadratic;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Compile closed-form functions into input-affine dynamical systems "
                 "and evaluate them by integration over [0, 1]"};
    app.require_subcommand(1);

    // build
    auto* build = app.add_subcommand("build", "Lift an expression into a system document");
    std::string build_expr, build_vars, build_base, build_class = "q", build_out;
    std::size_t build_cap = 64;
    build->add_option("--expr", build_expr, "Expression over the input variables")->required();
    build->add_option("--vars", build_vars, "Comma-separated input names")->required();
    build->add_option("--base-point", build_base, "Comma-separated rational base point");
    build->add_option("--class", build_class, "Target class: r|p|q")
        ->check(CLI::IsMember({"r", "p", "q"}));
    build->add_option("--cap", build_cap, "Maximum closure state count");
    build->add_option("--out", build_out, "Output document path")->required();

    // transform
    auto* transform = app.add_subcommand("transform", "Transform a system document");
    std::string tr_in, tr_to, tr_out;
    transform->add_option("--in", tr_in, "Input document")->required();
    transform->add_option("--to", tr_to, "Target class: p|q")
        ->required()
        ->check(CLI::IsMember({"p", "q"}));
    transform->add_option("--out", tr_out, "Output document path")->required();

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Integrate and print the output");
    std::string ev_in, ev_xi;
    double ev_t = 1.0;
    SolverFlags ev_flags;
    eval_cmd->add_option("--in", ev_in, "Input document")->required();
    eval_cmd->add_option("--xi", ev_xi, "Comma-separated input values")->required();
    eval_cmd->add_option("--t", ev_t, "Output time in [0, 1]");
    ev_flags.attach(eval_cmd);

    // verify
    auto* verify = app.add_subcommand("verify", "Compare terminal outputs over a grid");
    std::string vf_in, vf_ref, vf_against, vf_box;
    double vf_max_err = 1e-6;
    SolverFlags vf_flags;
    verify->add_option("--in", vf_in, "Input document")->required();
    auto* ref_opt = verify->add_option("--ref-expr", vf_ref, "Reference expression");
    auto* against_opt =
        verify->add_option("--against", vf_against, "Reference system document");
    ref_opt->excludes(against_opt);
    verify->add_option("--box", vf_box, "Grid: lo:hi:count per dimension")->required();
    verify->add_option("--max-err", vf_max_err, "Failure threshold on max_abs");
    vf_flags.attach(verify);

    // snapshot
    auto* snap = app.add_subcommand("snapshot", "Export outputs over times and a grid");
    std::string sn_in, sn_box, sn_times, sn_out;
    SolverFlags sn_flags;
    snap->add_option("--in", sn_in, "Input document")->required();
    snap->add_option("--box", sn_box, "Grid: lo:hi:count per dimension")->required();
    snap->add_option("--times", sn_times, "Comma-separated times in [0, 1]")->required();
    snap->add_option("--out", sn_out, "Output CSV path")->required();
    sn_flags.attach(snap);

    // example
    auto* example = app.add_subcommand("example", "Write a built-in system document");
    std::string ex_name, ex_out;
    example->add_option("--name", ex_name, "gaussian|logpoly|tt")
        ->required()
        ->check(CLI::IsMember({"gaussian", "logpoly", "tt"}));
    example->add_option("--out", ex_out, "Output document path")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return 2;
    }

    try {
        if (build->parsed()) {
            std::vector<VarId> vars = make_vars(split(build_vars, ','));
            LiftOptions options;
            options.cap = build_cap;
            if (!build_base.empty())
                for (const std::string& item : split(build_base, ','))
                    options.base_point.push_back(parse_rational_value(item));
            Expr phi = parse_expression(build_expr, vars);
            FiscidsSystem sys = lift({phi}, vars, options);
            sys = to_target_class(std::move(sys), target_from_flag(build_class));
            save_system(sys, build_out);
            out << "wrote " << build_out << " (" << class_name(sys.cls) << ", N=" << sys.N
                << ")\n";
            return 0;
        }
        if (transform->parsed()) {
            FiscidsSystem sys = load_system(tr_in);
            sys = to_target_class(std::move(sys), target_from_flag(tr_to));
            save_system(sys, tr_out);
            out << "wrote " << tr_out << " (" << class_name(sys.cls) << ", N=" << sys.N
                << ")\n";
            return 0;
        }
        if (eval_cmd->parsed()) {
            FiscidsSystem sys = load_system(ev_in);
            std::vector<double> xi = parse_double_list(ev_xi);
            if (ev_t < 0 || ev_t > 1) throw Error("--t must lie in [0, 1]");
            std::vector<double> y = output_at(sys, xi, ev_t, ev_flags.config());
            for (std::size_t i = 0; i < y.size(); ++i)
                out << (i ? " " : "") << format_output_value(y[i]);
            out << "\n";
            return 0;
        }
        if (verify->parsed()) {
            FiscidsSystem sys = load_system(vf_in);
            GridSpec grid = parse_box(vf_box);
            if (grid.axes.size() != sys.n)
                throw Error("box dimension != system input count");
            ErrorReport report;
            if (!vf_ref.empty()) {
                std::vector<VarId> vars = sys.input_vars();
                Expr ref = parse_expression(vf_ref, vars);
                Reference fn = [&](const std::vector<double>& xi) {
                    return std::vector<double>{eval(ref, xi)};
                };
                if (sys.m != 1) throw Error("--ref-expr requires a single-output system");
                report = grid_compare(sys, fn, grid, vf_flags.config());
            } else if (!vf_against.empty()) {
                FiscidsSystem other = load_system(vf_against);
                report = cross_compare(sys, other, grid, vf_flags.config());
            } else {
                throw Error("verify requires --ref-expr or --against");
            }
            out << format_report(report);
            bool ok = report.failures.empty() && report.max_abs <= vf_max_err;
            return ok ? 0 : 1;
        }
        if (snap->parsed()) {
            FiscidsSystem sys = load_system(sn_in);
            GridSpec grid = parse_box(sn_box);
            std::vector<double> times = parse_double_list(sn_times);
            SnapshotTable table = snapshot(sys, grid, times, sn_flags.config());
            std::ofstream file(sn_out);
            if (!file) throw Error("cannot open '" + sn_out + "' for writing");
            write_csv(table, file);
            out << "wrote " << sn_out << " (" << table.rows.size() << " rows)\n";
            return 0;
        }
        if (example->parsed()) {
            FiscidsSystem sys;
            if (ex_name == "gaussian")
                sys = presets::gaussian();
            else if (ex_name == "logpoly")
                sys = presets::logpoly_r();
            else
                sys = presets::tt_system();
            save_system(sys, ex_out);
            out << "wrote " << ex_out << " (" << class_name(sys.cls) << ", N=" << sys.N
                << ")\n";
            return 0;
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    err << "no subcommand\n";
    return 2;
}

}  // namespace fiscids
