#include "grasp/analysis.hpp"
#include "grasp/experiment.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <ostream>

namespace grasp {

namespace {

namespace fs = std::filesystem;

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
    return out;
}

fs::path sibling(const fs::path& path, const std::string& suffix) {
    fs::path out = path;
    out.replace_extension();
    out += suffix;
    return out;
}

struct SolveArgs {
    std::string data;
    std::string objective = "logistic";
    std::string method = "grasp";
    std::optional<double> eta;
    std::optional<double> kappa;
    Index sparsity = 1;
    int max_iters = 100;
    double tol = 1e-7;
    bool intercept = false;
    std::optional<Index> p;
    std::string newton_form = "gradient";
    std::string out = "trace.csv";
    std::string estimate;
    std::uint64_t seed = 0;
};

int do_solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
    const ObjectiveKind kind = parse_objective_kind(a.objective);
    const LabelKind labels = kind == ObjectiveKind::squared_error ? LabelKind::real : LabelKind::binary;
    Dataset data = read_dataset(a.data, labels);
    if (a.p && *a.p != data.p()) {
        throw std::invalid_argument("--p " + std::to_string(*a.p) + " does not match the " + std::to_string(data.p()) +
                                    " feature columns of " + a.data);
    }
    data.intercept = a.intercept;
    const ObjectiveHandle f = make_objective(kind, data, a.eta);

    SolverReport report;
    if (a.method == "logit_omp") {
        SolverOptions check;
        check.sparsity = a.sparsity;
        check.validate(data.p());
        report = logit_omp(*f, a.sparsity);
    } else {
        SolverOptions opts;
        opts.sparsity = a.sparsity;
        opts.max_outer_iters = a.max_iters;
        opts.iterate_tol = a.tol;
        opts.kappa = a.kappa;
        if (a.method == "grasp_debias") {
            opts.debias = true;
        } else if (a.method == "grasp_newton") {
            opts.variant = Variant::newton_step;
        } else if (a.method == "grasp_iht") {
            opts.variant = Variant::gradient_step;
        } else if (a.method != "grasp") {
            throw CLI::ValidationError("--method", "unknown method '" + a.method + "'");
        }
        if (a.newton_form == "printed") {
            opts.newton_form = NewtonForm::printed;
        } else if (a.newton_form != "gradient") {
            throw CLI::ValidationError("--newton-form", "expected gradient or printed");
        }
        report = grasp_solve(*f, opts);
    }

    {
        auto trace = open_out(a.out);
        write_trace_csv(trace, report);
    }
    SparseParameter est;
    est.x_star = report.final_estimate.head(data.p());
    est.intercept = a.intercept ? report.final_estimate(data.p()) : 0.0;
    const fs::path estimate_path = a.estimate.empty() ? sibling(a.out, ".estimate.csv") : fs::path(a.estimate);
    write_parameter(estimate_path, est);

    out << "termination," << to_string(report.termination) << '\n'
        << "iterations," << report.outer_iterations() << '\n'
        << "best_iteration," << report.best_iteration << '\n'
        << "loss," << format_double(report.final_loss) << '\n'
        << "trace," << a.out << '\n'
        << "estimate," << estimate_path.string() << '\n';
    if (report.merged_support_saturated) err << "warning: 3s exceeds p; the merged support is the whole space\n";
    return kExitOk;
}

struct SweepArgs {
    SweepConfig cfg = SweepConfig::desk_defaults();
    std::vector<std::string> methods;
    std::optional<double> eta;
    std::string out = "sweep.csv";
    std::string summary;
};

int do_sweep(SweepArgs& a, std::ostream& out) {
    if (!a.methods.empty()) {
        a.cfg.methods.clear();
        for (const auto& m : a.methods) a.cfg.methods.push_back(parse_method(m));
    }
    a.cfg.eta.fixed = a.eta;
    a.cfg.validate();
    const auto rows = run_sweep(a.cfg);
    {
        auto f = open_out(a.out);
        write_trial_csv(f, rows, a.cfg.timing);
    }
    const fs::path summary = a.summary.empty() ? sibling(a.out, ".summary.csv") : fs::path(a.summary);
    {
        auto f = open_out(summary);
        write_summary_csv(f, rows);
    }
    std::size_t failures = 0;
    for (const auto& r : rows) failures += r.error.empty() ? 0 : 1;
    out << "rows," << rows.size() << '\n'
        << "failures," << failures << '\n'
        << "trials_csv," << a.out << '\n'
        << "summary_csv," << summary.string() << '\n';
    return kExitOk;
}

struct GenArgs {
    GenConfig cfg;
    std::string out = "data.csv";
    std::string param;
};

int do_gen(const GenArgs& a, std::ostream& out) {
    const SyntheticProblem prob = generate_problem(a.cfg);
    write_dataset(fs::path(a.out), prob.data);
    const fs::path param = a.param.empty() ? sibling(a.out, ".param.csv") : fs::path(a.param);
    write_parameter(param, prob.truth);
    out << "data," << a.out << '\n' << "param," << param.string() << '\n';
    return kExitOk;
}

struct CertifyArgs {
    std::string data;
    std::string objective = "logistic_l2";
    std::optional<double> eta;
    bool intercept = false;
    Index k = 2;
    std::uint64_t budget = 1000;
    std::uint64_t cap = 20000;
    std::uint64_t seed = 0;
    double tau = 1.0;
    double eps = 0.1;
    std::string out;
};

int do_certify(const CertifyArgs& a, std::ostream& out) {
    const ObjectiveKind kind = parse_objective_kind(a.objective);
    Dataset data = read_dataset(a.data, kind == ObjectiveKind::squared_error ? LabelKind::real : LabelKind::binary);
    data.intercept = a.intercept;
    const ObjectiveHandle f = make_objective(kind, data, a.eta);

    SrhOptions opts;
    opts.budget = a.budget;
    opts.seed = a.seed;
    opts.exhaustive_cap = a.cap;
    const SrhEstimate est = estimate_srh(*f, a.k, opts);

    std::ofstream file;
    std::ostream* dst = &out;
    if (!a.out.empty()) {
        file = open_out(a.out);
        dst = &file;
    }
    std::ostream& o = *dst;
    o << "key,value\n"
      << "k," << est.k << '\n'
      << "mode," << est.mode() << '\n'
      << "evaluations," << est.evaluations << '\n'
      << "B_min," << format_double(est.B_min) << '\n'
      << "A_max," << format_double(est.A_max) << '\n'
      << "mu_k," << metric_cell(est.mu_k) << '\n'
      << "valid," << (est.valid ? 1 : 0) << '\n';

    if (kind == ObjectiveKind::logistic_l2 && a.k <= data.p()) {
        const ThetaEstimate th = estimate_theta(data.features, a.k, a.budget, a.seed, a.cap);
        o << "R," << format_double(th.R) << '\n'
          << "theta_bar," << format_double(th.theta_bar) << '\n'
          << "theta_tilde," << format_double(th.theta_tilde) << '\n'
          << "mu_bound," << format_double(srh_mu_bound(*a.eta, th.theta_bar, a.tau)) << '\n';
        if (th.R > 0.0 && th.theta_tilde > 0.0) {
            ChernoffParams cp{th.R, th.theta_bar, th.theta_tilde, a.tau, a.eps};
            o << "sample_bound," << chernoff_sample_bound(cp, a.k, data.p()) << '\n';
        }
    }
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Gradient support pursuit for sparsity-constrained minimization"};
    app.require_subcommand(1);

    SolveArgs solve;
    auto* s = app.add_subcommand("solve", "Run a sparse solver on a dataset CSV");
    s->add_option("--data", solve.data, "Dataset CSV (y,x1,...,xp)")->required();
    s->add_option("--objective", solve.objective, "squared_error | logistic | logistic_l2");
    s->add_option("--method", solve.method, "grasp | grasp_debias | grasp_newton | grasp_iht | logit_omp");
    s->add_option("--sparsity", solve.sparsity, "Sparsity level s")->required();
    s->add_option("--eta", solve.eta, "Ridge weight for logistic_l2");
    s->add_option("--kappa", solve.kappa, "Step size for grasp_newton / grasp_iht");
    s->add_option("--max-iters", solve.max_iters, "Outer iteration cap");
    s->add_option("--tol", solve.tol, "Relative iterate-change tolerance");
    s->add_flag("--intercept", solve.intercept, "Fit an unpenalized intercept");
    s->add_option("--p", solve.p, "Expected number of feature columns");
    s->add_option("--newton-form", solve.newton_form, "gradient | printed");
    s->add_option("--out", solve.out, "Trace CSV path");
    s->add_option("--estimate", solve.estimate, "Estimate parameter file (default <out>.estimate.csv)");
    s->add_option("--seed", solve.seed, "Accepted for uniformity; solves are deterministic");

    SweepArgs sweep;
    auto* w = app.add_subcommand("sweep", "Synthetic logistic-regression experiment sweep");
    w->add_option("--p", sweep.cfg.p, "Ambient dimension");
    w->add_option("--sparsity", sweep.cfg.s, "Sparsity level s");
    w->add_option("--n-grid", sweep.cfg.n_grid, "Sample sizes")->delimiter(',');
    w->add_option("--rho-grid", sweep.cfg.rho_grid, "AR(1) correlations")->delimiter(',');
    w->add_option("--trials", sweep.cfg.trials, "Trials per (rho, n) cell");
    w->add_option("--method", sweep.methods, "Methods (comma separated)")->delimiter(',');
    w->add_option("--seed", sweep.cfg.seed, "Master seed");
    w->add_option("--eta", sweep.eta, "Fixed ridge weight (default 0.2 sqrt(log p / n))");
    w->add_option("--kappa", sweep.cfg.iht_kappa, "Step size for grasp_iht");
    w->add_option("--max-iters", sweep.cfg.max_outer_iters, "Outer iteration cap");
    w->add_option("--tol", sweep.cfg.iterate_tol, "Relative iterate-change tolerance");
    w->add_option("--intercept", sweep.cfg.intercept, "Generate and fit an intercept (true/false)");
    w->add_option("--threads", sweep.cfg.threads, "Worker threads");
    w->add_flag("--timing", sweep.cfg.timing, "Add a wall_time_s column");
    w->add_option("--out", sweep.out, "Per-trial CSV path");
    w->add_option("--summary", sweep.summary, "Summary CSV path (default <out>.summary.csv)");

    GenArgs gen;
    auto* g = app.add_subcommand("gen-data", "Generate a synthetic logistic dataset");
    g->add_option("--p", gen.cfg.p, "Ambient dimension");
    g->add_option("--sparsity", gen.cfg.s, "Nonzeros in x*");
    g->add_option("--rho", gen.cfg.rho, "AR(1) correlation");
    g->add_option("--n", gen.cfg.n, "Samples");
    g->add_option("--seed", gen.cfg.seed, "Seed");
    g->add_flag("--intercept", gen.cfg.intercept, "Draw an intercept c");
    g->add_option("--out", gen.out, "Dataset CSV path");
    g->add_option("--param-out", gen.param, "Parameter file (default <out>.param.csv)");

    CertifyArgs cert;
    auto* c = app.add_subcommand("certify-srh", "Estimate restricted-Hessian conditioning on a dataset");
    c->add_option("--data", cert.data, "Dataset CSV")->required();
    c->add_option("--objective", cert.objective, "squared_error | logistic | logistic_l2");
    c->add_option("--eta", cert.eta, "Ridge weight for logistic_l2");
    c->add_flag("--intercept", cert.intercept, "Append a constant column");
    c->add_option("--k", cert.k, "Sparsity order k");
    c->add_option("--budget", cert.budget, "Monte Carlo budget");
    c->add_option("--exhaustive-cap", cert.cap, "Enumerate all k-subsets when C(p,k) is at most this");
    c->add_option("--seed", cert.seed, "Seed");
    c->add_option("--tau", cert.tau, "Chernoff deviation tau");
    c->add_option("--eps", cert.eps, "Chernoff failure probability");
    c->add_option("--out", cert.out, "Output CSV (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (*s) {
            if (solve.method != "grasp" && solve.method != "grasp_debias" && solve.method != "grasp_newton" &&
                solve.method != "grasp_iht" && solve.method != "logit_omp") {
                err << "usage error: unknown method '" << solve.method << "'\n";
                return kExitUsage;
            }
            return do_solve(solve, out, err);
        }
        if (*w) {
            for (const auto& m : sweep.methods) {
                try {
                    parse_method(m);
                } catch (const std::invalid_argument& e) {
                    err << "usage error: " << e.what() << '\n';
                    return kExitUsage;
                }
            }
            if (w->count("--method") > 0 && sweep.methods.empty()) {
                err << "usage error: empty method list\n";
                return kExitUsage;
            }
            return do_sweep(sweep, out);
        }
        if (*g) return do_gen(gen, out);
        if (*c) return do_certify(cert, out);
    } catch (const SolverDiverged& e) {
        err << "solver diverged: " << e.what() << '\n';
        return kExitDiverged;
    } catch (const CLI::Error& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "invalid input: " << e.what() << '\n';
        return kExitInvalidInput;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitDiverged;
    }
    return kExitUsage;
}

}  // namespace grasp
