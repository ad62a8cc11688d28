#include "grasp/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <thread>
#include <tuple>

namespace grasp {

std::string to_string(Method m) {
    switch (m) {
        case Method::grasp: return "grasp";
        case Method::grasp_l2: return "grasp_l2";
        case Method::grasp_debias: return "grasp_debias";
        case Method::grasp_l2_debias: return "grasp_l2_debias";
        case Method::grasp_iht: return "grasp_iht";
        case Method::logit_omp: return "logit_omp";
    }
    return "unknown";
}

Method parse_method(const std::string& name) {
    for (Method m : {Method::grasp, Method::grasp_l2, Method::grasp_debias, Method::grasp_l2_debias, Method::grasp_iht,
                     Method::logit_omp}) {
        if (to_string(m) == name) return m;
    }
    throw std::invalid_argument("unknown method '" + name + "'");
}

double EtaRule::eta(Index p, Index n) const {
    if (fixed) return *fixed;
    return 0.2 * std::sqrt(std::log(static_cast<double>(p)) / static_cast<double>(n));
}

void SweepConfig::validate() const {
    if (p < 1) throw std::invalid_argument("sweep: p must be >= 1");
    if (s < 1 || s > p) throw std::invalid_argument("sweep: sparsity must lie in [1, p]");
    if (n_grid.empty()) throw std::invalid_argument("sweep: n-grid is empty");
    if (rho_grid.empty()) throw std::invalid_argument("sweep: rho-grid is empty");
    if (methods.empty()) throw std::invalid_argument("sweep: no methods given");
    if (trials < 1) throw std::invalid_argument("sweep: trials must be >= 1");
    for (Index n : n_grid)
        if (n < 1) throw std::invalid_argument("sweep: n-grid entries must be >= 1");
    for (double r : rho_grid)
        if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("sweep: rho must lie in [0, 1]");
    if (eta.fixed && !(*eta.fixed > 0.0)) throw std::invalid_argument("sweep: eta must be positive");
    if (threads < 1) throw std::invalid_argument("sweep: threads must be >= 1");
}

SweepConfig SweepConfig::desk_defaults() {
    SweepConfig cfg;
    for (Index n = 20; n <= 200; n += 20) cfg.n_grid.push_back(n);
    cfg.rho_grid = {0.0, 1.0 / 3.0, 0.5, std::numbers::sqrt2 / 2.0};
    cfg.methods = {Method::grasp,           Method::grasp_l2,  Method::grasp_debias,
                   Method::grasp_l2_debias, Method::grasp_iht, Method::logit_omp};
    return cfg;
}

Vector truth_vector(const SparseParameter& truth, bool intercept) {
    if (!intercept) return truth.x_star;
    Vector x(truth.x_star.size() + 1);
    x.head(truth.x_star.size()) = truth.x_star;
    x(truth.x_star.size()) = truth.intercept;
    return x;
}

Metrics compute_metrics(const Vector& estimate, const SparseParameter& truth, const Objective& loss) {
    const Index p = truth.x_star.size();
    const bool intercept = loss.intercept_index().has_value();
    if (estimate.size() != loss.dim() || p + (intercept ? 1 : 0) != loss.dim()) {
        throw std::invalid_argument("compute_metrics: dimension mismatch");
    }
    Metrics m;
    m.loss_at_estimate = loss.value(estimate);
    m.loss_at_truth = loss.value(truth_vector(truth, intercept));

    const Vector est = estimate.head(p);
    const double truth_norm = truth.x_star.norm();
    m.relative_error = truth_norm > 0.0 ? (est - truth.x_star).norm() / truth_norm
                                        : std::numeric_limits<double>::quiet_NaN();

    const SupportSet found = support(est);
    const SupportSet actual = support(truth.x_star);
    std::size_t hits = 0;
    for (Index j : found) hits += actual.contains(j) ? 1 : 0;
    m.precision = found.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(found.size());
    m.recall = actual.empty() ? 1.0 : static_cast<double>(hits) / static_cast<double>(actual.size());
    return m;
}

GenConfig trial_config(const SweepConfig& cfg, std::size_t rho_idx, std::size_t n_idx, int trial) {
    const std::uint64_t stream =
        (static_cast<std::uint64_t>(rho_idx) * cfg.n_grid.size() + n_idx) * static_cast<std::uint64_t>(cfg.trials) +
        static_cast<std::uint64_t>(trial);
    GenConfig g;
    g.p = cfg.p;
    g.s = cfg.s;
    g.rho = cfg.rho_grid[rho_idx];
    g.n = cfg.n_grid[n_idx];
    g.seed = derive_seed(cfg.seed, stream);
    g.intercept = cfg.intercept;
    return g;
}

namespace {

std::string sanitize(std::string msg) {
    for (char& ch : msg) {
        if (ch == ',' || ch == '\n' || ch == '\r' || ch == '"') ch = ';';
    }
    return msg;
}

SolverReport solve_with(const SweepConfig& cfg, const Objective& f, Method method) {
    if (method == Method::logit_omp) return logit_omp(f, cfg.s);
    SolverOptions opts;
    opts.sparsity = cfg.s;
    opts.max_outer_iters = cfg.max_outer_iters;
    opts.iterate_tol = cfg.iterate_tol;
    opts.debias = method == Method::grasp_debias || method == Method::grasp_l2_debias;
    if (method == Method::grasp_iht) {
        opts.variant = Variant::gradient_step;
        opts.kappa = cfg.iht_kappa;
    }
    return grasp_solve(f, opts);
}

}  // namespace

TrialRecord run_trial(const SweepConfig& cfg, const SyntheticProblem& problem, double rho, Method method, int trial) {
    TrialRecord rec;
    rec.rho = rho;
    rec.n = problem.data.n();
    rec.trial = trial;
    rec.method = method;

    const LogisticLoss plain(problem.data, 0.0);
    const auto start = std::chrono::steady_clock::now();
    try {
        const bool ridge = method == Method::grasp_l2 || method == Method::grasp_l2_debias;
        const double eta = ridge ? cfg.eta.eta(problem.data.p(), problem.data.n()) : 0.0;
        const LogisticLoss objective(problem.data, eta);
        const SolverReport report = solve_with(cfg, objective, method);
        const Metrics m = compute_metrics(report.final_estimate, problem.truth, plain);
        rec.loss_at_estimate = m.loss_at_estimate;
        rec.loss_at_truth = m.loss_at_truth;
        rec.relative_error = m.relative_error;
        rec.precision = m.precision;
        rec.recall = m.recall;
        rec.outer_iterations = report.outer_iterations();
    } catch (const std::exception& e) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        rec.loss_at_estimate = rec.relative_error = rec.precision = rec.recall = nan;
        rec.loss_at_truth = plain.value(truth_vector(problem.truth, problem.data.intercept));
        rec.error = sanitize(e.what());
        if (rec.error.empty()) rec.error = "error";
    }
    rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

std::vector<TrialRecord> run_sweep(const SweepConfig& cfg) {
    cfg.validate();
    const std::size_t n_rho = cfg.rho_grid.size();
    const std::size_t n_n = cfg.n_grid.size();
    const auto trials = static_cast<std::size_t>(cfg.trials);
    const std::size_t jobs = n_rho * n_n * trials;
    const std::size_t per_job = cfg.methods.size();
    std::vector<TrialRecord> rows(jobs * per_job);

    auto run_job = [&](std::size_t job) {
        const std::size_t trial = job % trials;
        const std::size_t n_idx = (job / trials) % n_n;
        const std::size_t rho_idx = job / (trials * n_n);
        const GenConfig g = trial_config(cfg, rho_idx, n_idx, static_cast<int>(trial));
        const SyntheticProblem problem = generate_problem(g);
        for (std::size_t m = 0; m < per_job; ++m) {
            rows[job * per_job + m] = run_trial(cfg, problem, g.rho, cfg.methods[m], static_cast<int>(trial));
        }
    };

    const auto workers = std::min<std::size_t>(static_cast<std::size_t>(cfg.threads), jobs);
    if (workers <= 1) {
        for (std::size_t job = 0; job < jobs; ++job) run_job(job);
        return rows;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t job = next++; job < jobs; job = next++) run_job(job);
        });
    }
    pool.clear();  // joins
    return rows;
}

std::string metric_cell(double v) {
    return std::isfinite(v) ? format_double(v) : std::string("NA");
}

void write_trial_csv(std::ostream& out, const std::vector<TrialRecord>& rows, bool timing) {
    out << "rho,n,trial,method,loss_at_estimate,loss_at_truth,relative_error,precision,recall,outer_iterations,error";
    if (timing) out << ",wall_time_s";
    out << '\n';
    for (const auto& r : rows) {
        out << format_double(r.rho) << ',' << r.n << ',' << r.trial << ',' << to_string(r.method) << ','
            << metric_cell(r.loss_at_estimate) << ',' << metric_cell(r.loss_at_truth) << ','
            << metric_cell(r.relative_error) << ',' << metric_cell(r.precision) << ',' << metric_cell(r.recall) << ','
            << r.outer_iterations << ',' << r.error;
        if (timing) out << ',' << format_double(r.wall_time_s);
        out << '\n';
    }
}

namespace {

struct Moments {
    std::vector<double> values;

    void add(double v) {
        if (std::isfinite(v)) values.push_back(v);
    }
    double mean() const {
        if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
        double s = 0.0;
        for (double v : values) s += v;
        return s / static_cast<double>(values.size());
    }
    double stddev() const {
        if (values.size() < 2) return std::numeric_limits<double>::quiet_NaN();
        const double mu = mean();
        double ss = 0.0;
        for (double v : values) ss += (v - mu) * (v - mu);
        return std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
};

struct Cell {
    std::size_t count = 0;
    std::size_t failures = 0;
    Moments loss_est, loss_truth, rel_err, precision, recall, iters;
};

}  // namespace

void write_summary_csv(std::ostream& out, const std::vector<TrialRecord>& rows) {
    // Key keeps first-appearance order so the summary follows the trial file.
    std::vector<std::tuple<double, Index, Method>> order;
    std::map<std::tuple<double, Index, int>, Cell> cells;
    for (const auto& r : rows) {
        const auto key = std::make_tuple(r.rho, r.n, static_cast<int>(r.method));
        auto [it, inserted] = cells.try_emplace(key);
        if (inserted) order.emplace_back(r.rho, r.n, r.method);
        Cell& c = it->second;
        ++c.count;
        if (!r.error.empty()) {
            ++c.failures;
            continue;
        }
        c.loss_est.add(r.loss_at_estimate);
        c.loss_truth.add(r.loss_at_truth);
        c.rel_err.add(r.relative_error);
        c.precision.add(r.precision);
        c.recall.add(r.recall);
        c.iters.add(static_cast<double>(r.outer_iterations));
    }

    out << "rho,n,method,count,failures,mean_loss_at_estimate,std_loss_at_estimate,mean_loss_at_truth,"
           "std_loss_at_truth,mean_relative_error,std_relative_error,mean_precision,mean_recall,"
           "mean_outer_iterations\n";
    for (const auto& [rho, n, method] : order) {
        const Cell& c = cells.at(std::make_tuple(rho, n, static_cast<int>(method)));
        out << format_double(rho) << ',' << n << ',' << to_string(method) << ',' << c.count << ',' << c.failures << ','
            << metric_cell(c.loss_est.mean()) << ',' << metric_cell(c.loss_est.stddev()) << ','
            << metric_cell(c.loss_truth.mean()) << ',' << metric_cell(c.loss_truth.stddev()) << ','
            << metric_cell(c.rel_err.mean()) << ',' << metric_cell(c.rel_err.stddev()) << ','
            << metric_cell(c.precision.mean()) << ',' << metric_cell(c.recall.mean()) << ','
            << metric_cell(c.iters.mean()) << '\n';
    }
}

void write_trace_csv(std::ostream& out, const SolverReport& report) {
    out << "iteration,loss,restricted_grad_norm,iterate_change,support_size,support,newton_fallback\n";
    for (const auto& it : report.iterations) {
        out << it.iteration << ',' << format_double(it.loss) << ',' << format_double(it.restricted_grad_norm) << ','
            << format_double(it.iterate_change) << ',' << it.support.size() << ',' << it.support.to_string(' ') << ','
            << (it.newton_fallback ? 1 : 0) << '\n';
    }
}

}  // namespace grasp
