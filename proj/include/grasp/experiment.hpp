#pragma once

#include "grasp/data.hpp"
#include "grasp/solver.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace grasp {

// Process exit codes of the command-line driver.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDiverged = 1;
inline constexpr int kExitInvalidInput = 2;
inline constexpr int kExitUsage = 64;

enum class Method { grasp, grasp_l2, grasp_debias, grasp_l2_debias, grasp_iht, logit_omp };

std::string to_string(Method m);
/// Throws std::invalid_argument for an unknown name.
Method parse_method(const std::string& name);

/// Ridge weight per (p, n): fixed, or 0.2 sqrt(log p / n) when unset.
struct EtaRule {
    std::optional<double> fixed;

    double eta(Index p, Index n) const;
};

struct SweepConfig {
    Index p = 200;
    Index s = 5;
    std::vector<Index> n_grid;
    std::vector<double> rho_grid;
    int trials = 20;
    std::vector<Method> methods;
    std::uint64_t seed = 42;
    EtaRule eta;
    std::optional<double> iht_kappa;  // default 1/L per iteration
    bool intercept = true;
    int max_outer_iters = 100;
    double iterate_tol = 1e-7;
    int threads = 1;
    bool timing = false;  // adds a wall_time_s column (breaks byte-identical reruns)

    void validate() const;

    /// p = 200, s = 5, n = 20..200 step 20, rho in {0, 1/3, 1/2, sqrt(2)/2},
    /// 20 trials, every method.
    static SweepConfig desk_defaults();
};

struct TrialRecord {
    double rho = 0.0;
    Index n = 0;
    int trial = 0;
    Method method = Method::grasp;
    double loss_at_estimate = 0.0;  // plain logistic loss, whatever was optimized
    double loss_at_truth = 0.0;
    double relative_error = 0.0;    // ||x - x*|| / ||x*|| over the non-intercept coordinates
    double precision = 0.0;
    double recall = 0.0;
    int outer_iterations = 0;
    double wall_time_s = 0.0;
    std::string error;  // empty on success
};

struct Metrics {
    double loss_at_estimate = 0.0;
    double loss_at_truth = 0.0;
    double relative_error = 0.0;  // NaN when x* = 0
    double precision = 0.0;
    double recall = 0.0;
};

/**
 * Scores an estimate against the generating parameter.
 *
 * `loss` is evaluated at the estimate and at (x*, c). Support metrics use
 * exact zeros and ignore the intercept coordinate. An empty estimated support
 * has precision 0; an empty true support has recall 1.
 */
Metrics compute_metrics(const Vector& estimate, const SparseParameter& truth, const Objective& loss);

/// Truth as a vector in the objective's coordinates (intercept appended when present).
Vector truth_vector(const SparseParameter& truth, bool intercept);

/// One dataset per (rho, n, trial); every method runs on it. Rows come back in
/// (rho, n, trial, method) order regardless of thread count.
std::vector<TrialRecord> run_sweep(const SweepConfig& cfg);

/// Generator config of one sweep cell/trial.
GenConfig trial_config(const SweepConfig& cfg, std::size_t rho_idx, std::size_t n_idx, int trial);

/// Runs one method on one generated problem.
TrialRecord run_trial(const SweepConfig& cfg, const SyntheticProblem& problem, double rho, Method method, int trial);

void write_trial_csv(std::ostream& out, const std::vector<TrialRecord>& rows, bool timing);
/// Per (rho, n, method): count, failures, mean and sample std of each metric.
void write_summary_csv(std::ostream& out, const std::vector<TrialRecord>& rows);

/// CSV cell for a metric: 17 significant digits, or NA when not finite.
std::string metric_cell(double v);

/// Per-iteration trace of a solve.
void write_trace_csv(std::ostream& out, const SolverReport& report);

/// Command-line entry point; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace grasp
