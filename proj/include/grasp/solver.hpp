#pragma once

#include "grasp/objectives.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace grasp {

/// How the intermediate estimate b is produced on the merged support T.
enum class Variant {
    full_minimize,  // b = argmin f subject to supp(b) in T
    newton_step,    // one restricted Newton step from the current estimate
    gradient_step,  // one restricted gradient step from the current estimate
};

/**
 * Right-hand side of the restricted Newton step.
 *
 * `gradient` solves H_T d = grad_T. `printed` solves H_T d = x_T, which does
 * not fix stationary points; it is kept only for comparison runs.
 */
enum class NewtonForm { gradient, printed };

struct InnerOptions {
    double grad_tol = 1e-8;
    int max_iters = 100;
    double armijo = 1e-4;
    double backtrack = 0.5;
};

struct SolverOptions {
    Index sparsity = 1;
    int max_outer_iters = 100;
    double iterate_tol = 1e-7;  // on ||x_new - x_old|| / max(||x_new||, ||x_old||)
    InnerOptions inner;
    Variant variant = Variant::full_minimize;
    /// Step size. Defaults: 1 for newton_step, 1/L for gradient_step where L
    /// is a power-iteration estimate of the restricted Hessian's top eigenvalue.
    std::optional<double> kappa;
    NewtonForm newton_form = NewtonForm::gradient;
    bool debias = false;

    /// Throws std::invalid_argument when inconsistent with an objective of
    /// dimension `dim` (`free_dim` excludes the intercept).
    void validate(Index free_dim) const;
};

enum class Termination { converged, max_iterations, loss_stall, selection_complete };

std::string to_string(Termination t);
std::string to_string(Variant v);

struct IterationRecord {
    int iteration = 0;
    double loss = 0.0;
    /// ||grad f(x)|_supp(x)||_2 at the pruned iterate.
    double restricted_grad_norm = 0.0;
    double iterate_change = 0.0;
    SupportSet support;     // pruned support, intercept excluded
    SupportSet directions;  // Z
    SupportSet merged;      // T
    bool newton_fallback = false;
};

struct SolverReport {
    /// Minimum-loss iterate seen (not necessarily the last).
    Vector final_estimate;
    double final_loss = 0.0;
    int best_iteration = 0;
    Termination termination = Termination::max_iterations;
    /// Set when 3s exceeds the number of free coordinates.
    bool merged_support_saturated = false;
    std::vector<IterationRecord> iterations;

    int outer_iterations() const { return static_cast<int>(iterations.size()); }
};

/// Raised when a loss evaluation turns non-finite.
class SolverDiverged : public std::runtime_error {
public:
    SolverDiverged(const std::string& what, Vector last_valid, SolverReport partial = {})
        : std::runtime_error(what), last_valid_(std::move(last_valid)), partial_(std::move(partial)) {}

    const Vector& last_valid() const { return last_valid_; }
    const SolverReport& partial_report() const { return partial_; }

private:
    Vector last_valid_;
    SolverReport partial_;
};

struct InnerResult {
    Vector x;
    int iterations = 0;
    double grad_norm = 0.0;
    bool converged = false;
    /// Iterations where the Newton system could not be solved.
    int gradient_fallbacks = 0;
    /// Loss before the first step and after each accepted step.
    std::vector<double> losses;
};

/**
 * Minimizes f over vectors supported on T by damped Newton with Armijo
 * backtracking, starting at x0 (which must be supported on T).
 *
 * Stops when ||grad f|_T|| <= grad_tol, after max_iters steps, or when the
 * line search cannot find a decrease. The loss never increases.
 */
InnerResult restricted_minimize(const Objective& f, const SupportSet& T, const Vector& x0,
                                const InnerOptions& opts = {});

struct StepResult {
    Vector b;
    bool newton_fallback = false;
};

/// Intermediate estimate b on T for the configured variant.
StepResult variant_step(const Objective& f, const Vector& x, const SupportSet& T, const SolverOptions& opts);

/// Everything one outer iteration produces.
struct GraspStep {
    Vector estimate;      // pruned (and optionally debiased) iterate
    Vector intermediate;  // b before pruning
    SupportSet directions;
    SupportSet merged;
    bool newton_fallback = false;
};

/**
 * One outer iteration: gradient, pick the 2s strongest directions, merge with
 * the current support, form b on the merged set, prune to the best s terms.
 */
GraspStep grasp_step(const Objective& f, const Vector& x, const SolverOptions& opts);

inline Vector grasp_iterate(const Objective& f, const Vector& x, const SolverOptions& opts) {
    return grasp_step(f, x, opts).estimate;
}

/// Runs outer iterations from x = 0 until the iterate settles, the loss
/// rises twice in a row, or the iteration cap is hit.
SolverReport grasp_solve(const Objective& f, const SolverOptions& opts);

/// Forward selection baseline: add the coordinate with largest |gradient|,
/// refit on the grown support, repeat s times.
SolverReport logit_omp(const Objective& f, Index s, const InnerOptions& inner = {});

/// Largest eigenvalue of a symmetric PSD matrix by power iteration.
double power_iteration_max_eigenvalue(const Matrix& H, int max_iters = 200, double rel_tol = 1e-10);

}  // namespace grasp
