#include "grasp/solver.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>

namespace grasp {

void SolverOptions::validate(Index free_dim) const {
    if (sparsity < 1) throw std::invalid_argument("sparsity must be >= 1");
    if (sparsity > free_dim) {
        throw std::invalid_argument("sparsity " + std::to_string(sparsity) + " exceeds the " +
                                    std::to_string(free_dim) + " available coordinates");
    }
    if (max_outer_iters < 1) throw std::invalid_argument("max_outer_iters must be >= 1");
    if (!(iterate_tol > 0.0)) throw std::invalid_argument("iterate_tol must be > 0");
    if (!(inner.grad_tol > 0.0)) throw std::invalid_argument("inner grad_tol must be > 0");
    if (inner.max_iters < 1) throw std::invalid_argument("inner max_iters must be >= 1");
    if (!(inner.armijo > 0.0 && inner.armijo < 1.0)) throw std::invalid_argument("armijo parameter must be in (0,1)");
    if (!(inner.backtrack > 0.0 && inner.backtrack < 1.0)) throw std::invalid_argument("backtrack factor must be in (0,1)");
    if (kappa && !(*kappa >= 0.0 && std::isfinite(*kappa))) throw std::invalid_argument("kappa must be finite and >= 0");
}

std::string to_string(Termination t) {
    switch (t) {
        case Termination::converged: return "converged";
        case Termination::max_iterations: return "max_iterations";
        case Termination::loss_stall: return "loss_stall";
        case Termination::selection_complete: return "selection_complete";
    }
    return "unknown";
}

std::string to_string(Variant v) {
    switch (v) {
        case Variant::full_minimize: return "full_minimize";
        case Variant::newton_step: return "newton_step";
        case Variant::gradient_step: return "gradient_step";
    }
    return "unknown";
}

double power_iteration_max_eigenvalue(const Matrix& H, int max_iters, double rel_tol) {
    const Index m = H.rows();
    if (m == 0) return 0.0;
    Vector v(m);
    for (Index i = 0; i < m; ++i) v(i) = 1.0 + 0.1 * static_cast<double>(i) / static_cast<double>(m);
    v.normalize();
    double lambda = 0.0;
    for (int it = 0; it < max_iters; ++it) {
        Vector w = H * v;
        const double next = v.dot(w);
        const double norm = w.norm();
        if (norm == 0.0) return 0.0;
        v = w / norm;
        if (std::abs(next - lambda) <= rel_tol * std::abs(next)) return next;
        lambda = next;
    }
    return lambda;
}

namespace {

Index free_dimension(const Objective& f) {
    return f.dim() - (f.intercept_index() ? 1 : 0);
}

Vector without_intercept(const Vector& v, std::optional<Index> icpt) {
    if (!icpt) return v;
    Vector out = v;
    out(*icpt) = 0.0;
    return out;
}

// Best s-term pruning of the free coordinates; the intercept is carried over.
Vector prune(const Vector& b, Index s, std::optional<Index> icpt) {
    Vector out = best_k_term(without_intercept(b, icpt), s);
    if (icpt) out(*icpt) = b(*icpt);
    return out;
}

SupportSet with_intercept(SupportSet S, std::optional<Index> icpt) {
    return icpt ? S.with(*icpt) : S;
}

double relative_change(const Vector& next, const Vector& prev) {
    const double diff = (next - prev).norm();
    if (diff == 0.0) return 0.0;
    const double scale = std::max(next.norm(), prev.norm());
    return diff / scale;
}

double default_gradient_kappa(const Objective& f, const Vector& x, const SupportSet& T) {
    const double L = power_iteration_max_eigenvalue(f.restricted_hessian(x, T));
    return L > 0.0 ? 1.0 / L : 1.0;
}

}  // namespace

InnerResult restricted_minimize(const Objective& f, const SupportSet& T, const Vector& x0, const InnerOptions& opts) {
    if (x0.size() != f.dim()) throw std::invalid_argument("restricted_minimize: x0 has wrong length");
    if (T.dim() != f.dim()) throw std::invalid_argument("restricted_minimize: support dimension mismatch");
    if (!support(x0).is_subset_of(T)) throw std::invalid_argument("restricted_minimize: x0 is not supported on T");

    InnerResult res;
    res.x = x0;
    double loss = f.value(res.x);
    if (!std::isfinite(loss)) throw SolverDiverged("restricted_minimize: non-finite loss at start", x0);
    res.losses.push_back(loss);
    if (T.empty()) {
        res.converged = true;
        return res;
    }

    for (int it = 0; it < opts.max_iters; ++it) {
        const Vector g = f.restricted_gradient(res.x, T);
        res.grad_norm = g.norm();
        if (!std::isfinite(res.grad_norm)) throw SolverDiverged("restricted_minimize: non-finite gradient", res.x);
        if (res.grad_norm <= opts.grad_tol) {
            res.converged = true;
            return res;
        }

        const Matrix H = f.restricted_hessian(res.x, T);
        Vector d;
        Eigen::LLT<Matrix> llt(H);
        if (llt.info() == Eigen::Success && llt.rcond() > 1e-14) {
            d = -llt.solve(g);
        }
        if (d.size() == 0 || !d.allFinite() || !(g.dot(d) < 0.0)) {
            ++res.gradient_fallbacks;
            const double L = power_iteration_max_eigenvalue(H);
            d = L > 0.0 ? Vector(-g / L) : Vector(-g);
        }

        const double slope = g.dot(d);
        double t = 1.0;
        bool accepted = false;
        Vector trial;
        double trial_loss = loss;
        while (t > 1e-20) {
            trial = res.x;
            for (std::size_t k = 0; k < T.size(); ++k) trial(T[k]) += t * d(static_cast<Index>(k));
            trial_loss = f.value(trial);
            if (std::isfinite(trial_loss) && trial_loss <= loss + opts.armijo * t * slope) {
                accepted = true;
                break;
            }
            t *= opts.backtrack;
        }
        if (!accepted) break;

        ++res.iterations;
        res.x = std::move(trial);
        loss = trial_loss;
        res.losses.push_back(loss);
    }
    res.grad_norm = f.restricted_gradient(res.x, T).norm();
    res.converged = res.grad_norm <= opts.grad_tol;
    return res;
}

StepResult variant_step(const Objective& f, const Vector& x, const SupportSet& T, const SolverOptions& opts) {
    StepResult out;
    const Vector xT = restrict_to(x, T);
    switch (opts.variant) {
        case Variant::full_minimize:
            out.b = restricted_minimize(f, T, xT, opts.inner).x;
            return out;

        case Variant::newton_step: {
            const double kappa = opts.kappa.value_or(1.0);
            const Matrix H = f.restricted_hessian(x, T);
            Eigen::LLT<Matrix> llt(H);
            if (llt.info() == Eigen::Success && llt.rcond() > 1e-14) {
                const Vector rhs =
                    opts.newton_form == NewtonForm::gradient ? f.restricted_gradient(x, T) : T.gather(x);
                const Vector step = llt.solve(rhs);
                if (step.allFinite()) {
                    out.b = T.scatter(T.gather(x) - kappa * step);
                    return out;
                }
            }
            // Singular restricted Hessian: take a gradient step this round.
            out.newton_fallback = true;
            const double gk = default_gradient_kappa(f, x, T);
            out.b = T.scatter(T.gather(x) - gk * f.restricted_gradient(x, T));
            return out;
        }

        case Variant::gradient_step: {
            const double kappa = opts.kappa ? *opts.kappa : default_gradient_kappa(f, x, T);
            out.b = T.scatter(T.gather(x) - kappa * f.restricted_gradient(x, T));
            return out;
        }
    }
    return out;
}

GraspStep grasp_step(const Objective& f, const Vector& x, const SolverOptions& opts) {
    if (x.size() != f.dim()) throw std::invalid_argument("grasp_step: estimate has wrong length");
    const auto icpt = f.intercept_index();
    const Index s = opts.sparsity;
    if (count_nonzeros(without_intercept(x, icpt)) > s) {
        throw std::invalid_argument("grasp_step: current estimate has more than s nonzeros");
    }

    GraspStep step;
    const Vector z = without_intercept(f.gradient(x), icpt);
    if (!z.allFinite()) throw SolverDiverged("grasp_step: non-finite gradient", x);
    const Index free_dim = free_dimension(f);
    step.directions = top_k_support(z, std::min<Index>(2 * s, free_dim));
    step.merged = with_intercept(step.directions.merged(support(x)), icpt);

    StepResult b = variant_step(f, x, step.merged, opts);
    step.intermediate = std::move(b.b);
    step.newton_fallback = b.newton_fallback;

    step.estimate = prune(step.intermediate, s, icpt);
    if (opts.debias) {
        const SupportSet keep = with_intercept(support(without_intercept(step.estimate, icpt)), icpt);
        step.estimate = restricted_minimize(f, keep, step.estimate, opts.inner).x;
    }
    return step;
}

SolverReport grasp_solve(const Objective& f, const SolverOptions& opts) {
    const auto icpt = f.intercept_index();
    const Index free_dim = free_dimension(f);
    opts.validate(free_dim);

    SolverReport report;
    report.merged_support_saturated = 3 * opts.sparsity > free_dim;
    Vector x = Vector::Zero(f.dim());
    double prev_loss = f.value(x);
    double best_loss = std::numeric_limits<double>::infinity();
    int rises = 0;

    for (int i = 1; i <= opts.max_outer_iters; ++i) {
        GraspStep step;
        try {
            step = grasp_step(f, x, opts);
        } catch (const SolverDiverged& e) {
            Vector last = report.iterations.empty() ? x : report.final_estimate;
            throw SolverDiverged(e.what(), std::move(last), report);
        }

        IterationRecord rec;
        rec.iteration = i;
        rec.loss = f.value(step.estimate);
        if (!std::isfinite(rec.loss)) {
            Vector last = report.iterations.empty() ? x : report.final_estimate;
            throw SolverDiverged("grasp_solve: non-finite loss at iteration " + std::to_string(i), std::move(last),
                                 report);
        }
        const SupportSet supp = support(step.estimate);
        rec.restricted_grad_norm = f.restricted_gradient(step.estimate, supp).norm();
        rec.iterate_change = relative_change(step.estimate, x);
        rec.support = icpt ? supp.without(*icpt) : supp;
        rec.directions = std::move(step.directions);
        rec.merged = std::move(step.merged);
        rec.newton_fallback = step.newton_fallback;
        report.iterations.push_back(rec);

        if (rec.loss < best_loss) {
            best_loss = rec.loss;
            report.final_estimate = step.estimate;
            report.final_loss = rec.loss;
            report.best_iteration = i;
        }

        rises = rec.loss > prev_loss ? rises + 1 : 0;
        prev_loss = rec.loss;
        x = std::move(step.estimate);

        if (rec.iterate_change < opts.iterate_tol) {
            report.termination = Termination::converged;
            return report;
        }
        if (rises >= 2) {
            report.termination = Termination::loss_stall;
            return report;
        }
    }
    report.termination = Termination::max_iterations;
    return report;
}

SolverReport logit_omp(const Objective& f, Index s, const InnerOptions& inner) {
    const auto icpt = f.intercept_index();
    const Index free_dim = free_dimension(f);
    if (s < 0 || s > free_dim) throw std::invalid_argument("logit_omp: sparsity out of range");

    SolverReport report;
    report.termination = Termination::selection_complete;
    Vector x = Vector::Zero(f.dim());
    report.final_estimate = x;
    report.final_loss = f.value(x);
    if (s == 0) return report;

    SupportSet active(f.dim());
    if (icpt) {
        active = active.with(*icpt);
        x = restricted_minimize(f, active, x, inner).x;
    }
    for (Index step = 1; step <= s; ++step) {
        const Vector g = f.gradient(x);
        Index pick = -1;
        double best = -1.0;
        for (Index j = 0; j < f.dim(); ++j) {
            if (j == icpt || active.contains(j)) continue;
            const double mag = std::abs(g(j));
            if (mag > best) {
                best = mag;
                pick = j;
            }
        }
        active = active.with(pick);
        Vector next = restricted_minimize(f, active, x, inner).x;

        IterationRecord rec;
        rec.iteration = static_cast<int>(step);
        rec.loss = f.value(next);
        if (!std::isfinite(rec.loss)) throw SolverDiverged("logit_omp: non-finite loss", x, report);
        rec.restricted_grad_norm = f.restricted_gradient(next, active).norm();
        rec.iterate_change = relative_change(next, x);
        rec.support = icpt ? active.without(*icpt) : active;
        rec.merged = active;
        report.iterations.push_back(rec);
        x = std::move(next);
    }
    report.final_estimate = x;
    report.final_loss = report.iterations.back().loss;
    report.best_iteration = static_cast<int>(s);
    return report;
}

}  // namespace grasp
