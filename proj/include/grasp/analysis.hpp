#pragma once

#include "grasp/objectives.hpp"

#include <cstdint>
#include <string>

namespace grasp {

/// Extreme eigenvalues of the restricted Hessian P_K^T H_f(x) P_K.
struct RestrictedExtremes {
    double lower = 0.0;  // B
    double upper = 0.0;  // A
};

/**
 * Smallest and largest eigenvalue of restricted_hessian(f, x, K).
 *
 * The matrix is symmetrized by averaging before the eigen-decomposition; an
 * asymmetry above 1e-8 (relative to the largest entry, floor 1) means the
 * objective produced a bad Hessian and raises std::logic_error.
 */
RestrictedExtremes srh_extremes(const Objective& f, const Vector& x, const SupportSet& K);

enum class EstimateMode { automatic, exhaustive, sampled };

struct SrhOptions {
    /// Sampled mode: number of (x, K) draws. Exhaustive mode: extra random
    /// points spread over all k-subsets (each subset is also checked at x = 0).
    std::uint64_t budget = 1000;
    std::uint64_t seed = 0;
    /// Largest C(dim, k) for which automatic mode enumerates every subset.
    std::uint64_t exhaustive_cap = 20000;
    EstimateMode mode = EstimateMode::automatic;
};

/**
 * Observed restricted-Hessian conditioning over k-sparse points.
 *
 * Each evaluated pair (x, K) with supp(x) inside the k-subset K contributes
 * its condition number A/B. Any B <= 0 marks the estimate invalid. These are
 * lower bounds on the true constant: a large ratio certifies a violation, a
 * small one proves nothing.
 */
struct SrhEstimate {
    Index k = 0;
    double B_min = 0.0;
    double A_max = 0.0;
    double mu_k = 0.0;  // +inf when !valid
    bool exhaustive = false;
    std::uint64_t evaluations = 0;
    bool valid = true;

    std::string mode() const;
};

/// Throws std::invalid_argument for budget == 0 or k outside [1, dim].
SrhEstimate estimate_srh(const Objective& f, Index k, const SrhOptions& opts = {});

struct SrlOptions {
    std::uint64_t budget = 1000;  // sampled points x
    std::uint64_t seed = 0;
    int directions = 32;          // perturbations per point
    double delta_scale = 1.0;     // std. dev. of perturbation entries
};

/// Bregman-ratio analogue of SrhEstimate; always sampled.
struct SrlEstimate {
    Index k = 0;
    double alpha_max = 0.0;
    double beta_min = 0.0;
    double mu_k = 0.0;  // largest per-point alpha(x)/beta(x); +inf when !valid
    std::uint64_t evaluations = 0;
    bool valid = true;

    std::string mode() const { return "sampled"; }
};

/// B_f(x + delta || x) / ||delta||^2. Throws for delta = 0.
double bregman_ratio(const Objective& f, const Vector& x, const Vector& delta);

SrlEstimate estimate_srl(const Objective& f, Index k, const SrlOptions& opts = {});

/// h(tau) = (1 + tau) log(1 + tau) - tau, tau > -1.
double h_tau(double tau);

/// Constants of the matrix-Chernoff sample bound for the ridge-logistic loss.
struct ChernoffParams {
    double R = 1.0;            // sup ||a|_J||^2 over k-subsets J
    double theta_bar = 1.0;    // max_J lambda_max(C_JJ), C = E[a a^T]
    double theta_tilde = 1.0;  // min_J lambda_max(C_JJ)
    double tau = 1.0;
    double eps = 0.1;          // failure probability

    void validate() const;
};

/// ceil(R (log k + k (1 + log(p/k)) - log eps) / (theta_tilde h(tau))).
std::uint64_t chernoff_sample_bound(const ChernoffParams& params, Index k, Index p);

/// Unrounded form of chernoff_sample_bound.
double chernoff_sample_bound_real(const ChernoffParams& params, Index k, Index p);

/// 1 + (1 + tau) theta_bar / (4 eta).
double srh_mu_bound(double eta, double theta_bar, double tau);

/// 1/2 sqrt((1 + tau) theta_bar) + eta ||x*||.
double approx_error_bound(double eta, double theta_bar, double tau, double x_star_norm);

/// ||grad f(x*) restricted to its 3s largest entries||_2 (full norm when 3s >= dim).
double empirical_gradient_at_truth(const Objective& f, const Vector& x_star, Index s);

/// Data-driven stand-ins for the Chernoff constants, from the sample second
/// moment C = A^T A / n over k-subsets (enumerated when C(p,k) <= cap,
/// otherwise `budget` random subsets). R is exact for the sample.
struct ThetaEstimate {
    double R = 0.0;
    double theta_bar = 0.0;
    double theta_tilde = 0.0;
    bool exhaustive = false;
};

ThetaEstimate estimate_theta(const Matrix& features, Index k, std::uint64_t budget, std::uint64_t seed,
                             std::uint64_t exhaustive_cap = 20000);

/// C(n, k), saturating at UINT64_MAX.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

}  // namespace grasp
