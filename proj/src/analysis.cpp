#include "grasp/analysis.hpp"

#include "grasp/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace grasp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::VectorXd symmetric_eigenvalues(const Matrix& H) {
    const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
    if ((H - H.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
        throw std::logic_error("restricted Hessian is not symmetric");
    }
    const Matrix sym = 0.5 * (H + H.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) throw std::logic_error("symmetric eigensolver failed");
    return eig.eigenvalues();  // ascending
}

// Advances `comb` to the next k-subset of [0, n) in lexicographic order.
bool next_combination(std::vector<Index>& comb, Index n) {
    const auto k = static_cast<Index>(comb.size());
    Index i = k - 1;
    while (i >= 0 && comb[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return false;
    ++comb[static_cast<std::size_t>(i)];
    for (Index j = i + 1; j < k; ++j) comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
    return true;
}

std::vector<Index> first_combination(Index k) {
    std::vector<Index> c(static_cast<std::size_t>(k));
    std::iota(c.begin(), c.end(), Index{0});
    return c;
}

SupportSet random_subset(Rng& rng, Index dim, Index k) {
    const auto picks = rng.subset(static_cast<long>(dim), static_cast<long>(k));
    return SupportSet(dim, std::vector<Index>(picks.begin(), picks.end()));
}

// x supported on a random portion (possibly empty, possibly all) of K.
Vector random_point_on(Rng& rng, const SupportSet& K) {
    Vector x = Vector::Zero(K.dim());
    const auto m = static_cast<long>(rng.below(K.size() + 1));
    for (long pos : rng.subset(static_cast<long>(K.size()), m)) x(K[static_cast<std::size_t>(pos)]) = rng.normal();
    return x;
}

struct SrhAccumulator {
    SrhEstimate est;

    void add(const RestrictedExtremes& e) {
        ++est.evaluations;
        est.B_min = std::min(est.B_min, e.lower);
        est.A_max = std::max(est.A_max, e.upper);
        if (e.lower <= 0.0) {
            est.valid = false;
            est.mu_k = kInf;
        } else if (est.valid) {
            est.mu_k = std::max(est.mu_k, e.upper / e.lower);
        }
    }
};

}  // namespace

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
        if (r > UINT64_MAX) return UINT64_MAX;
    }
    return static_cast<std::uint64_t>(r);
}

RestrictedExtremes srh_extremes(const Objective& f, const Vector& x, const SupportSet& K) {
    if (K.empty()) throw std::invalid_argument("srh_extremes: K must be non-empty");
    const Eigen::VectorXd ev = symmetric_eigenvalues(f.restricted_hessian(x, K));
    return {ev(0), ev(ev.size() - 1)};
}

std::string SrhEstimate::mode() const {
    return exhaustive ? "exhaustive" : "sampled";
}

SrhEstimate estimate_srh(const Objective& f, Index k, const SrhOptions& opts) {
    const Index dim = f.dim();
    if (opts.budget == 0) throw std::invalid_argument("estimate_srh: budget must be positive");
    if (k < 1 || k > dim) throw std::invalid_argument("estimate_srh: k must lie in [1, dim]");

    const std::uint64_t subsets = binomial(static_cast<std::uint64_t>(dim), static_cast<std::uint64_t>(k));
    bool exhaustive = false;
    switch (opts.mode) {
        case EstimateMode::exhaustive:
            if (subsets > opts.exhaustive_cap) {
                throw std::invalid_argument("estimate_srh: C(dim, k) exceeds the exhaustive cap");
            }
            exhaustive = true;
            break;
        case EstimateMode::sampled: exhaustive = false; break;
        case EstimateMode::automatic: exhaustive = subsets <= opts.exhaustive_cap; break;
    }

    SrhAccumulator acc;
    acc.est.k = k;
    acc.est.exhaustive = exhaustive;
    acc.est.B_min = kInf;
    acc.est.A_max = -kInf;
    acc.est.mu_k = 0.0;

    if (exhaustive) {
        const std::uint64_t extra = opts.budget / subsets;
        const Vector zero = Vector::Zero(dim);
        auto comb = first_combination(k);
        std::uint64_t ordinal = 0;
        do {
            const SupportSet K(dim, comb);
            acc.add(srh_extremes(f, zero, K));
            for (std::uint64_t t = 0; t < extra; ++t) {
                Rng rng(derive_seed(opts.seed, ordinal * extra + t));
                acc.add(srh_extremes(f, random_point_on(rng, K), K));
            }
            ++ordinal;
        } while (next_combination(comb, dim));
    } else {
        for (std::uint64_t t = 0; t < opts.budget; ++t) {
            Rng rng(derive_seed(opts.seed, t));
            const SupportSet K = random_subset(rng, dim, k);
            acc.add(srh_extremes(f, random_point_on(rng, K), K));
        }
    }
    return acc.est;
}

double bregman_ratio(const Objective& f, const Vector& x, const Vector& delta) {
    const double nsq = delta.squaredNorm();
    if (nsq == 0.0) throw std::invalid_argument("bregman_ratio: delta must be nonzero");
    return bregman_divergence(f, x, x + delta) / nsq;
}

SrlEstimate estimate_srl(const Objective& f, Index k, const SrlOptions& opts) {
    const Index dim = f.dim();
    if (opts.budget == 0) throw std::invalid_argument("estimate_srl: budget must be positive");
    if (opts.directions < 1) throw std::invalid_argument("estimate_srl: need at least one direction");
    if (!(opts.delta_scale > 0.0)) throw std::invalid_argument("estimate_srl: delta_scale must be positive");
    if (k < 1 || k > dim) throw std::invalid_argument("estimate_srl: k must lie in [1, dim]");

    SrlEstimate est;
    est.k = k;
    est.alpha_max = -kInf;
    est.beta_min = kInf;
    for (std::uint64_t t = 0; t < opts.budget; ++t) {
        Rng rng(derive_seed(opts.seed, t));
        const SupportSet K = random_subset(rng, dim, k);
        const Vector x = random_point_on(rng, K);
        double alpha = -kInf;
        double beta = kInf;
        for (int d = 0; d < opts.directions; ++d) {
            Vector delta = Vector::Zero(dim);
            for (Index j : K) delta(j) = opts.delta_scale * rng.normal();
            const double r = bregman_ratio(f, x, delta);
            alpha = std::max(alpha, r);
            beta = std::min(beta, r);
            ++est.evaluations;
        }
        est.alpha_max = std::max(est.alpha_max, alpha);
        est.beta_min = std::min(est.beta_min, beta);
        if (beta <= 0.0) {
            est.valid = false;
            est.mu_k = kInf;
        } else if (est.valid) {
            est.mu_k = std::max(est.mu_k, alpha / beta);
        }
    }
    return est;
}

double h_tau(double tau) {
    if (!(tau > -1.0)) throw std::invalid_argument("h_tau: tau must exceed -1");
    return (1.0 + tau) * std::log1p(tau) - tau;
}

void ChernoffParams::validate() const {
    if (!(R > 0.0) || !std::isfinite(R)) throw std::invalid_argument("ChernoffParams: R must be positive");
    if (!(theta_tilde > 0.0) || !(theta_tilde <= theta_bar)) {
        throw std::invalid_argument("ChernoffParams: need 0 < theta_tilde <= theta_bar");
    }
    if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("ChernoffParams: tau must be positive");
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("ChernoffParams: eps must lie in (0, 1)");
}

double chernoff_sample_bound_real(const ChernoffParams& params, Index k, Index p) {
    params.validate();
    if (k < 1 || p < k) throw std::invalid_argument("chernoff_sample_bound: need 1 <= k <= p");
    const double kd = static_cast<double>(k);
    const double pd = static_cast<double>(p);
    const double numer = std::log(kd) + kd * (1.0 + std::log(pd / kd)) - std::log(params.eps);
    return params.R * numer / (params.theta_tilde * h_tau(params.tau));
}

std::uint64_t chernoff_sample_bound(const ChernoffParams& params, Index k, Index p) {
    return static_cast<std::uint64_t>(std::ceil(chernoff_sample_bound_real(params, k, p)));
}

double srh_mu_bound(double eta, double theta_bar, double tau) {
    if (!(eta > 0.0)) throw std::invalid_argument("srh_mu_bound: eta must be positive");
    if (!(theta_bar >= 0.0) || !(tau >= 0.0)) throw std::invalid_argument("srh_mu_bound: theta_bar and tau must be >= 0");
    return 1.0 + (1.0 + tau) * theta_bar / (4.0 * eta);
}

double approx_error_bound(double eta, double theta_bar, double tau, double x_star_norm) {
    if (!(eta >= 0.0) || !(theta_bar >= 0.0) || !(tau >= 0.0) || !(x_star_norm >= 0.0)) {
        throw std::invalid_argument("approx_error_bound: arguments must be nonnegative");
    }
    return 0.5 * std::sqrt((1.0 + tau) * theta_bar) + eta * x_star_norm;
}

double empirical_gradient_at_truth(const Objective& f, const Vector& x_star, Index s) {
    if (s < 0) throw std::invalid_argument("empirical_gradient_at_truth: s must be >= 0");
    const Vector g = f.gradient(x_star);
    const Index k = std::min<Index>(3 * s, g.size());
    return restrict_to(g, top_k_support(g, k)).norm();
}

ThetaEstimate estimate_theta(const Matrix& features, Index k, std::uint64_t budget, std::uint64_t seed,
                             std::uint64_t exhaustive_cap) {
    const Index n = features.rows();
    const Index p = features.cols();
    if (n < 1 || k < 1 || k > p) throw std::invalid_argument("estimate_theta: need n >= 1 and 1 <= k <= p");

    ThetaEstimate out;
    for (Index i = 0; i < n; ++i) {
        Vector sq = features.row(i).transpose().cwiseAbs2();
        std::partial_sort(sq.data(), sq.data() + k, sq.data() + p, std::greater<>());
        out.R = std::max(out.R, sq.head(k).sum());
    }

    const Matrix C = features.transpose() * features / static_cast<double>(n);
    out.theta_bar = -kInf;
    out.theta_tilde = kInf;
    auto visit = [&](const std::vector<Index>& J) {
        const auto m = static_cast<Index>(J.size());
        Matrix CJ(m, m);
        for (Index r = 0; r < m; ++r)
            for (Index c = 0; c < m; ++c) CJ(r, c) = C(J[static_cast<std::size_t>(r)], J[static_cast<std::size_t>(c)]);
        const double top = symmetric_eigenvalues(CJ)(m - 1);
        out.theta_bar = std::max(out.theta_bar, top);
        out.theta_tilde = std::min(out.theta_tilde, top);
    };

    const std::uint64_t subsets = binomial(static_cast<std::uint64_t>(p), static_cast<std::uint64_t>(k));
    if (subsets <= exhaustive_cap) {
        out.exhaustive = true;
        auto comb = first_combination(k);
        do visit(comb);
        while (next_combination(comb, p));
    } else {
        if (budget == 0) throw std::invalid_argument("estimate_theta: budget must be positive");
        for (std::uint64_t t = 0; t < budget; ++t) {
            Rng rng(derive_seed(seed, t));
            const auto picks = rng.subset(static_cast<long>(p), static_cast<long>(k));
            visit(std::vector<Index>(picks.begin(), picks.end()));
        }
    }
    return out;
}

}  // namespace grasp
