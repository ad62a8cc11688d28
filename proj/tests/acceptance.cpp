// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "grasp/analysis.hpp"
#include "grasp/data.hpp"
#include "grasp/experiment.hpp"
#include "grasp/solver.hpp"
#include "oracles.hpp"

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>

using namespace grasp;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

template <typename... Args>
std::string fmt(const char* format, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

struct Instance {
    Matrix A;
    Vector y;
    Vector x_star;
};

Instance gaussian_instance(std::uint64_t seed, Index n, Index p, Index s) {
    std::mt19937_64 gen(seed);
    Instance inst;
    inst.A = oracle::gaussian_matrix(gen, n, p) / std::sqrt(static_cast<double>(n));
    inst.x_star = oracle::sparse_gaussian(gen, p, s);
    inst.y = inst.A * inst.x_star;
    return inst;
}

std::vector<Index> ids(const SupportSet& S) { return S.indices(); }

// 1. Per-iteration supports against a textbook CoSaMP from the same iterate.
Outcome cosamp_reduction() {
    int agree = 0, total = 0;
    double worst_gap = 0.0;
    for (int inst_id = 0; inst_id < 20; ++inst_id) {
        const Instance inst = gaussian_instance(1000 + static_cast<std::uint64_t>(inst_id), 100, 256, 8);
        SquaredError f(inst.A, inst.y);
        SolverOptions o;
        o.sparsity = 8;
        Vector x = Vector::Zero(256);
        for (int it = 0; it < 10; ++it) {
            const auto ref = oracle::cosamp_step(inst.A, inst.y, x, 8);
            const GraspStep step = grasp_step(f, x, o);
            ++total;
            if (ids(step.directions) == ref.omega && ids(step.merged) == ref.merged &&
                support(step.estimate).indices() == ref.pruned) {
                ++agree;
            }
            worst_gap = std::max(worst_gap, (step.estimate - ref.next).norm() / std::max(1.0, ref.next.norm()));
            x = step.estimate;
        }
    }
    return {agree == total && worst_gap < 1e-8,
            fmt("%d/%d iterations agree on (Z, T, pruned); max relative iterate gap %.2e", agree, total, worst_gap)};
}

// 2. Gradient variant with unit step against the IHT update.
Outcome iht_reduction() {
    int agree = 0, total = 0;
    double worst = 0.0;
    for (int inst_id = 0; inst_id < 20; ++inst_id) {
        const Instance inst = gaussian_instance(2000 + static_cast<std::uint64_t>(inst_id), 100, 256, 8);
        SquaredError f(inst.A, inst.y);
        SolverOptions o;
        o.sparsity = 8;
        o.variant = Variant::gradient_step;
        o.kappa = 1.0;
        Vector x = Vector::Zero(256);
        for (int it = 0; it < 10; ++it) {
            const Vector expected = oracle::iht_step(inst.A, inst.y, x, 8);
            const Vector got = grasp_iterate(f, x, o);
            const double gap = (got - expected).norm() / std::max(1.0, expected.norm());
            worst = std::max(worst, gap);
            ++total;
            if (support(got) == support(expected) && gap < 1e-12) ++agree;
            x = got;
        }
    }
    return {agree == total, fmt("%d/%d iterations equal the IHT update; max relative gap %.2e", agree, total, worst)};
}

// 3. Noiseless recovery and per-iteration contraction.
Outcome noiseless_recovery() {
    const int trials = 50;
    int recovered = 0, contracting = 0;
    for (int t = 0; t < trials; ++t) {
        const Instance inst = gaussian_instance(3000 + static_cast<std::uint64_t>(t), 100, 256, 8);
        SquaredError f(inst.A, inst.y);
        SolverOptions o;
        o.sparsity = 8;
        const SolverReport r = grasp_solve(f, o);
        const double rel = (r.final_estimate - inst.x_star).norm() / inst.x_star.norm();
        if (!(support(r.final_estimate) == support(inst.x_star) && rel < 1e-6)) continue;
        ++recovered;

        const double floor = 1e-10 * inst.x_star.norm();
        Vector x = Vector::Zero(256);
        double e = inst.x_star.norm();
        bool ok = true;
        for (int it = 0; it < o.max_outer_iters && e > floor; ++it) {
            x = grasp_iterate(f, x, o);
            const double next = (x - inst.x_star).norm();
            if (next > 0.5 * e && next > floor) ok = false;
            e = next;
        }
        if (ok) ++contracting;
    }
    const bool pass = recovered >= 48 && contracting * 10 >= recovered * 9;
    return {pass, fmt("exact recovery %d/%d (need >= 48); contraction <= 0.5 per iteration in %d/%d recovered (need >= 90%%)",
                      recovered, trials, contracting, recovered)};
}

std::map<std::tuple<double, Index, Method>, std::pair<std::vector<double>, std::vector<double>>> group(
    const std::vector<TrialRecord>& rows, bool relative_error) {
    std::map<std::tuple<double, Index, Method>, std::pair<std::vector<double>, std::vector<double>>> cells;
    for (const auto& r : rows) {
        auto& c = cells[{r.rho, r.n, r.method}];
        if (!r.error.empty()) continue;
        c.first.push_back(relative_error ? r.relative_error : r.loss_at_estimate);
        c.second.push_back(r.loss_at_truth);
    }
    return cells;
}

double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double stddev(const std::vector<double>& v) {
    const double mu = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - mu) * (x - mu);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

// 4. Debiased GraSP loss tracks the loss at the truth once n/p >= 0.7.
Outcome logistic_sweep() {
    SweepConfig cfg = SweepConfig::desk_defaults();
    cfg.rho_grid = {0.0};
    cfg.n_grid = {140, 160, 180, 200};
    cfg.methods = {Method::grasp_debias};
    const auto rows = run_sweep(cfg);
    bool pass = true;
    std::ostringstream detail;
    for (const auto& [key, cell] : group(rows, false)) {
        const auto& [est, truth] = cell;
        const double gap = std::abs(mean(est) - mean(truth));
        const double sd = stddev(truth);
        const bool ok = est.size() == static_cast<std::size_t>(cfg.trials) && gap <= sd;
        pass = pass && ok;
        detail << fmt("n=%ld: |%.4f-%.4f|=%.4f vs sd %.4f%s; ", static_cast<long>(std::get<1>(key)), mean(est),
                      mean(truth), gap, sd, ok ? "" : " (FAIL)");
    }
    return {pass, detail.str()};
}

// 5. Ridge stabilizes GraSP at n/p = 0.25.
Outcome l2_stabilization() {
    SweepConfig cfg = SweepConfig::desk_defaults();
    cfg.rho_grid = {0.0, 1.0 / 3.0};
    cfg.n_grid = {50};
    cfg.methods = {Method::grasp, Method::grasp_l2};
    const auto rows = run_sweep(cfg);
    const auto cells = group(rows, true);
    bool pass = true;
    std::ostringstream detail;
    for (double rho : cfg.rho_grid) {
        const auto& plain = cells.at({rho, 50, Method::grasp}).first;
        const auto& ridge = cells.at({rho, 50, Method::grasp_l2}).first;
        const bool ok = plain.size() == 20 && ridge.size() == 20 && mean(ridge) < mean(plain);
        pass = pass && ok;
        detail << fmt("rho=%.3f: l2 %.4f vs plain %.4f%s; ", rho, mean(ridge), mean(plain), ok ? "" : " (FAIL)");
    }
    return {pass, detail.str()};
}

// 6. Example with Q = 2*11^T - I.
Outcome srh_example() {
    const Index p = 6;
    QuadraticForm f(2.0 * Matrix::Ones(p, p) - Matrix::Identity(p, p));
    const SrhEstimate one = estimate_srh(f, 1);
    const SrhEstimate two = estimate_srh(f, 2);
    const bool pass = one.valid && one.mu_k == 1.0 && !two.valid && std::abs(two.B_min + 1.0) <= 1e-10;
    return {pass, fmt("mu_1=%.17g (valid=%d); k=2: valid=%d B_min=%.17g", one.mu_k, one.valid ? 1 : 0,
                      two.valid ? 1 : 0, two.B_min)};
}

// 7. Closed forms and the ridge-logistic eigenvalue sandwich.
Outcome bound_suite() {
    bool pass = true;
    std::ostringstream detail;
    const double h0 = h_tau(0.0), h1 = h_tau(1.0);
    const bool h_ok = h0 == 0.0 && std::abs(h1 - (2.0 * std::log(2.0) - 1.0)) <= 1e-12;
    const double mu = srh_mu_bound(0.25, 1.0, 1.0);
    ChernoffParams c;
    c.eps = std::exp(-1.0);
    const std::uint64_t n_bound = chernoff_sample_bound(c, 1, 1);
    pass = h_ok && mu == 3.0 && n_bound == 6;
    detail << fmt("h(0)=%g h(1)=%.15f mu_bound=%g chernoff=%llu; ", h0, h1, mu,
                  static_cast<unsigned long long>(n_bound));

    std::mt19937_64 gen(7);
    const Index n = 80, p = 30;
    const double eta = 0.05;
    Dataset d;
    d.features = oracle::gaussian_matrix(gen, n, p);
    d.labels = Vector::Zero(n);
    std::bernoulli_distribution coin(0.5);
    for (Index i = 0; i < n; ++i) d.labels(i) = coin(gen) ? 1.0 : 0.0;
    LogisticLoss f(d, eta);
    std::uniform_int_distribution<int> size(1, 8);
    int inside = 0;
    for (int t = 0; t < 100; ++t) {
        const auto idx = oracle::top_k(oracle::gaussian_vector(gen, p), size(gen));
        const SupportSet S(p, idx);
        const Vector x = 3.0 * oracle::gaussian_vector(gen, p);
        Matrix AS(n, static_cast<Index>(idx.size()));
        for (std::size_t k = 0; k < idx.size(); ++k) AS.col(static_cast<Index>(k)) = d.features.col(idx[k]);
        const double top = Eigen::SelfAdjointEigenSolver<Matrix>(AS.transpose() * AS).eigenvalues().maxCoeff();
        const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(f.restricted_hessian(x, S)).eigenvalues();
        if (ev.minCoeff() >= eta - 1e-12 && ev.maxCoeff() <= eta + top / (4.0 * n) + 1e-12) ++inside;
    }
    pass = pass && inside == 100;
    detail << fmt("eigenvalue sandwich holds on %d/100 draws", inside);
    return {pass, detail.str()};
}

// 8. Finite-difference checks of every objective.
Outcome numerical_hygiene() {
    std::mt19937_64 gen(8);
    const Index n = 60, p = 20;
    Dataset d;
    d.features = oracle::gaussian_matrix(gen, n, p);
    d.labels = Vector::Zero(n);
    std::bernoulli_distribution coin(0.4);
    for (Index i = 0; i < n; ++i) d.labels(i) = coin(gen) ? 1.0 : 0.0;
    Dataset di = d;
    di.intercept = true;
    const Matrix M = oracle::gaussian_matrix(gen, p, p);
    std::vector<ObjectiveHandle> objectives = {
        std::make_shared<SquaredError>(d.features, oracle::gaussian_vector(gen, n)),
        std::make_shared<LogisticLoss>(d),
        std::make_shared<LogisticLoss>(d, 0.1),
        std::make_shared<LogisticLoss>(di, 0.1),
        std::make_shared<QuadraticForm>(M.transpose() * M, oracle::gaussian_vector(gen, p)),
    };
    bool pass = true;
    std::ostringstream detail;
    for (const auto& f : objectives) {
        const auto value = [&](const Vector& v) { return f->value(v); };
        double worst_grad = 0.0, worst_hess = 0.0;
        for (int t = 0; t < 100; ++t) {
            const Vector x = oracle::gaussian_vector(gen, f->dim());
            const Vector g = f->gradient(x);
            const Vector fd = oracle::fd_gradient(value, x, 1e-5);
            worst_grad = std::max(worst_grad, (fd - g).norm() / g.norm());

            const auto idx = oracle::top_k(oracle::gaussian_vector(gen, f->dim()), 4);
            const SupportSet S(f->dim(), idx);
            const Vector dS = oracle::gaussian_vector(gen, 4).normalized();
            const double quad = dS.dot(f->restricted_hessian(x, S) * dS);
            const double sd = oracle::second_difference(value, x, S.scatter(dS), 1e-4);
            worst_hess = std::max(worst_hess, std::abs(quad - sd) / std::abs(quad));
        }
        const bool ok = worst_grad < 1e-5 && worst_hess < 1e-4;
        pass = pass && ok;
        detail << fmt("%s grad %.1e hess %.1e; ", f->name().c_str(), worst_grad, worst_hess);
    }
    return {pass, detail.str()};
}

// 9. Label noise variance at the truth.
Outcome label_noise_variance() {
    int below = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        GenConfig cfg;
        cfg.p = 200;
        cfg.s = 5;
        cfg.n = 2000;
        cfg.seed = seed;
        cfg.intercept = true;
        const SyntheticProblem prob = generate_problem(cfg);
        const Vector t = prob.data.features * prob.truth.x_star;
        double acc = 0.0;
        for (Index i = 0; i < t.size(); ++i) {
            const double v = prob.data.labels(i) - sigmoid(t(i) + prob.truth.intercept);
            acc += v * v;
        }
        const double sigma2 = acc / static_cast<double>(t.size());
        worst = std::max(worst, sigma2);
        if (sigma2 < 0.25) ++below;
    }
    return {below >= 99, fmt("%d/100 seeds below 0.25 (need >= 99); largest %.4f", below, worst)};
}

// 10. Same seed, same bytes.
Outcome determinism() {
    SweepConfig cfg = SweepConfig::desk_defaults();
    cfg.n_grid = {60, 140};
    cfg.rho_grid = {0.0, 0.5};
    cfg.trials = 3;
    const auto render = [&] {
        std::ostringstream out;
        write_trial_csv(out, run_sweep(cfg), false);
        return out.str();
    };
    const std::string a = render();
    const std::string b = render();
    return {a == b && !a.empty(), fmt("two sweeps of %zu bytes are %s", a.size(), a == b ? "identical" : "different")};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"CoSaMP reduction", cosamp_reduction},
        {"IHT reduction", iht_reduction},
        {"noiseless recovery", noiseless_recovery},
        {"logistic sweep", logistic_sweep},
        {"l2 stabilization", l2_stabilization},
        {"SRH exactness on Q = 2*11^T - I", srh_example},
        {"closed-form bound suite", bound_suite},
        {"numerical hygiene", numerical_hygiene},
        {"label noise variance", label_noise_variance},
        {"determinism", determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failures += o.pass ? 0 : 1;
        std::printf("[%s] %2zu %s (%.1fs): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), secs,
                    o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
