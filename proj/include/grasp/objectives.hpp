#pragma once

#include "grasp/sparse_core.hpp"

#include <memory>
#include <optional>
#include <string>

namespace grasp {

enum class LabelKind { binary, real };

/**
 * Feature rows a_i^T with one label per row.
 *
 * With `intercept` set, objectives built on the dataset append an implicit
 * constant-1 column at coordinate p, so their dimension is p + 1.
 */
struct Dataset {
    Matrix features;  // n x p
    Vector labels;    // n
    bool intercept = false;

    Index n() const { return features.rows(); }
    Index p() const { return features.cols(); }

    /// Throws std::invalid_argument when n < 1, p < 1, sizes disagree,
    /// features are non-finite, or binary labels are not exactly 0/1.
    void validate(LabelKind kind) const;
};

/// Design matrix with the constant column appended when `intercept` is set.
Matrix design_matrix(const Dataset& data);

/**
 * Smooth cost function f: R^dim -> R.
 *
 * Implementations are immutable after construction, so a single instance may
 * be shared across threads. Every entry point throws std::invalid_argument
 * when the argument length differs from dim().
 */
class Objective {
public:
    virtual ~Objective() = default;

    virtual Index dim() const = 0;
    virtual std::string name() const = 0;

    virtual double value(const Vector& x) const = 0;
    virtual Vector gradient(const Vector& x) const = 0;

    /// Gradient entries at the indices of S, in index order (length |S|).
    virtual Vector restricted_gradient(const Vector& x, const SupportSet& S) const;

    /// P_S^T H_f(x) P_S as a dense |S| x |S| matrix.
    virtual Matrix restricted_hessian(const Vector& x, const SupportSet& S) const = 0;

    /// Coordinate that is exempt from the sparsity budget, if any.
    virtual std::optional<Index> intercept_index() const { return std::nullopt; }

protected:
    void check_dim(const Vector& x, const char* op) const;
    void check_support(const SupportSet& S, const char* op) const;
};

using ObjectiveHandle = std::shared_ptr<const Objective>;

/// f(x) = 1/2 ||y - A x||^2, no 1/n factor.
class SquaredError final : public Objective {
public:
    SquaredError(Matrix A, Vector y, bool intercept = false);
    explicit SquaredError(const Dataset& data);

    Index dim() const override { return design_.cols(); }
    std::string name() const override { return "squared_error"; }
    double value(const Vector& x) const override;
    Vector gradient(const Vector& x) const override;
    Vector restricted_gradient(const Vector& x, const SupportSet& S) const override;
    Matrix restricted_hessian(const Vector& x, const SupportSet& S) const override;
    std::optional<Index> intercept_index() const override { return intercept_; }

    const Matrix& design() const { return design_; }
    const Vector& response() const { return y_; }

private:
    Matrix design_;
    Vector y_;
    std::optional<Index> intercept_;
};

/**
 * Average logistic loss with an optional ridge term:
 *   f(x) = (1/n) sum_i [log(1 + exp(<a_i,x>)) - y_i <a_i,x>] + (eta/2) ||x||^2
 *
 * The ridge term skips the intercept coordinate.
 */
class LogisticLoss final : public Objective {
public:
    explicit LogisticLoss(Dataset data, double eta = 0.0);

    Index dim() const override { return design_.cols(); }
    std::string name() const override { return eta_ > 0.0 ? "logistic_l2" : "logistic"; }
    double value(const Vector& x) const override;
    Vector gradient(const Vector& x) const override;
    Vector restricted_gradient(const Vector& x, const SupportSet& S) const override;
    Matrix restricted_hessian(const Vector& x, const SupportSet& S) const override;
    std::optional<Index> intercept_index() const override { return intercept_; }

    double eta() const { return eta_; }
    Index samples() const { return design_.rows(); }
    const Matrix& design() const { return design_; }
    const Vector& labels() const { return y_; }

    /// Margins <a_i, x>; skips zero coordinates of x.
    Vector margins(const Vector& x) const;

private:
    Matrix design_;
    Vector y_;
    double eta_;
    std::optional<Index> intercept_;
};

/// f(x) = 1/2 x^T Q x - b^T x with symmetric Q. Hessian is Q everywhere.
class QuadraticForm final : public Objective {
public:
    explicit QuadraticForm(Matrix Q);
    QuadraticForm(Matrix Q, Vector b);

    Index dim() const override { return Q_.rows(); }
    std::string name() const override { return "quadratic"; }
    double value(const Vector& x) const override;
    Vector gradient(const Vector& x) const override;
    Matrix restricted_hessian(const Vector& x, const SupportSet& S) const override;

private:
    Matrix Q_;
    Vector b_;
};

enum class ObjectiveKind { squared_error, logistic, logistic_l2 };

/// Parses "squared_error", "logistic" or "logistic_l2".
ObjectiveKind parse_objective_kind(const std::string& name);

/**
 * Builds one of the built-in objectives. `eta` must be positive for
 * logistic_l2 and absent otherwise. Logistic kinds require binary labels.
 */
ObjectiveHandle make_objective(ObjectiveKind kind, const Dataset& data,
                               std::optional<double> eta = std::nullopt);

/// B_f(xp || x) = f(xp) - f(x) - <grad f(x), xp - x>.
double bregman_divergence(const Objective& f, const Vector& x, const Vector& xp);

/// Numerically stable log(1 + exp(t)).
double log1pexp(double t);
/// Numerically stable 1 / (1 + exp(-t)).
double sigmoid(double t);

}  // namespace grasp
