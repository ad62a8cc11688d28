#include "grasp/objectives.hpp"

#include <cmath>
#include <stdexcept>

namespace grasp {

void Dataset::validate(LabelKind kind) const {
    if (features.rows() < 1) throw std::invalid_argument("Dataset: need at least one sample (n >= 1)");
    if (features.cols() < 1) throw std::invalid_argument("Dataset: need at least one feature (p >= 1)");
    if (labels.size() != features.rows()) throw std::invalid_argument("Dataset: label count differs from row count");
    if (!features.allFinite()) throw std::invalid_argument("Dataset: non-finite feature value");
    if (!labels.allFinite()) throw std::invalid_argument("Dataset: non-finite label");
    if (kind == LabelKind::binary) {
        for (Index i = 0; i < labels.size(); ++i) {
            if (labels(i) != 0.0 && labels(i) != 1.0) {
                throw std::invalid_argument("Dataset: label at row " + std::to_string(i) + " is not 0 or 1");
            }
        }
    }
}

Matrix design_matrix(const Dataset& data) {
    if (!data.intercept) return data.features;
    Matrix A(data.n(), data.p() + 1);
    A.leftCols(data.p()) = data.features;
    A.col(data.p()).setOnes();
    return A;
}

Vector Objective::restricted_gradient(const Vector& x, const SupportSet& S) const {
    check_support(S, "restricted_gradient");
    return S.gather(gradient(x));
}

void Objective::check_dim(const Vector& x, const char* op) const {
    if (x.size() != dim()) {
        throw std::invalid_argument(std::string(op) + ": expected length " + std::to_string(dim()) + ", got " +
                                    std::to_string(x.size()));
    }
}

void Objective::check_support(const SupportSet& S, const char* op) const {
    if (S.dim() != dim()) throw std::invalid_argument(std::string(op) + ": support dimension mismatch");
}

double log1pexp(double t) {
    return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t)));
}

double sigmoid(double t) {
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

namespace {

Matrix gather_columns(const Matrix& A, const SupportSet& S) {
    Matrix out(A.rows(), static_cast<Index>(S.size()));
    for (std::size_t k = 0; k < S.size(); ++k) out.col(static_cast<Index>(k)) = A.col(S[k]);
    return out;
}

// A x, touching only the columns where x is nonzero.
Vector sparse_product(const Matrix& A, const Vector& x) {
    const Index nnz = count_nonzeros(x);
    if (4 * nnz >= x.size()) return A * x;
    Vector out = Vector::Zero(A.rows());
    for (Index j = 0; j < x.size(); ++j) {
        if (x(j) != 0.0) out.noalias() += x(j) * A.col(j);
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// SquaredError

SquaredError::SquaredError(Matrix A, Vector y, bool intercept) : y_(std::move(y)) {
    if (A.rows() != y_.size()) throw std::invalid_argument("SquaredError: rows of A differ from length of y");
    if (A.rows() < 1 || A.cols() < 1) throw std::invalid_argument("SquaredError: empty design");
    if (!A.allFinite() || !y_.allFinite()) throw std::invalid_argument("SquaredError: non-finite data");
    Dataset d{std::move(A), Vector(), intercept};
    design_ = design_matrix(d);
    if (intercept) intercept_ = design_.cols() - 1;
}

SquaredError::SquaredError(const Dataset& data) : SquaredError(data.features, data.labels, data.intercept) {}

double SquaredError::value(const Vector& x) const {
    check_dim(x, "SquaredError::value");
    return 0.5 * (y_ - design_ * x).squaredNorm();
}

Vector SquaredError::gradient(const Vector& x) const {
    check_dim(x, "SquaredError::gradient");
    const Vector fitted = design_ * x;
    const Vector r = fitted - y_;
    return design_.transpose() * r;
}

Vector SquaredError::restricted_gradient(const Vector& x, const SupportSet& S) const {
    check_dim(x, "SquaredError::restricted_gradient");
    check_support(S, "SquaredError::restricted_gradient");
    const Vector r = sparse_product(design_, x) - y_;
    Vector g(static_cast<Index>(S.size()));
    for (std::size_t k = 0; k < S.size(); ++k) g(static_cast<Index>(k)) = design_.col(S[k]).dot(r);
    return g;
}

Matrix SquaredError::restricted_hessian(const Vector& x, const SupportSet& S) const {
    check_dim(x, "SquaredError::restricted_hessian");
    check_support(S, "SquaredError::restricted_hessian");
    const Matrix AS = gather_columns(design_, S);
    return AS.transpose() * AS;
}

// ---------------------------------------------------------------------------
// LogisticLoss

LogisticLoss::LogisticLoss(Dataset data, double eta) : eta_(eta) {
    data.validate(LabelKind::binary);
    if (!(eta >= 0.0) || !std::isfinite(eta)) throw std::invalid_argument("LogisticLoss: eta must be finite and >= 0");
    design_ = design_matrix(data);
    y_ = std::move(data.labels);
    if (data.intercept) intercept_ = design_.cols() - 1;
}

Vector LogisticLoss::margins(const Vector& x) const {
    return sparse_product(design_, x);
}

double LogisticLoss::value(const Vector& x) const {
    check_dim(x, "LogisticLoss::value");
    const Vector t = margins(x);
    double sum = 0.0;
    for (Index i = 0; i < t.size(); ++i) sum += log1pexp(t(i)) - y_(i) * t(i);
    double f = sum / static_cast<double>(samples());
    if (eta_ > 0.0) {
        double sq = x.squaredNorm();
        if (intercept_) sq -= x(*intercept_) * x(*intercept_);
        f += 0.5 * eta_ * sq;
    }
    return f;
}

Vector LogisticLoss::gradient(const Vector& x) const {
    check_dim(x, "LogisticLoss::gradient");
    const Vector t = margins(x);
    Vector v(t.size());
    for (Index i = 0; i < t.size(); ++i) v(i) = sigmoid(t(i)) - y_(i);
    Vector g = design_.transpose() * v / static_cast<double>(samples());
    if (eta_ > 0.0) {
        g += eta_ * x;
        if (intercept_) g(*intercept_) -= eta_ * x(*intercept_);
    }
    return g;
}

Vector LogisticLoss::restricted_gradient(const Vector& x, const SupportSet& S) const {
    check_dim(x, "LogisticLoss::restricted_gradient");
    check_support(S, "LogisticLoss::restricted_gradient");
    const Vector t = margins(x);
    Vector v(t.size());
    for (Index i = 0; i < t.size(); ++i) v(i) = sigmoid(t(i)) - y_(i);
    const double inv_n = 1.0 / static_cast<double>(samples());
    Vector g(static_cast<Index>(S.size()));
    for (std::size_t k = 0; k < S.size(); ++k) {
        const Index j = S[k];
        double gj = design_.col(j).dot(v) * inv_n;
        if (eta_ > 0.0 && j != intercept_) gj += eta_ * x(j);
        g(static_cast<Index>(k)) = gj;
    }
    return g;
}

Matrix LogisticLoss::restricted_hessian(const Vector& x, const SupportSet& S) const {
    check_dim(x, "LogisticLoss::restricted_hessian");
    check_support(S, "LogisticLoss::restricted_hessian");
    const Vector t = margins(x);
    // Lambda_ii = sech^2(t_i / 2); H = (1/4n) A^T Lambda A.
    Vector w(t.size());
    for (Index i = 0; i < t.size(); ++i) {
        const double c = std::cosh(0.5 * t(i));
        w(i) = 1.0 / (c * c);
    }
    const Matrix AS = gather_columns(design_, S);
    Matrix H = AS.transpose() * w.asDiagonal() * AS;
    H /= 4.0 * static_cast<double>(samples());
    if (eta_ > 0.0) {
        for (std::size_t k = 0; k < S.size(); ++k) {
            if (S[k] != intercept_) H(static_cast<Index>(k), static_cast<Index>(k)) += eta_;
        }
    }
    return H;
}

// ---------------------------------------------------------------------------
// QuadraticForm

QuadraticForm::QuadraticForm(Matrix Q) : QuadraticForm(Q, Vector::Zero(Q.rows())) {}

QuadraticForm::QuadraticForm(Matrix Q, Vector b) : Q_(std::move(Q)), b_(std::move(b)) {
    if (Q_.rows() != Q_.cols() || Q_.rows() < 1) throw std::invalid_argument("QuadraticForm: Q must be square");
    if (b_.size() != Q_.rows()) throw std::invalid_argument("QuadraticForm: b has wrong length");
    if ((Q_ - Q_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, Q_.cwiseAbs().maxCoeff())) {
        throw std::invalid_argument("QuadraticForm: Q must be symmetric");
    }
}

double QuadraticForm::value(const Vector& x) const {
    check_dim(x, "QuadraticForm::value");
    return 0.5 * x.dot(Q_ * x) - b_.dot(x);
}

Vector QuadraticForm::gradient(const Vector& x) const {
    check_dim(x, "QuadraticForm::gradient");
    return Q_ * x - b_;
}

Matrix QuadraticForm::restricted_hessian(const Vector& x, const SupportSet& S) const {
    check_dim(x, "QuadraticForm::restricted_hessian");
    check_support(S, "QuadraticForm::restricted_hessian");
    const auto m = static_cast<Index>(S.size());
    Matrix H(m, m);
    for (Index r = 0; r < m; ++r)
        for (Index c = 0; c < m; ++c) H(r, c) = Q_(S[static_cast<std::size_t>(r)], S[static_cast<std::size_t>(c)]);
    return H;
}

// ---------------------------------------------------------------------------

ObjectiveKind parse_objective_kind(const std::string& name) {
    if (name == "squared_error") return ObjectiveKind::squared_error;
    if (name == "logistic") return ObjectiveKind::logistic;
    if (name == "logistic_l2") return ObjectiveKind::logistic_l2;
    throw std::invalid_argument("unknown objective '" + name + "'");
}

ObjectiveHandle make_objective(ObjectiveKind kind, const Dataset& data, std::optional<double> eta) {
    switch (kind) {
        case ObjectiveKind::squared_error:
            if (eta) throw std::invalid_argument("eta applies only to logistic_l2");
            data.validate(LabelKind::real);
            return std::make_shared<SquaredError>(data);
        case ObjectiveKind::logistic:
            if (eta) throw std::invalid_argument("eta applies only to logistic_l2");
            return std::make_shared<LogisticLoss>(data, 0.0);
        case ObjectiveKind::logistic_l2:
            if (!eta || !(*eta > 0.0)) throw std::invalid_argument("logistic_l2 requires eta > 0");
            return std::make_shared<LogisticLoss>(data, *eta);
    }
    throw std::invalid_argument("make_objective: bad kind");
}

double bregman_divergence(const Objective& f, const Vector& x, const Vector& xp) {
    if (x.size() != f.dim() || xp.size() != f.dim()) {
        throw std::invalid_argument("bregman_divergence: dimension mismatch");
    }
    return f.value(xp) - f.value(x) - f.gradient(x).dot(xp - x);
}

}  // namespace grasp
