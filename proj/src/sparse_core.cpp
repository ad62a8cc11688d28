#include "grasp/sparse_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace grasp {

SupportSet::SupportSet(Index dim) : dim_(dim) {
    if (dim < 0) throw std::invalid_argument("SupportSet: negative dimension");
}

SupportSet::SupportSet(Index dim, std::vector<Index> indices) : dim_(dim), idx_(std::move(indices)) {
    if (dim < 0) throw std::invalid_argument("SupportSet: negative dimension");
    std::sort(idx_.begin(), idx_.end());
    idx_.erase(std::unique(idx_.begin(), idx_.end()), idx_.end());
    if (!idx_.empty() && (idx_.front() < 0 || idx_.back() >= dim_)) {
        throw std::invalid_argument("SupportSet: index out of range [0, " + std::to_string(dim_) + ")");
    }
}

SupportSet::SupportSet(Index dim, std::initializer_list<Index> indices)
    : SupportSet(dim, std::vector<Index>(indices)) {}

bool SupportSet::contains(Index i) const {
    return std::binary_search(idx_.begin(), idx_.end(), i);
}

SupportSet SupportSet::merged(const SupportSet& other) const {
    if (other.dim_ != dim_) throw std::invalid_argument("SupportSet::merged: dimension mismatch");
    SupportSet out(dim_);
    out.idx_.reserve(idx_.size() + other.idx_.size());
    std::set_union(idx_.begin(), idx_.end(), other.idx_.begin(), other.idx_.end(),
                   std::back_inserter(out.idx_));
    return out;
}

SupportSet SupportSet::with(Index i) const {
    if (i < 0 || i >= dim_) throw std::invalid_argument("SupportSet::with: index out of range");
    SupportSet out = *this;
    auto it = std::lower_bound(out.idx_.begin(), out.idx_.end(), i);
    if (it == out.idx_.end() || *it != i) out.idx_.insert(it, i);
    return out;
}

SupportSet SupportSet::without(Index i) const {
    SupportSet out = *this;
    auto it = std::lower_bound(out.idx_.begin(), out.idx_.end(), i);
    if (it != out.idx_.end() && *it == i) out.idx_.erase(it);
    return out;
}

bool SupportSet::is_subset_of(const SupportSet& other) const {
    return std::includes(other.idx_.begin(), other.idx_.end(), idx_.begin(), idx_.end());
}

Vector SupportSet::gather(const Vector& v) const {
    if (v.size() != dim_) throw std::invalid_argument("SupportSet::gather: dimension mismatch");
    Vector out(static_cast<Index>(idx_.size()));
    for (std::size_t k = 0; k < idx_.size(); ++k) out(static_cast<Index>(k)) = v(idx_[k]);
    return out;
}

Vector SupportSet::scatter(const Vector& values) const {
    if (values.size() != static_cast<Index>(idx_.size())) {
        throw std::invalid_argument("SupportSet::scatter: size mismatch");
    }
    Vector out = Vector::Zero(dim_);
    for (std::size_t k = 0; k < idx_.size(); ++k) out(idx_[k]) = values(static_cast<Index>(k));
    return out;
}

std::string SupportSet::to_string(char sep) const {
    std::ostringstream os;
    for (std::size_t k = 0; k < idx_.size(); ++k) {
        if (k) os << sep;
        os << idx_[k];
    }
    return os.str();
}

void require_finite(const Vector& v, const char* what) {
    if (!v.allFinite()) throw std::invalid_argument(std::string(what) + ": non-finite entry");
}

SupportSet support(const Vector& v) {
    std::vector<Index> idx;
    for (Index i = 0; i < v.size(); ++i) {
        if (v(i) != 0.0) idx.push_back(i);
    }
    return SupportSet(v.size(), std::move(idx));
}

Index count_nonzeros(const Vector& v) {
    return static_cast<Index>((v.array() != 0.0).count());
}

SupportSet top_k_support(const Vector& v, Index k) {
    if (k < 0 || k > v.size()) {
        throw std::invalid_argument("top_k_support: k must lie in [0, " + std::to_string(v.size()) + "]");
    }
    std::vector<Index> nz;
    nz.reserve(static_cast<std::size_t>(v.size()));
    for (Index i = 0; i < v.size(); ++i) {
        if (v(i) != 0.0) nz.push_back(i);
    }
    const auto keep = std::min<std::size_t>(static_cast<std::size_t>(k), nz.size());
    // Larger magnitude first; equal magnitudes keep the lower index.
    auto before = [&v](Index a, Index b) {
        const double ma = std::abs(v(a));
        const double mb = std::abs(v(b));
        return ma > mb || (ma == mb && a < b);
    };
    std::partial_sort(nz.begin(), nz.begin() + static_cast<std::ptrdiff_t>(keep), nz.end(), before);
    nz.resize(keep);
    return SupportSet(v.size(), std::move(nz));
}

Vector best_k_term(const Vector& v, Index k) {
    return restrict_to(v, top_k_support(v, k));
}

Vector restrict_to(const Vector& v, const SupportSet& S) {
    if (S.dim() != v.size()) throw std::invalid_argument("restrict_to: dimension mismatch");
    Vector out = Vector::Zero(v.size());
    for (Index i : S) out(i) = v(i);
    return out;
}

}  // namespace grasp
