#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace grasp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/**
 * Sorted, duplicate-free set of coordinate indices over [0, dim).
 *
 * The ambient dimension travels with the set so restriction and union
 * can validate their operands.
 */
class SupportSet {
public:
    SupportSet() = default;

    /// Empty set over [0, dim).
    explicit SupportSet(Index dim);

    /// Indices may arrive in any order; duplicates are merged.
    /// Throws std::invalid_argument on an index outside [0, dim).
    SupportSet(Index dim, std::vector<Index> indices);
    SupportSet(Index dim, std::initializer_list<Index> indices);

    Index dim() const { return dim_; }
    std::size_t size() const { return idx_.size(); }
    bool empty() const { return idx_.empty(); }
    bool contains(Index i) const;

    const std::vector<Index>& indices() const { return idx_; }
    std::span<const Index> view() const { return idx_; }
    auto begin() const { return idx_.begin(); }
    auto end() const { return idx_.end(); }
    Index operator[](std::size_t k) const { return idx_[k]; }

    /// Set union; both operands must share the ambient dimension.
    SupportSet merged(const SupportSet& other) const;
    SupportSet with(Index i) const;
    SupportSet without(Index i) const;
    bool is_subset_of(const SupportSet& other) const;

    /// Columns/rows of a full vector gathered in index order.
    Vector gather(const Vector& v) const;
    /// Writes `values` into a zero vector of length dim() at the set's positions.
    Vector scatter(const Vector& values) const;

    std::string to_string(char sep = ' ') const;

    friend bool operator==(const SupportSet&, const SupportSet&) = default;

private:
    Index dim_ = 0;
    std::vector<Index> idx_;
};

/// Throws std::invalid_argument if any entry is NaN or infinite.
void require_finite(const Vector& v, const char* what);

/// Indices with |v_i| > 0. No epsilon: only exact zeros are excluded.
SupportSet support(const Vector& v);

/// Number of nonzero entries.
Index count_nonzeros(const Vector& v);

/**
 * Indices of the k largest-magnitude nonzero entries of v.
 *
 * Ties are broken toward the lower index. Zero entries are never
 * selected, so the result may hold fewer than k indices.
 */
SupportSet top_k_support(const Vector& v, Index k);

/// Best k-term approximation: v restricted to top_k_support(v, k).
Vector best_k_term(const Vector& v, Index k);

/// Copy of v with every coordinate outside S set to zero.
Vector restrict_to(const Vector& v, const SupportSet& S);

}  // namespace grasp
