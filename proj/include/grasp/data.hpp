#pragma once

#include "grasp/objectives.hpp"
#include "grasp/rng.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

namespace grasp {

/// Synthetic logistic-regression problem shape.
struct GenConfig {
    Index p = 200;
    Index s = 5;
    double rho = 0.0;  // AR(1) correlation between neighbouring features
    Index n = 100;
    std::uint64_t seed = 0;
    bool intercept = false;

    void validate() const;
};

struct SparseParameter {
    Vector x_star;           // length p, exactly s nonzeros
    double intercept = 0.0;  // c; zero when the config has no intercept
};

/// Uniform s-subset support with standard normal values; c ~ N(0,1) if enabled.
SparseParameter gen_sparse_parameter(const GenConfig& cfg, Rng& rng);

/**
 * n independent rows of an AR(1) process with unit marginal variance:
 * a_1 ~ N(0,1), a_{j+1} = rho a_j + sqrt(1 - rho^2) z_j.
 */
Matrix gen_ar1_features(const GenConfig& cfg, Rng& rng);

/// Bernoulli labels with Pr{y = 1 | a} = sigmoid(<a, x*> + c).
Vector gen_labels(const Matrix& features, const Vector& x_star, double c, Rng& rng);

struct SyntheticProblem {
    Dataset data;
    SparseParameter truth;
};

/// Parameter, then features, then labels, all from Rng(cfg.seed).
SyntheticProblem generate_problem(const GenConfig& cfg);

/// Input that does not match a file schema. Carries the 1-based line number
/// (0 when the problem is not tied to a line).
class ParseError : public std::invalid_argument {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& msg);
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Round-trip decimal text for a double (17 significant digits).
std::string format_double(double v);

/// CSV with header `y,x1,...,xp` and one sample per row.
Dataset parse_dataset(std::istream& in, LabelKind kind, const std::string& source = "<stream>");
Dataset read_dataset(const std::filesystem::path& path, LabelKind kind = LabelKind::binary);
void write_dataset(std::ostream& out, const Dataset& data);
void write_dataset(const std::filesystem::path& path, const Dataset& data);

/// Parameter file: header `index,value`, one row per nonzero, then `c,<value>`.
void write_parameter(std::ostream& out, const SparseParameter& param);
void write_parameter(const std::filesystem::path& path, const SparseParameter& param);
SparseParameter parse_parameter(std::istream& in, Index p, const std::string& source = "<stream>");
SparseParameter read_parameter(const std::filesystem::path& path, Index p);

}  // namespace grasp
