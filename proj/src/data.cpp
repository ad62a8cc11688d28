#include "grasp/data.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>
#include <vector>

namespace grasp {

void GenConfig::validate() const {
    if (p < 1) throw std::invalid_argument("GenConfig: p must be >= 1");
    if (s < 0 || s > p) throw std::invalid_argument("GenConfig: s must lie in [0, p]");
    if (n < 1) throw std::invalid_argument("GenConfig: n must be >= 1");
    if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("GenConfig: rho must lie in [0, 1]");
}

SparseParameter gen_sparse_parameter(const GenConfig& cfg, Rng& rng) {
    cfg.validate();
    SparseParameter out;
    out.x_star = Vector::Zero(cfg.p);
    for (long j : rng.subset(static_cast<long>(cfg.p), static_cast<long>(cfg.s))) {
        double v = rng.normal();
        // Exact zero has probability ~2^-53 per draw; redraw to keep ||x*||_0 = s.
        while (v == 0.0) v = rng.normal();
        out.x_star(j) = v;
    }
    out.intercept = cfg.intercept ? rng.normal() : 0.0;
    return out;
}

Matrix gen_ar1_features(const GenConfig& cfg, Rng& rng) {
    cfg.validate();
    const double innov = std::sqrt(1.0 - cfg.rho * cfg.rho);
    Matrix A(cfg.n, cfg.p);
    for (Index i = 0; i < cfg.n; ++i) {
        A(i, 0) = rng.normal();
        for (Index j = 1; j < cfg.p; ++j) A(i, j) = cfg.rho * A(i, j - 1) + innov * rng.normal();
    }
    return A;
}

Vector gen_labels(const Matrix& features, const Vector& x_star, double c, Rng& rng) {
    if (features.cols() != x_star.size()) throw std::invalid_argument("gen_labels: dimension mismatch");
    Vector y(features.rows());
    for (Index i = 0; i < features.rows(); ++i) {
        const double prob_one = sigmoid(features.row(i).dot(x_star) + c);
        y(i) = rng.bernoulli(prob_one) ? 1.0 : 0.0;
    }
    return y;
}

SyntheticProblem generate_problem(const GenConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);
    SyntheticProblem out;
    out.truth = gen_sparse_parameter(cfg, rng);
    out.data.features = gen_ar1_features(cfg, rng);
    out.data.labels = gen_labels(out.data.features, out.truth.x_star, out.truth.intercept, rng);
    out.data.intercept = cfg.intercept;
    return out;
}

// ---------------------------------------------------------------------------
// CSV

ParseError::ParseError(const std::string& source, std::size_t line, const std::string& msg)
    : std::invalid_argument(source + (line ? ":" + std::to_string(line) : std::string()) + ": " + msg), line_(line) {}

std::string format_double(double v) {
    char buf[32];
    const int len = std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf, static_cast<std::size_t>(len));
}

namespace {

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

bool parse_number(std::string_view field, double& out) {
    while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
    while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
    if (field.empty()) return false;
    if (field.front() == '+') field.remove_prefix(1);
    const auto* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, out);
    return ec == std::errc() && ptr == end && std::isfinite(out);
}

bool next_line(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path.string(), 0, "cannot open file");
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path.string() + ": cannot open for writing");
    return out;
}

}  // namespace

Dataset parse_dataset(std::istream& in, LabelKind kind, const std::string& source) {
    std::string line;
    if (!next_line(in, line) || line.empty()) throw ParseError(source, 1, "empty file, expected header y,x1,...,xp");
    const auto header = split(line);
    if (header.front() != "y") throw ParseError(source, 1, "header must start with column 'y'");
    if (header.size() < 2) throw ParseError(source, 1, "header names no feature columns");
    for (std::size_t k = 1; k < header.size(); ++k) {
        if (header[k].empty()) throw ParseError(source, 1, "empty column name");
    }
    const auto p = static_cast<Index>(header.size() - 1);

    std::vector<double> values;
    std::vector<double> labels;
    std::size_t lineno = 1;
    while (next_line(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto fields = split(line);
        if (fields.size() != header.size()) {
            throw ParseError(source, lineno,
                             "expected " + std::to_string(header.size()) + " fields, found " + std::to_string(fields.size()));
        }
        double y;
        if (!parse_number(fields[0], y)) throw ParseError(source, lineno, "malformed label '" + std::string(fields[0]) + "'");
        if (kind == LabelKind::binary && y != 0.0 && y != 1.0) {
            throw ParseError(source, lineno, "label must be 0 or 1, found '" + std::string(fields[0]) + "'");
        }
        labels.push_back(y);
        for (std::size_t k = 1; k < fields.size(); ++k) {
            double v;
            if (!parse_number(fields[k], v)) {
                throw ParseError(source, lineno, "malformed value '" + std::string(fields[k]) + "' in column " + std::to_string(k + 1));
            }
            values.push_back(v);
        }
    }

    Dataset out;
    const auto n = static_cast<Index>(labels.size());
    out.features = Matrix(n, p);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < p; ++j) out.features(i, j) = values[static_cast<std::size_t>(i * p + j)];
    out.labels = Eigen::Map<const Vector>(labels.data(), n);
    out.validate(kind);
    return out;
}

Dataset read_dataset(const std::filesystem::path& path, LabelKind kind) {
    auto in = open_input(path);
    return parse_dataset(in, kind, path.string());
}

void write_dataset(std::ostream& out, const Dataset& data) {
    if (data.labels.size() != data.features.rows()) throw std::invalid_argument("write_dataset: label count mismatch");
    out << 'y';
    for (Index j = 0; j < data.p(); ++j) out << ",x" << (j + 1);
    out << '\n';
    for (Index i = 0; i < data.n(); ++i) {
        out << format_double(data.labels(i));
        for (Index j = 0; j < data.p(); ++j) out << ',' << format_double(data.features(i, j));
        out << '\n';
    }
}

void write_dataset(const std::filesystem::path& path, const Dataset& data) {
    auto out = open_output(path);
    write_dataset(out, data);
}

void write_parameter(std::ostream& out, const SparseParameter& param) {
    out << "index,value\n";
    for (Index j = 0; j < param.x_star.size(); ++j) {
        if (param.x_star(j) != 0.0) out << j << ',' << format_double(param.x_star(j)) << '\n';
    }
    out << "c," << format_double(param.intercept) << '\n';
}

void write_parameter(const std::filesystem::path& path, const SparseParameter& param) {
    auto out = open_output(path);
    write_parameter(out, param);
}

SparseParameter parse_parameter(std::istream& in, Index p, const std::string& source) {
    std::string line;
    if (!next_line(in, line) || line != "index,value") throw ParseError(source, 1, "expected header index,value");
    SparseParameter out;
    out.x_star = Vector::Zero(p);
    bool saw_c = false;
    std::size_t lineno = 1;
    while (next_line(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto fields = split(line);
        if (fields.size() != 2) throw ParseError(source, lineno, "expected 2 fields");
        double v;
        if (!parse_number(fields[1], v)) throw ParseError(source, lineno, "malformed value");
        if (fields[0] == "c") {
            out.intercept = v;
            saw_c = true;
            continue;
        }
        long j = -1;
        auto [ptr, ec] = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), j);
        if (ec != std::errc() || ptr != fields[0].data() + fields[0].size() || j < 0 || j >= p) {
            throw ParseError(source, lineno, "index '" + std::string(fields[0]) + "' outside [0, " + std::to_string(p) + ")");
        }
        out.x_star(j) = v;
    }
    if (!saw_c) throw ParseError(source, lineno, "missing intercept row 'c,<value>'");
    return out;
}

SparseParameter read_parameter(const std::filesystem::path& path, Index p) {
    auto in = open_input(path);
    return parse_parameter(in, p, path.string());
}

}  // namespace grasp
