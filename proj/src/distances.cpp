#include "tgdist/distances.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "tgdist/error.hpp"
#include "tgdist/parallel.hpp"

namespace tgdist {

namespace {

constexpr double kRadicandSlack = 1e-9;

double gram_distance(const Eigen::MatrixXd& x1, const Eigen::MatrixXd& x2, double self1, double self2) {
    double cross = (x1.transpose() * x2).squaredNorm();
    double radicand = self1 + self2 - 2.0 * cross;
    if (radicand < 0.0) {
        if (radicand < -kRadicandSlack * std::max(1.0, self1 + self2))
            throw NumericError("matched distance radicand is negative beyond round-off");
        radicand = 0.0;
    }
    return std::sqrt(radicand);
}

void check_matched(const Embedding& a, const Embedding& b) {
    if (a.size() != b.size())
        throw UsageError("matched distance needs equal node counts (n=" + std::to_string(a.size()) + " vs n=" +
                         std::to_string(b.size()) + ")");
    if (a.dim() != b.dim())
        throw UsageError("embeddings have different dimensions (d=" + std::to_string(a.dim()) + " vs d=" +
                         std::to_string(b.dim()) + ")");
}

}  // namespace

double matched_distance(const Embedding& a, const Embedding& b) {
    check_matched(a, b);
    const auto& x1 = a.matrix();
    const auto& x2 = b.matrix();
    return gram_distance(x1, x2, (x1.transpose() * x1).squaredNorm(), (x2.transpose() * x2).squaredNorm());
}

LambdaVector lambda_vector(const Embedding& x) {
    // rows in lexicographic order, so the sum does not depend on node labels
    const Eigen::MatrixXd& m = x.matrix();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(m.rows()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            if (m(a, c) != m(b, c)) return m(a, c) < m(b, c);
        return false;
    });
    Eigen::MatrixXd sorted(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i) sorted.row(i) = m.row(order[static_cast<std::size_t>(i)]);
    Eigen::MatrixXd cov = sorted.transpose() * sorted / static_cast<double>(x.size());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericError("symmetric eigensolver failed");
    Eigen::VectorXd ev = solver.eigenvalues().reverse();  // ascending -> descending
    return {ev.cwiseMax(0.0)};
}

double lambda_distance(const LambdaVector& a, const LambdaVector& b) {
    if (a.values.size() != b.values.size())
        throw UsageError("lambda vectors have different dimensions (d=" + std::to_string(a.values.size()) +
                         " vs d=" + std::to_string(b.values.size()) + ")");
    return (a.values - b.values).norm();
}

double unmatched_distance(const Embedding& a, const Embedding& b) {
    if (a.dim() != b.dim())
        throw UsageError("embeddings have different dimensions (d=" + std::to_string(a.dim()) + " vs d=" +
                         std::to_string(b.dim()) + ")");
    return lambda_distance(lambda_vector(a), lambda_vector(b));
}

DistanceMatrix pairwise_distances(std::span<const Embedding> embeddings, DistanceKind kind,
                                  std::vector<std::string> ids, unsigned threads) {
    const std::size_t m = embeddings.size();
    if (ids.empty())
        for (std::size_t i = 0; i < m; ++i) ids.push_back(std::to_string(i));
    if (ids.size() != m) throw UsageError("need one id per embedding");
    for (std::size_t i = 1; i < m; ++i) {
        if (kind == DistanceKind::Matched) check_matched(embeddings[0], embeddings[i]);
        else if (embeddings[i].dim() != embeddings[0].dim())
            throw UsageError("embeddings have different dimensions");
    }

    DistanceMatrix out{Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m)), kind,
                       std::move(ids)};
    std::vector<LambdaVector> lambdas;
    std::vector<double> self;
    if (kind == DistanceKind::Unmatched) {
        lambdas.resize(m);
        parallel_for(m, threads, [&](std::size_t i) { lambdas[i] = lambda_vector(embeddings[i]); });
    } else {
        self.resize(m);
        parallel_for(m, threads, [&](std::size_t i) {
            self[i] = (embeddings[i].matrix().transpose() * embeddings[i].matrix()).squaredNorm();
        });
    }
    parallel_for(m, threads, [&](std::size_t i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            double v = kind == DistanceKind::Unmatched
                           ? lambda_distance(lambdas[i], lambdas[j])
                           : gram_distance(embeddings[i].matrix(), embeddings[j].matrix(), self[i], self[j]);
            out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
        }
    });
    for (Eigen::Index i = 0; i < out.values.rows(); ++i)
        for (Eigen::Index j = 0; j < i; ++j) out.values(i, j) = out.values(j, i);
    return out;
}

std::string to_string(DistanceKind kind) { return kind == DistanceKind::Matched ? "matched" : "unmatched"; }

DistanceKind parse_distance_kind(const std::string& name) {
    if (name == "matched" || name == "dm") return DistanceKind::Matched;
    if (name == "unmatched" || name == "du") return DistanceKind::Unmatched;
    throw UsageError("unknown distance kind '" + name + "' (expected matched or unmatched)");
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void write_distance_matrix_csv(const DistanceMatrix& m, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << "graph";
    for (const auto& id : m.ids) out << ',' << id;
    out << '\n';
    for (Eigen::Index i = 0; i < m.values.rows(); ++i) {
        out << m.ids[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < m.values.cols(); ++j) out << ',' << fmt(m.values(i, j));
        out << '\n';
    }
}

DistanceMatrix read_distance_matrix_csv(const std::filesystem::path& path, DistanceKind kind) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open distance matrix " + path.string());
    std::string line, cell;
    if (!std::getline(in, line)) throw ParseError(1, "empty distance matrix file");
    DistanceMatrix out;
    out.kind = kind;
    {
        std::stringstream ls(line);
        std::getline(ls, cell, ',');
        while (std::getline(ls, cell, ',')) out.ids.push_back(cell);
    }
    const auto m = static_cast<Eigen::Index>(out.ids.size());
    out.values.resize(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        if (!std::getline(in, line)) throw ParseError(static_cast<std::size_t>(i) + 2, "missing row");
        std::stringstream ls(line);
        std::getline(ls, cell, ',');
        for (Eigen::Index j = 0; j < m; ++j) {
            if (!std::getline(ls, cell, ',')) throw ParseError(static_cast<std::size_t>(i) + 2, "short row");
            try {
                out.values(i, j) = std::stod(cell);
            } catch (const std::logic_error&) {
                throw ParseError(static_cast<std::size_t>(i) + 2, "malformed number '" + cell + "'");
            }
        }
    }
    return out;
}

void write_lambda_csv(std::span<const LambdaVector> lambdas, std::span<const std::string> ids,
                      const std::filesystem::path& path) {
    if (lambdas.size() != ids.size()) throw UsageError("need one id per lambda vector");
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    Eigen::Index d = lambdas.empty() ? 0 : lambdas[0].values.size();
    out << "graph_id";
    for (Eigen::Index c = 1; c <= d; ++c) out << ",l" << c;
    out << '\n';
    for (std::size_t k = 0; k < lambdas.size(); ++k) {
        out << ids[k];
        for (Eigen::Index c = 0; c < lambdas[k].values.size(); ++c) out << ',' << fmt(lambdas[k].values(c));
        out << '\n';
    }
}

}  // namespace tgdist
