#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tgdist/edrep.hpp"

namespace tgdist {

/// Eigenvalues of X^T X / n, descending, clamped at zero.
struct LambdaVector {
    Eigen::VectorXd values;
};

enum class DistanceKind { Matched, Unmatched };

struct DistanceMatrix {
    Eigen::MatrixXd values;  // symmetric, zero diagonal
    DistanceKind kind = DistanceKind::Unmatched;
    std::vector<std::string> ids;
};

/// ||X1 X1^T - X2 X2^T||_F evaluated through d x d products:
///   sqrt(||X1^T X1||_F^2 + ||X2^T X2||_F^2 - 2 ||X1^T X2||_F^2).
/// Rows of X1 and X2 must refer to the same nodes in the same order; that
/// matching is the caller's responsibility.
double matched_distance(const Embedding& a, const Embedding& b);

LambdaVector lambda_vector(const Embedding& x);

/// Euclidean distance between the lambda vectors; n may differ, d may not.
double unmatched_distance(const Embedding& a, const Embedding& b);
double lambda_distance(const LambdaVector& a, const LambdaVector& b);

/// Upper triangle filled with the chosen distance and mirrored.
DistanceMatrix pairwise_distances(std::span<const Embedding> embeddings, DistanceKind kind,
                                  std::vector<std::string> ids = {}, unsigned threads = 1);

std::string to_string(DistanceKind kind);
DistanceKind parse_distance_kind(const std::string& name);

/// CSV with the graph ids as header row and first column.
void write_distance_matrix_csv(const DistanceMatrix& m, const std::filesystem::path& path);
DistanceMatrix read_distance_matrix_csv(const std::filesystem::path& path, DistanceKind kind);
/// "graph_id,l1,...,ld" per graph.
void write_lambda_csv(std::span<const LambdaVector> lambdas, std::span<const std::string> ids,
                      const std::filesystem::path& path);

}  // namespace tgdist
