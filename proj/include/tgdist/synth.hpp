#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tgdist/graph.hpp"

namespace tgdist {

/// Simple undirected graph; edges stored once with i < j, sorted.
struct StaticGraph {
    NodeId n = 0;
    std::vector<std::pair<NodeId, NodeId>> edges;

    double mean_degree() const { return n > 0 ? 2.0 * static_cast<double>(edges.size()) / n : 0.0; }
    std::vector<int> degrees() const;
    /// Mean of the local clustering coefficients (nodes with degree < 2 count as 0).
    double average_clustering() const;
};

/// Degree-corrected SBM: P(A_ij = 1) = min(1, theta_i theta_j C(l_i, l_j) / n).
struct DcsbmParams {
    NodeId n = 0;
    std::vector<int> labels;     // 0..k-1
    Eigen::MatrixXd affinity;    // k x k, symmetric, nonnegative
    std::vector<double> theta;   // sums to n
};

StaticGraph dcsbm(const DcsbmParams& params, std::uint64_t seed);
double dcsbm_expected_mean_degree(const DcsbmParams& params);

/// P(A_ij = 1) = min(1, scale * exp(-beta ||x_i - x_j||)), positions in the unit disk.
struct GeometricParams {
    NodeId n = 0;
    double beta = 20.0;
    double scale = 1.0;
    std::vector<Eigen::Vector2d> positions;  // sampled uniformly in the disk when empty
};

StaticGraph geometric(const GeometricParams& params, std::uint64_t seed);
double geometric_expected_mean_degree(const GeometricParams& params);

enum class ModelKind { ER, SBM, CM, GM };

inline constexpr ModelKind kAllModels[] = {ModelKind::ER, ModelKind::SBM, ModelKind::CM, ModelKind::GM};

std::string to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);

inline constexpr double kDefaultMeanDegree = 4.8;

/// Parameters of the ER / SBM / CM presets, calibrated so the expected mean degree is `target`.
DcsbmParams dcsbm_preset(ModelKind kind, NodeId n, double target, std::uint64_t seed);
/// Geometric preset (beta = 20), kernel scale found by bisection on the expected mean degree.
GeometricParams geometric_preset(NodeId n, double target, std::uint64_t seed);

StaticGraph preset(ModelKind kind, NodeId n, double target_mean_degree, std::uint64_t seed);

/// Copies to every static edge the activity (active snapshots and weights) of a
/// uniformly chosen edge of `activity_source`. With `circular_shift`, each copy
/// is rotated by a uniform offset.
TemporalGraph temporalize(const StaticGraph& sg, const TemporalGraph& activity_source, std::uint64_t seed,
                          bool circular_shift = false);

struct ActivityProfile {
    std::size_t num_snapshots = 200;
    std::size_t bank_size = 500;
    double on_exponent = 2.5;   // P(duration = k) ~ k^-exponent, k = 1..T
    double off_exponent = 2.5;
};

/// Bank of independent on/off edge activity series: edge (2k, 2k+1) carries series k.
TemporalGraph synthetic_activity(const ActivityProfile& profile, std::uint64_t seed);

}  // namespace tgdist
