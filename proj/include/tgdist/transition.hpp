#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "tgdist/graph.hpp"

namespace tgdist {

/// Lazy-walk transition of one snapshot, (D + I)^{-1} (W + I).
///
/// Only rows of active nodes are stored; every other row is the identity row
/// (an isolated walker stays put).
class SnapshotTransition {
public:
    explicit SnapshotTransition(const Snapshot& w);

    NodeId size() const { return n_; }
    double entry(NodeId i, NodeId j) const;
    Eigen::MatrixXd to_dense() const;

    std::span<const NodeId> active_nodes() const { return nodes_; }
    std::size_t row_begin(std::size_t slot) const { return offsets_[slot]; }
    std::size_t row_end(std::size_t slot) const { return offsets_[slot + 1]; }
    NodeId neighbor(std::size_t k) const { return nbr_[k]; }
    std::size_t neighbor_slot(std::size_t k) const { return nbr_slot_[k]; }
    double weight(std::size_t k) const { return w_[k]; }
    /// 1 / (1 + degree) for the node in `slot`.
    double inv_denominator(std::size_t slot) const { return inv_denom_[slot]; }

private:
    NodeId n_;
    std::vector<NodeId> nodes_;
    std::vector<std::size_t> offsets_;
    std::vector<NodeId> nbr_;
    std::vector<std::size_t> nbr_slot_;
    std::vector<double> w_;
    std::vector<double> inv_denom_;
};

enum class OperatorMode { Auto, Lazy, Materialized };

inline constexpr std::size_t kDefaultMaxDenseNodes = 8192;

/// Global time-respecting transition matrix
///
///   P = (1/T) * sum_{tau=1..T} L_tau L_{tau+1} ... L_T,
///
/// the end-point distribution of lazy walks of uniform length l in 1..T that
/// start at snapshot T-l+1. Lazy mode keeps the snapshot factors and never forms
/// P; materialized mode stores P densely.
class TransitionOperator {
public:
    /// Auto picks Materialized when n^2 <= E (total temporal edges), else Lazy.
    static TransitionOperator build(const TemporalGraph& g, OperatorMode mode = OperatorMode::Auto,
                                    std::size_t max_dense_nodes = kDefaultMaxDenseNodes);

    OperatorMode mode() const { return mode_; }
    NodeId size() const { return n_; }
    std::size_t num_snapshots() const { return T_; }

    /// P * M. Columns are processed independently, so results do not depend on `threads`.
    Eigen::MatrixXd apply(const Eigen::MatrixXd& m, unsigned threads = 1) const;
    /// P^T * M.
    Eigen::MatrixXd apply_transpose(const Eigen::MatrixXd& m, unsigned threads = 1) const;

    /// Dense P; throws UsageError when n exceeds max_nodes.
    Eigen::MatrixXd materialize(std::size_t max_nodes = kDefaultMaxDenseNodes) const;

private:
    TransitionOperator() = default;

    OperatorMode mode_ = OperatorMode::Lazy;
    NodeId n_ = 0;
    std::size_t T_ = 0;
    std::vector<SnapshotTransition> factors_;
    Eigen::MatrixXd dense_;
};

}  // namespace tgdist
