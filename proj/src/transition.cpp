#include "tgdist/transition.hpp"

#include <algorithm>

#include "tgdist/error.hpp"
#include "tgdist/parallel.hpp"

namespace tgdist {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

SnapshotTransition::SnapshotTransition(const Snapshot& w) : n_(w.size()) {
    auto active = w.active_nodes();
    nodes_.assign(active.begin(), active.end());
    offsets_.reserve(nodes_.size() + 1);
    offsets_.push_back(0);
    inv_denom_.reserve(nodes_.size());
    for (std::size_t s = 0; s < nodes_.size(); ++s) {
        auto nb = w.neighbors_at(s);
        auto ws = w.weights_at(s);
        double degree = 0.0;
        for (std::size_t k = 0; k < nb.size(); ++k) {
            if (ws[k] < 0.0) throw DataError("negative weight in snapshot");
            degree += ws[k];
            nbr_.push_back(nb[k]);
            nbr_slot_.push_back(static_cast<std::size_t>(w.slot_of(nb[k])));
            w_.push_back(ws[k]);
        }
        offsets_.push_back(nbr_.size());
        inv_denom_.push_back(1.0 / (1.0 + degree));
    }
}

double SnapshotTransition::entry(NodeId i, NodeId j) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), i);
    if (it == nodes_.end() || *it != i) return i == j ? 1.0 : 0.0;
    std::size_t slot = it - nodes_.begin();
    if (i == j) return inv_denom_[slot];
    for (std::size_t k = offsets_[slot]; k < offsets_[slot + 1]; ++k)
        if (nbr_[k] == j) return w_[k] * inv_denom_[slot];
    return 0.0;
}

Eigen::MatrixXd SnapshotTransition::to_dense() const {
    Eigen::MatrixXd L = Eigen::MatrixXd::Identity(n_, n_);
    for (std::size_t s = 0; s < nodes_.size(); ++s) {
        NodeId i = nodes_[s];
        L(i, i) = inv_denom_[s];
        for (std::size_t k = offsets_[s]; k < offsets_[s + 1]; ++k) L(i, nbr_[k]) = w_[k] * inv_denom_[s];
    }
    return L;
}

TransitionOperator TransitionOperator::build(const TemporalGraph& g, OperatorMode mode,
                                             std::size_t max_dense_nodes) {
    TransitionOperator op;
    op.n_ = g.num_nodes();
    op.T_ = g.num_snapshots();
    op.factors_.reserve(op.T_);
    for (const auto& s : g.snapshots()) op.factors_.emplace_back(s);

    if (mode == OperatorMode::Auto) {
        double n2 = static_cast<double>(op.n_) * static_cast<double>(op.n_);
        bool dense_fits = static_cast<std::size_t>(op.n_) <= max_dense_nodes;
        mode = (dense_fits && n2 <= static_cast<double>(g.temporal_edge_count())) ? OperatorMode::Materialized
                                                                                  : OperatorMode::Lazy;
    }
    if (mode == OperatorMode::Materialized) {
        op.dense_ = op.materialize(max_dense_nodes);
        op.factors_.clear();
        op.factors_.shrink_to_fit();
    }
    op.mode_ = mode;
    return op;
}

namespace {

// Suffix accumulation S = sum_tau L_tau ... L_T * M over a block of columns.
//
// Row r of Y_tau = L_tau Y_{tau+1} only changes when r is active at tau, so the
// running sum is updated lazily: last[r] holds the step (1-based) at which the
// current value of row r was produced (T for the untouched input), and the value
// contributes (last[r] - s) copies once it is replaced at step s.
RowMatrix suffix_sum(std::span<const SnapshotTransition> factors, RowMatrix y) {
    const Eigen::Index n = y.rows();
    const Eigen::Index d = y.cols();
    const long T = static_cast<long>(factors.size());
    RowMatrix sum = RowMatrix::Zero(n, d);
    std::vector<long> last(static_cast<std::size_t>(n), T);
    RowMatrix fresh;
    for (long s = T; s >= 1; --s) {
        const auto& L = factors[static_cast<std::size_t>(s - 1)];
        auto nodes = L.active_nodes();
        if (nodes.empty()) continue;
        fresh.resize(static_cast<Eigen::Index>(nodes.size()), d);
        for (std::size_t a = 0; a < nodes.size(); ++a) {
            NodeId r = nodes[a];
            auto out = fresh.row(static_cast<Eigen::Index>(a));
            out = y.row(r);
            for (std::size_t k = L.row_begin(a); k < L.row_end(a); ++k) out += L.weight(k) * y.row(L.neighbor(k));
            out *= L.inv_denominator(a);
        }
        for (std::size_t a = 0; a < nodes.size(); ++a) {
            NodeId r = nodes[a];
            sum.row(r) += static_cast<double>(last[r] - s) * y.row(r);
            y.row(r) = fresh.row(static_cast<Eigen::Index>(a));
            last[r] = s;
        }
    }
    for (Eigen::Index r = 0; r < n; ++r) sum.row(r) += static_cast<double>(last[r]) * y.row(r);
    return sum;
}

// Prefix accumulation Z_s = L_s^T (M + Z_{s-1}), Z_0 = 0; returns Z_T = sum_tau (L_tau...L_T)^T M.
// Inactive rows just gain one copy of M per step, tracked through last[r].
RowMatrix prefix_sum_transposed(std::span<const SnapshotTransition> factors, const RowMatrix& m) {
    const Eigen::Index n = m.rows();
    const Eigen::Index d = m.cols();
    const long T = static_cast<long>(factors.size());
    RowMatrix z = RowMatrix::Zero(n, d);
    std::vector<long> last(static_cast<std::size_t>(n), 0);
    RowMatrix v;
    for (long s = 1; s <= T; ++s) {
        const auto& L = factors[static_cast<std::size_t>(s - 1)];
        auto nodes = L.active_nodes();
        if (nodes.empty()) continue;
        v.resize(static_cast<Eigen::Index>(nodes.size()), d);
        for (std::size_t a = 0; a < nodes.size(); ++a) {
            NodeId r = nodes[a];
            v.row(static_cast<Eigen::Index>(a)) =
                (z.row(r) + static_cast<double>(s - last[r]) * m.row(r)) * L.inv_denominator(a);
        }
        for (std::size_t a = 0; a < nodes.size(); ++a) {
            NodeId r = nodes[a];
            auto out = z.row(r);
            out = v.row(static_cast<Eigen::Index>(a));
            for (std::size_t k = L.row_begin(a); k < L.row_end(a); ++k)
                out += L.weight(k) * v.row(static_cast<Eigen::Index>(L.neighbor_slot(k)));
            last[r] = s;
        }
    }
    for (Eigen::Index r = 0; r < n; ++r) z.row(r) += static_cast<double>(T - last[r]) * m.row(r);
    return z;
}

template <class Kernel>
Eigen::MatrixXd run_by_columns(const Eigen::MatrixXd& m, unsigned threads, Kernel&& kernel) {
    const Eigen::Index d = m.cols();
    Eigen::MatrixXd out(m.rows(), d);
    std::size_t blocks = std::min<std::size_t>(resolve_threads(threads), static_cast<std::size_t>(std::max<Eigen::Index>(d, 1)));
    parallel_for(blocks, static_cast<unsigned>(blocks), [&](std::size_t b) {
        Eigen::Index c0 = d * static_cast<Eigen::Index>(b) / static_cast<Eigen::Index>(blocks);
        Eigen::Index c1 = d * static_cast<Eigen::Index>(b + 1) / static_cast<Eigen::Index>(blocks);
        if (c1 <= c0) return;
        RowMatrix block = m.middleCols(c0, c1 - c0);
        out.middleCols(c0, c1 - c0) = kernel(std::move(block));
    });
    return out;
}

}  // namespace

Eigen::MatrixXd TransitionOperator::apply(const Eigen::MatrixXd& m, unsigned threads) const {
    if (m.rows() != n_)
        throw UsageError("apply: matrix has " + std::to_string(m.rows()) + " rows, operator has n=" +
                         std::to_string(n_));
    if (mode_ == OperatorMode::Materialized) return dense_ * m;
    const double inv_T = 1.0 / static_cast<double>(T_);
    return run_by_columns(m, threads, [&](RowMatrix block) -> RowMatrix {
        return suffix_sum(factors_, std::move(block)) * inv_T;
    });
}

Eigen::MatrixXd TransitionOperator::apply_transpose(const Eigen::MatrixXd& m, unsigned threads) const {
    if (m.rows() != n_)
        throw UsageError("apply_transpose: matrix has " + std::to_string(m.rows()) + " rows, operator has n=" +
                         std::to_string(n_));
    if (mode_ == OperatorMode::Materialized) return dense_.transpose() * m;
    const double inv_T = 1.0 / static_cast<double>(T_);
    return run_by_columns(m, threads, [&](RowMatrix block) -> RowMatrix {
        return prefix_sum_transposed(factors_, block) * inv_T;
    });
}

Eigen::MatrixXd TransitionOperator::materialize(std::size_t max_nodes) const {
    if (mode_ == OperatorMode::Materialized && dense_.size() > 0) return dense_;
    if (static_cast<std::size_t>(n_) > max_nodes)
        throw UsageError("materializing P needs an " + std::to_string(n_) + "x" + std::to_string(n_) +
                         " dense matrix, above the cap of " + std::to_string(max_nodes) +
                         " nodes; use lazy mode");
    RowMatrix id = RowMatrix::Identity(n_, n_);
    return suffix_sum(factors_, std::move(id)) * (1.0 / static_cast<double>(T_));
}

}  // namespace tgdist
