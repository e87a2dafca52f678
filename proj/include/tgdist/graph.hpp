#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace tgdist {

using NodeId = std::int32_t;

struct WeightedEdge {
    NodeId i = 0;
    NodeId j = 0;
    double w = 0.0;

    friend bool operator==(const WeightedEdge&, const WeightedEdge&) = default;
};

/// One snapshot W_t: symmetric, zero diagonal, strictly positive stored weights.
///
/// Storage is CSR restricted to active nodes (nodes with at least one edge), so
/// a snapshot costs O(active + edges) regardless of n. Both directions of every
/// undirected edge are stored; neighbor lists are sorted.
class Snapshot {
public:
    Snapshot() = default;
    explicit Snapshot(NodeId n) : n_(n) {}

    /// Accumulates duplicate (i,j)/(j,i) entries. Rejects self-loops, negative
    /// or non-finite weights and out-of-range ids; zero weights are dropped.
    static Snapshot from_edges(NodeId n, std::span<const WeightedEdge> edges);

    NodeId size() const { return n_; }
    bool empty() const { return nodes_.empty(); }

    std::span<const NodeId> active_nodes() const { return nodes_; }
    std::span<const NodeId> neighbors_at(std::size_t slot) const {
        return {adj_.data() + offsets_[slot], offsets_[slot + 1] - offsets_[slot]};
    }
    std::span<const double> weights_at(std::size_t slot) const {
        return {w_.data() + offsets_[slot], offsets_[slot + 1] - offsets_[slot]};
    }

    /// Slot of node i in active_nodes(), or -1 when i is inactive.
    std::ptrdiff_t slot_of(NodeId i) const;
    double weight(NodeId i, NodeId j) const;
    double degree(NodeId i) const;

    std::size_t edge_count() const { return adj_.size() / 2; }
    double total_weight() const;

    /// Undirected edges with i < j, sorted lexicographically.
    std::vector<WeightedEdge> edges() const;

    friend bool operator==(const Snapshot&, const Snapshot&) = default;

private:
    NodeId n_ = 0;
    std::vector<NodeId> nodes_;
    std::vector<std::size_t> offsets_{0};
    std::vector<NodeId> adj_;
    std::vector<double> w_;
};

/// A temporal graph as T snapshots over a fixed node set 0..n-1.
/// Immutable after construction.
class TemporalGraph {
public:
    TemporalGraph(NodeId n, std::vector<Snapshot> snapshots, double t_res = 1.0,
                  std::vector<std::string> node_names = {});

    NodeId num_nodes() const { return n_; }
    std::size_t num_snapshots() const { return snapshots_.size(); }
    double t_res() const { return t_res_; }

    const Snapshot& snapshot(std::size_t t) const { return snapshots_.at(t); }
    std::span<const Snapshot> snapshots() const { return snapshots_; }
    const std::vector<std::string>& node_names() const { return node_names_; }

    /// E = sum_t |E_t| (distinct pairs per snapshot).
    std::size_t temporal_edge_count() const;
    double total_weight() const;

    /// Structural equality: n, T and every snapshot. Names and t_res are metadata.
    bool same_structure(const TemporalGraph& other) const;

private:
    NodeId n_;
    std::vector<Snapshot> snapshots_;
    double t_res_;
    std::vector<std::string> node_names_;
};

/// A contact lasting `tau` consecutive snapshots starting at snapshot `t`
/// (0-based): active on t, t+1, ..., t+tau-1.
struct ContactEvent {
    NodeId i = 0;
    NodeId j = 0;
    std::int32_t t = 0;
    std::int32_t tau = 1;

    friend auto operator<=>(const ContactEvent&, const ContactEvent&) = default;
};

/// Unit-weight temporal edge instance (i, j, t); a weight-w entry expands to w instances.
struct TemporalEdge {
    NodeId i = 0;
    NodeId j = 0;
    std::int32_t t = 0;

    friend auto operator<=>(const TemporalEdge&, const TemporalEdge&) = default;
};

struct LoadStats {
    std::size_t records = 0;
    std::size_t skipped_self_loops = 0;
    std::int64_t first_timestamp = 0;
};

/// Reads "timestamp i j [extra...]" lines; '#' starts a comment line.
/// Records are binned into windows of width t_res starting at the first
/// timestamp; the weight of (i,j) in a window is its record count. Node ids are
/// remapped to 0..n-1 in order of first appearance.
TemporalGraph load_contact_list(const std::filesystem::path& path, std::int64_t t_res,
                                LoadStats* stats = nullptr);

/// Sums consecutive groups of `factor` snapshots; the last group may be shorter.
TemporalGraph aggregate(const TemporalGraph& g, std::size_t factor);

/// Removes snapshots without any edge (keeps one empty snapshot if all are empty).
TemporalGraph drop_empty_snapshots(const TemporalGraph& g);

/// Maximal runs of consecutive active snapshots per pair, weights ignored.
/// Sorted by (i, j, t).
std::vector<ContactEvent> to_contacts(const TemporalGraph& g);

/// Unit-weight graph whose active (pair, snapshot) set is the union of the events.
TemporalGraph from_contacts(NodeId n, std::size_t num_snapshots,
                            std::span<const ContactEvent> events, double t_res = 1.0);

/// Keeps edges inside `nodes` during snapshots [t_from, t_to] (0-based, inclusive).
/// Node k of the result is nodes[k].
TemporalGraph subgraph(const TemporalGraph& g, std::span<const NodeId> nodes,
                       std::size_t t_from, std::size_t t_to);

/// Node i of g becomes node perm[i] of the result.
TemporalGraph relabel(const TemporalGraph& g, std::span<const NodeId> perm);

/// Expands every weight into that many unit instances; weights must be integral.
std::vector<TemporalEdge> to_instances(const TemporalGraph& g);

/// Accumulates instances (duplicates add up) into a graph.
TemporalGraph from_instances(NodeId n, std::size_t num_snapshots,
                             std::span<const TemporalEdge> instances, double t_res = 1.0,
                             std::vector<std::string> node_names = {});

/// Static weighted adjacency summed over time, as undirected edges i < j.
std::vector<WeightedEdge> aggregated_edges(const TemporalGraph& g);

// Plain-text graph bundle: "<prefix>.json" (n, T, t_res, node names) and
// "<prefix>.edges" with one "t i j w" line per undirected edge (t 0-based, i < j).
void write_graph(const TemporalGraph& g, const std::filesystem::path& prefix);
TemporalGraph read_graph(const std::filesystem::path& prefix);

}  // namespace tgdist
