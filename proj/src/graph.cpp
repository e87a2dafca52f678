#include "tgdist/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "tgdist/error.hpp"

namespace tgdist {

Snapshot Snapshot::from_edges(NodeId n, std::span<const WeightedEdge> edges) {
    if (n < 0) throw UsageError("snapshot size must be nonnegative");
    std::vector<WeightedEdge> directed;
    directed.reserve(2 * edges.size());
    for (const auto& e : edges) {
        if (e.i < 0 || e.j < 0 || e.i >= n || e.j >= n)
            throw UsageError("edge (" + std::to_string(e.i) + "," + std::to_string(e.j) +
                             ") out of range for n=" + std::to_string(n));
        if (e.i == e.j) throw DataError("self-loop on node " + std::to_string(e.i));
        if (!std::isfinite(e.w) || e.w < 0.0)
            throw DataError("negative or non-finite weight on edge (" + std::to_string(e.i) + "," +
                            std::to_string(e.j) + ")");
        if (e.w == 0.0) continue;
        directed.push_back({e.i, e.j, e.w});
        directed.push_back({e.j, e.i, e.w});
    }
    std::sort(directed.begin(), directed.end(), [](const auto& a, const auto& b) {
        return a.i != b.i ? a.i < b.i : a.j < b.j;
    });

    Snapshot s(n);
    for (std::size_t k = 0; k < directed.size();) {
        NodeId i = directed[k].i;
        s.nodes_.push_back(i);
        while (k < directed.size() && directed[k].i == i) {
            NodeId j = directed[k].j;
            double w = 0.0;
            while (k < directed.size() && directed[k].i == i && directed[k].j == j) w += directed[k++].w;
            s.adj_.push_back(j);
            s.w_.push_back(w);
        }
        s.offsets_.push_back(s.adj_.size());
    }
    return s;
}

std::ptrdiff_t Snapshot::slot_of(NodeId i) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), i);
    if (it == nodes_.end() || *it != i) return -1;
    return it - nodes_.begin();
}

double Snapshot::weight(NodeId i, NodeId j) const {
    auto slot = slot_of(i);
    if (slot < 0) return 0.0;
    auto nb = neighbors_at(slot);
    auto it = std::lower_bound(nb.begin(), nb.end(), j);
    if (it == nb.end() || *it != j) return 0.0;
    return weights_at(slot)[it - nb.begin()];
}

double Snapshot::degree(NodeId i) const {
    auto slot = slot_of(i);
    if (slot < 0) return 0.0;
    double d = 0.0;
    for (double w : weights_at(slot)) d += w;
    return d;
}

double Snapshot::total_weight() const {
    double total = 0.0;
    for (std::size_t s = 0; s < nodes_.size(); ++s) {
        auto nb = neighbors_at(s);
        auto ws = weights_at(s);
        for (std::size_t k = 0; k < nb.size(); ++k)
            if (nodes_[s] < nb[k]) total += ws[k];
    }
    return total;
}

std::vector<WeightedEdge> Snapshot::edges() const {
    std::vector<WeightedEdge> out;
    out.reserve(edge_count());
    for (std::size_t s = 0; s < nodes_.size(); ++s) {
        auto nb = neighbors_at(s);
        auto ws = weights_at(s);
        for (std::size_t k = 0; k < nb.size(); ++k)
            if (nodes_[s] < nb[k]) out.push_back({nodes_[s], nb[k], ws[k]});
    }
    return out;
}

TemporalGraph::TemporalGraph(NodeId n, std::vector<Snapshot> snapshots, double t_res,
                             std::vector<std::string> node_names)
    : n_(n), snapshots_(std::move(snapshots)), t_res_(t_res), node_names_(std::move(node_names)) {
    if (n_ < 1) throw UsageError("a temporal graph needs at least one node");
    if (snapshots_.empty()) throw UsageError("a temporal graph needs at least one snapshot");
    if (!(t_res_ > 0.0)) throw UsageError("t_res must be positive");
    for (const auto& s : snapshots_)
        if (s.size() != n_) throw UsageError("snapshot dimension does not match n");
    if (!node_names_.empty() && node_names_.size() != static_cast<std::size_t>(n_))
        throw UsageError("node_names must be empty or have n entries");
}

std::size_t TemporalGraph::temporal_edge_count() const {
    std::size_t e = 0;
    for (const auto& s : snapshots_) e += s.edge_count();
    return e;
}

double TemporalGraph::total_weight() const {
    double w = 0.0;
    for (const auto& s : snapshots_) w += s.total_weight();
    return w;
}

bool TemporalGraph::same_structure(const TemporalGraph& other) const {
    return n_ == other.n_ && snapshots_ == other.snapshots_;
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t k = 0;
    while (k < line.size()) {
        while (k < line.size() && (line[k] == ' ' || line[k] == '\t' || line[k] == '\r' || line[k] == ','))
            ++k;
        std::size_t start = k;
        while (k < line.size() && !(line[k] == ' ' || line[k] == '\t' || line[k] == '\r' || line[k] == ','))
            ++k;
        if (k > start) out.push_back(line.substr(start, k - start));
    }
    return out;
}

}  // namespace

TemporalGraph load_contact_list(const std::filesystem::path& path, std::int64_t t_res, LoadStats* stats) {
    if (t_res <= 0) throw UsageError("t_res must be positive");
    std::ifstream in(path);
    if (!in) throw DataError("cannot open contact list " + path.string());

    struct Record {
        std::int64_t ts;
        NodeId i, j;
    };
    std::vector<Record> records;
    std::unordered_map<std::string, NodeId> ids;
    std::vector<std::string> names;
    auto intern = [&](std::string_view token) {
        auto [it, inserted] = ids.try_emplace(std::string(token), static_cast<NodeId>(names.size()));
        if (inserted) names.emplace_back(token);
        return it->second;
    };

    LoadStats local;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto tokens = split_ws(line);
        if (tokens.empty() || tokens[0].front() == '#') continue;
        if (tokens.size() < 3) throw ParseError(lineno, "expected \"timestamp i j\"");
        std::int64_t ts = 0;
        auto [ptr, ec] = std::from_chars(tokens[0].data(), tokens[0].data() + tokens[0].size(), ts);
        if (ec != std::errc() || ptr != tokens[0].data() + tokens[0].size())
            throw ParseError(lineno, "bad timestamp '" + std::string(tokens[0]) + "'");
        ++local.records;
        if (tokens[1] == tokens[2]) {
            ++local.skipped_self_loops;
            continue;
        }
        NodeId i = intern(tokens[1]);
        NodeId j = intern(tokens[2]);
        records.push_back({ts, i, j});
    }
    if (records.empty()) throw DataError("contact list " + path.string() + " has no usable records");

    auto [lo, hi] = std::minmax_element(records.begin(), records.end(),
                                        [](const Record& a, const Record& b) { return a.ts < b.ts; });
    std::int64_t t0 = lo->ts;
    std::size_t T = static_cast<std::size_t>((hi->ts - t0) / t_res) + 1;
    local.first_timestamp = t0;

    std::vector<std::vector<WeightedEdge>> per_window(T);
    for (const auto& r : records)
        per_window[static_cast<std::size_t>((r.ts - t0) / t_res)].push_back({r.i, r.j, 1.0});

    NodeId n = static_cast<NodeId>(names.size());
    std::vector<Snapshot> snaps;
    snaps.reserve(T);
    for (auto& edges : per_window) snaps.push_back(Snapshot::from_edges(n, edges));
    if (stats) *stats = local;
    return TemporalGraph(n, std::move(snaps), static_cast<double>(t_res), std::move(names));
}

TemporalGraph aggregate(const TemporalGraph& g, std::size_t factor) {
    if (factor < 1) throw UsageError("aggregation factor must be >= 1");
    std::size_t T = g.num_snapshots();
    std::size_t newT = (T + factor - 1) / factor;
    std::vector<Snapshot> snaps;
    snaps.reserve(newT);
    for (std::size_t b = 0; b < newT; ++b) {
        std::vector<WeightedEdge> edges;
        for (std::size_t t = b * factor; t < std::min(T, (b + 1) * factor); ++t) {
            auto e = g.snapshot(t).edges();
            edges.insert(edges.end(), e.begin(), e.end());
        }
        snaps.push_back(Snapshot::from_edges(g.num_nodes(), edges));
    }
    return TemporalGraph(g.num_nodes(), std::move(snaps), g.t_res() * static_cast<double>(factor),
                         g.node_names());
}

TemporalGraph drop_empty_snapshots(const TemporalGraph& g) {
    std::vector<Snapshot> snaps;
    for (const auto& s : g.snapshots())
        if (!s.empty()) snaps.push_back(s);
    if (snaps.empty()) snaps.emplace_back(g.num_nodes());
    return TemporalGraph(g.num_nodes(), std::move(snaps), g.t_res(), g.node_names());
}

std::vector<ContactEvent> to_contacts(const TemporalGraph& g) {
    std::map<std::pair<NodeId, NodeId>, std::vector<std::int32_t>> active;
    for (std::size_t t = 0; t < g.num_snapshots(); ++t)
        for (const auto& e : g.snapshot(t).edges()) active[{e.i, e.j}].push_back(static_cast<std::int32_t>(t));

    std::vector<ContactEvent> events;
    for (const auto& [pair, times] : active) {
        std::size_t k = 0;
        while (k < times.size()) {
            std::size_t run = k + 1;
            while (run < times.size() && times[run] == times[run - 1] + 1) ++run;
            events.push_back({pair.first, pair.second, times[k], static_cast<std::int32_t>(run - k)});
            k = run;
        }
    }
    return events;
}

TemporalGraph from_contacts(NodeId n, std::size_t num_snapshots, std::span<const ContactEvent> events,
                            double t_res) {
    std::vector<std::vector<WeightedEdge>> per(num_snapshots);
    std::vector<std::map<std::pair<NodeId, NodeId>, bool>> seen(num_snapshots);
    for (const auto& ev : events) {
        if (ev.tau < 1 || ev.t < 0 || static_cast<std::size_t>(ev.t + ev.tau) > num_snapshots)
            throw UsageError("contact event outside the snapshot range");
        auto key = std::minmax(ev.i, ev.j);
        for (std::int32_t t = ev.t; t < ev.t + ev.tau; ++t)
            if (seen[t].emplace(key, true).second) per[t].push_back({key.first, key.second, 1.0});
    }
    std::vector<Snapshot> snaps;
    snaps.reserve(num_snapshots);
    for (auto& e : per) snaps.push_back(Snapshot::from_edges(n, e));
    return TemporalGraph(n, std::move(snaps), t_res);
}

TemporalGraph subgraph(const TemporalGraph& g, std::span<const NodeId> nodes, std::size_t t_from,
                       std::size_t t_to) {
    if (nodes.empty()) throw UsageError("subgraph node subset is empty");
    if (t_from > t_to || t_to >= g.num_snapshots()) throw UsageError("subgraph time range is invalid");
    std::vector<NodeId> local(static_cast<std::size_t>(g.num_nodes()), -1);
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        NodeId v = nodes[k];
        if (v < 0 || v >= g.num_nodes()) throw UsageError("subgraph node id out of range");
        if (local[v] != -1) throw UsageError("subgraph node subset has duplicates");
        local[v] = static_cast<NodeId>(k);
    }
    NodeId m = static_cast<NodeId>(nodes.size());
    std::vector<Snapshot> snaps;
    for (std::size_t t = t_from; t <= t_to; ++t) {
        std::vector<WeightedEdge> kept;
        for (const auto& e : g.snapshot(t).edges())
            if (local[e.i] >= 0 && local[e.j] >= 0) kept.push_back({local[e.i], local[e.j], e.w});
        snaps.push_back(Snapshot::from_edges(m, kept));
    }
    std::vector<std::string> names;
    if (!g.node_names().empty())
        for (NodeId v : nodes) names.push_back(g.node_names()[v]);
    return TemporalGraph(m, std::move(snaps), g.t_res(), std::move(names));
}

TemporalGraph relabel(const TemporalGraph& g, std::span<const NodeId> perm) {
    NodeId n = g.num_nodes();
    if (perm.size() != static_cast<std::size_t>(n)) throw UsageError("permutation length must equal n");
    std::vector<bool> hit(n, false);
    for (NodeId p : perm) {
        if (p < 0 || p >= n || hit[p]) throw UsageError("relabel map is not a permutation");
        hit[p] = true;
    }
    std::vector<Snapshot> snaps;
    snaps.reserve(g.num_snapshots());
    for (const auto& s : g.snapshots()) {
        auto edges = s.edges();
        for (auto& e : edges) e = {perm[e.i], perm[e.j], e.w};
        snaps.push_back(Snapshot::from_edges(n, edges));
    }
    std::vector<std::string> names;
    if (!g.node_names().empty()) {
        names.resize(n);
        for (NodeId v = 0; v < n; ++v) names[perm[v]] = g.node_names()[v];
    }
    return TemporalGraph(n, std::move(snaps), g.t_res(), std::move(names));
}

std::vector<TemporalEdge> to_instances(const TemporalGraph& g) {
    std::vector<TemporalEdge> out;
    for (std::size_t t = 0; t < g.num_snapshots(); ++t) {
        for (const auto& e : g.snapshot(t).edges()) {
            double r = std::round(e.w);
            if (std::abs(r - e.w) > 1e-9 || r < 1.0)
                throw DataError("weights must be positive integers to expand into instances");
            for (long c = 0; c < static_cast<long>(r); ++c)
                out.push_back({e.i, e.j, static_cast<std::int32_t>(t)});
        }
    }
    return out;
}

TemporalGraph from_instances(NodeId n, std::size_t num_snapshots, std::span<const TemporalEdge> instances,
                             double t_res, std::vector<std::string> node_names) {
    std::vector<std::vector<WeightedEdge>> per(num_snapshots);
    for (const auto& e : instances) {
        if (e.t < 0 || static_cast<std::size_t>(e.t) >= num_snapshots)
            throw UsageError("instance time outside the snapshot range");
        per[e.t].push_back({e.i, e.j, 1.0});
    }
    std::vector<Snapshot> snaps;
    snaps.reserve(num_snapshots);
    for (auto& e : per) snaps.push_back(Snapshot::from_edges(n, e));
    return TemporalGraph(n, std::move(snaps), t_res, std::move(node_names));
}

std::vector<WeightedEdge> aggregated_edges(const TemporalGraph& g) {
    std::vector<WeightedEdge> all;
    for (const auto& s : g.snapshots()) {
        auto e = s.edges();
        all.insert(all.end(), e.begin(), e.end());
    }
    return Snapshot::from_edges(g.num_nodes(), all).edges();
}

}  // namespace tgdist
