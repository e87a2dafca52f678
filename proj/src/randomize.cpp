#include "tgdist/randomize.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <unordered_set>
#include <utility>

#include "tgdist/error.hpp"
#include "tgdist/rng.hpp"

namespace tgdist {

std::string_view to_string(RandomizationKind kind) {
    switch (kind) {
        case RandomizationKind::Random: return "random";
        case RandomizationKind::RandomDelta: return "random_delta";
        case RandomizationKind::ActiveSnapshot: return "active_snapshot";
        case RandomizationKind::Time: return "time";
        case RandomizationKind::Sequence: return "sequence";
        case RandomizationKind::WeightedDegree: return "weighted_degree";
    }
    return "?";
}

RandomizationKind parse_randomization_kind(std::string_view name) {
    std::string key(name);
    std::replace(key.begin(), key.end(), '-', '_');
    std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
    for (auto kind : kAllRandomizations)
        if (key == to_string(kind)) return kind;
    throw UsageError("unknown randomization '" + std::string(name) +
                     "' (expected random, random_delta, active_snapshot, time, sequence, weighted_degree)");
}

std::vector<ContactEvent> weighted_contacts(const TemporalGraph& g) {
    std::map<std::pair<NodeId, NodeId>, std::vector<std::pair<std::int32_t, long>>> series;
    for (std::size_t t = 0; t < g.num_snapshots(); ++t) {
        for (const auto& e : g.snapshot(t).edges()) {
            double r = std::round(e.w);
            if (std::abs(r - e.w) > 1e-9 || r < 1.0) throw DataError("weights must be positive integers");
            series[{e.i, e.j}].push_back({static_cast<std::int32_t>(t), static_cast<long>(r)});
        }
    }
    std::vector<ContactEvent> events;
    for (const auto& [pair, s] : series) {
        long top = 0;
        for (const auto& p : s) top = std::max(top, p.second);
        for (long level = 1; level <= top; ++level) {
            std::size_t k = 0;
            while (k < s.size()) {
                if (s[k].second < level) {
                    ++k;
                    continue;
                }
                std::size_t end = k + 1;
                while (end < s.size() && s[end].first == s[end - 1].first + 1 && s[end].second >= level) ++end;
                events.push_back({pair.first, pair.second, s[k].first, static_cast<std::int32_t>(end - k)});
                k = end;
            }
        }
    }
    std::sort(events.begin(), events.end());
    return events;
}

namespace {

std::pair<NodeId, NodeId> random_pair(Rng& rng, NodeId n) {
    NodeId i = uniform_int<NodeId>(rng, 0, n - 1);
    NodeId j = uniform_int<NodeId>(rng, 0, n - 2);
    if (j >= i) ++j;
    return {i, j};
}

std::int32_t random_time(Rng& rng, std::size_t T) {
    return uniform_int<std::int32_t>(rng, 0, static_cast<std::int32_t>(T) - 1);
}

TemporalGraph rebuild(const TemporalGraph& g, std::span<const TemporalEdge> instances) {
    return from_instances(g.num_nodes(), g.num_snapshots(), instances, g.t_res(), g.node_names());
}

RandomizeOutcome shuffle_random(const TemporalGraph& g, Rng& rng) {
    auto inst = to_instances(g);
    for (auto& e : inst) {
        auto [i, j] = random_pair(rng, g.num_nodes());
        e = {i, j, random_time(rng, g.num_snapshots())};
    }
    return {rebuild(g, inst), {}, 0, {}};
}

RandomizeOutcome shuffle_random_delta(const TemporalGraph& g, Rng& rng) {
    auto events = weighted_contacts(g);
    const auto T = static_cast<std::int32_t>(g.num_snapshots());
    std::vector<TemporalEdge> inst;
    for (auto& ev : events) {
        auto [i, j] = random_pair(rng, g.num_nodes());
        std::int32_t t = uniform_int<std::int32_t>(rng, 0, T - ev.tau);
        ev = {i, j, t, ev.tau};
        auto [a, b] = std::minmax(i, j);
        for (std::int32_t s = t; s < t + ev.tau; ++s) inst.push_back({a, b, s});
    }
    return {rebuild(g, inst), std::move(events), 0, {}};
}

// Uniform choice of m distinct pairs among the active nodes, conditioned on
// covering every active node, by rejection with a budget of 10 m draws; if the
// budget runs out, a random cover (random pairing of the shuffled nodes) is
// completed with uniformly drawn extra pairs.
std::vector<std::pair<NodeId, NodeId>> covering_edge_set(std::span<const NodeId> active, std::size_t m, Rng& rng,
                                                         bool& used_fallback) {
    const std::size_t a = active.size();
    const std::size_t pairs_total = a * (a - 1) / 2;
    auto draw_distinct = [&](std::set<std::pair<std::size_t, std::size_t>>& chosen, std::size_t target) {
        while (chosen.size() < target) {
            std::size_t u = uniform_int<std::size_t>(rng, 0, a - 1);
            std::size_t v = uniform_int<std::size_t>(rng, 0, a - 2);
            if (v >= u) ++v;
            chosen.insert(std::minmax(u, v));
        }
    };
    auto to_nodes = [&](const std::set<std::pair<std::size_t, std::size_t>>& chosen) {
        std::vector<std::pair<NodeId, NodeId>> out;
        for (auto [u, v] : chosen) out.emplace_back(std::minmax(active[u], active[v]));
        return out;
    };

    used_fallback = false;
    if (m > pairs_total) m = pairs_total;
    std::vector<char> hit(a);
    // pair flags: dense table for ordinary snapshots, hashed for very large ones
    const bool dense = a <= 4096;
    std::vector<char> taken(dense ? a * a : 0);
    std::unordered_set<std::size_t> taken_sparse;
    std::vector<std::pair<std::size_t, std::size_t>> drawn;
    drawn.reserve(m);
    for (std::size_t attempt = 0; attempt < 10 * m; ++attempt) {
        // same draws as draw_distinct, but stop once the remaining edges cannot cover the rest
        for (auto [u, v] : drawn)
            if (dense) taken[u * a + v] = 0;
        taken_sparse.clear();
        drawn.clear();
        std::fill(hit.begin(), hit.end(), 0);
        std::size_t uncovered = a;
        while (drawn.size() < m && uncovered <= 2 * (m - drawn.size())) {
            std::size_t u = uniform_int<std::size_t>(rng, 0, a - 1);
            std::size_t v = uniform_int<std::size_t>(rng, 0, a - 2);
            if (v >= u) ++v;
            if (u > v) std::swap(u, v);
            if (dense ? std::exchange(taken[u * a + v], 1) != 0 : !taken_sparse.insert(u * a + v).second) continue;
            drawn.emplace_back(u, v);
            uncovered -= static_cast<std::size_t>(!hit[u]) + static_cast<std::size_t>(!hit[v]);
            hit[u] = hit[v] = 1;
        }
        if (drawn.size() == m && uncovered == 0)
            return to_nodes(std::set<std::pair<std::size_t, std::size_t>>(drawn.begin(), drawn.end()));
    }

    used_fallback = true;
    std::vector<std::size_t> order(a);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::set<std::pair<std::size_t, std::size_t>> chosen;
    for (std::size_t k = 0; k + 1 < a; k += 2) chosen.insert(std::minmax(order[k], order[k + 1]));
    if (a % 2 == 1) {
        std::size_t partner = uniform_int<std::size_t>(rng, 0, a - 2);
        chosen.insert(std::minmax(order[a - 1], order[partner]));
    }
    draw_distinct(chosen, std::max(m, chosen.size()));
    return to_nodes(chosen);
}

RandomizeOutcome shuffle_active_snapshot(const TemporalGraph& g, Rng& rng) {
    RandomizeOutcome out{g, {}, 0, {}};
    std::vector<Snapshot> snaps;
    snaps.reserve(g.num_snapshots());
    for (std::size_t t = 0; t < g.num_snapshots(); ++t) {
        const auto& s = g.snapshot(t);
        if (s.empty()) {
            snaps.push_back(s);
            continue;
        }
        auto active = s.active_nodes();
        const std::size_t m = s.edge_count();
        if (active.size() < 2 || m < (active.size() + 1) / 2) {
            out.warnings.push_back("snapshot " + std::to_string(t) + " left unchanged: cannot cover its active nodes");
            snaps.push_back(s);
            continue;
        }
        std::vector<double> weights;
        for (const auto& e : s.edges()) weights.push_back(e.w);
        std::shuffle(weights.begin(), weights.end(), rng);
        bool fallback = false;
        auto pairs = covering_edge_set(active, m, rng, fallback);
        if (fallback) {
            ++out.fallback_snapshots;
            out.warnings.push_back("snapshot " + std::to_string(t) +
                                   ": rejection budget exhausted, used random cover construction");
        }
        std::vector<WeightedEdge> edges;
        for (std::size_t k = 0; k < pairs.size(); ++k) edges.push_back({pairs[k].first, pairs[k].second, weights[k]});
        snaps.push_back(Snapshot::from_edges(g.num_nodes(), edges));
    }
    out.graph = TemporalGraph(g.num_nodes(), std::move(snaps), g.t_res(), g.node_names());
    return out;
}

RandomizeOutcome shuffle_time(const TemporalGraph& g, Rng& rng) {
    auto inst = to_instances(g);
    for (auto& e : inst) e.t = random_time(rng, g.num_snapshots());
    return {rebuild(g, inst), {}, 0, {}};
}

RandomizeOutcome shuffle_sequence(const TemporalGraph& g, Rng& rng) {
    std::vector<std::size_t> order(g.num_snapshots());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<Snapshot> snaps;
    snaps.reserve(order.size());
    for (auto t : order) snaps.push_back(g.snapshot(t));
    return {TemporalGraph(g.num_nodes(), std::move(snaps), g.t_res(), g.node_names()), {}, 0, {}};
}

RandomizeOutcome shuffle_weighted_degree(const TemporalGraph& g, Rng& rng, std::uint64_t seed) {
    auto inst = to_instances(g);
    std::vector<NodeId> stubs;
    stubs.reserve(2 * inst.size());
    for (const auto& e : inst) {
        stubs.push_back(e.i);
        stubs.push_back(e.j);
    }
    const std::size_t pairs = inst.size();
    constexpr int kReshuffles = 20;
    for (int round = 0; round < kReshuffles && pairs > 0; ++round) {
        std::shuffle(stubs.begin(), stubs.end(), rng);
        std::vector<std::size_t> bad;
        for (std::size_t p = 0; p < pairs; ++p)
            if (stubs[2 * p] == stubs[2 * p + 1]) bad.push_back(p);
        // repair self-pairs by swapping one stub with a random other pair
        std::size_t budget = 100 * pairs + 1000;
        while (!bad.empty() && budget-- > 0) {
            std::size_t p = bad.back();
            std::size_t q = uniform_int<std::size_t>(rng, 0, pairs - 1);
            if (q == p) continue;
            std::size_t side = uniform_int<std::size_t>(rng, 0, 1);
            std::size_t a = 2 * p + 1, b = 2 * q + side;
            std::swap(stubs[a], stubs[b]);
            if (stubs[2 * p] != stubs[2 * p + 1] && stubs[2 * q] != stubs[2 * q + 1]) {
                bad.pop_back();
            } else {
                std::swap(stubs[a], stubs[b]);
            }
        }
        if (!bad.empty()) continue;
        for (std::size_t p = 0; p < pairs; ++p) {
            auto [i, j] = std::minmax(stubs[2 * p], stubs[2 * p + 1]);
            inst[p] = {i, j, random_time(rng, g.num_snapshots())};
        }
        return {rebuild(g, inst), {}, 0, {}};
    }
    if (pairs == 0) return {g, {}, 0, {}};
    throw NumericError("weighted-degree randomization could not remove self-pairs (seed " + std::to_string(seed) +
                       "); a node may hold more than half of all stubs");
}

}  // namespace

RandomizeOutcome randomize_detailed(const TemporalGraph& g, RandomizationKind kind, std::uint64_t seed) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(kind)));
    switch (kind) {
        case RandomizationKind::Random: return shuffle_random(g, rng);
        case RandomizationKind::RandomDelta: return shuffle_random_delta(g, rng);
        case RandomizationKind::ActiveSnapshot: return shuffle_active_snapshot(g, rng);
        case RandomizationKind::Time: return shuffle_time(g, rng);
        case RandomizationKind::Sequence: return shuffle_sequence(g, rng);
        case RandomizationKind::WeightedDegree: return shuffle_weighted_degree(g, rng, seed);
    }
    throw UsageError("unknown randomization kind");
}

TemporalGraph randomize(const TemporalGraph& g, RandomizationKind kind, std::uint64_t seed) {
    return randomize_detailed(g, kind, seed).graph;
}

}  // namespace tgdist
