#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "support.hpp"
#include "tgdist/randomize.hpp"

namespace testing {

// Independent recomputations of the quantities each randomization preserves.

inline long instance_count(const tgdist::TemporalGraph& g) {
    long total = 0;
    for (std::size_t t = 0; t < g.num_snapshots(); ++t)
        for (const auto& e : g.snapshot(t).edges()) total += std::lround(e.w);
    return total;
}

/// tau histogram of the level-set contact decomposition, computed per pair from dense series.
inline std::map<int, long> tau_histogram(const tgdist::TemporalGraph& g) {
    std::map<std::pair<tgdist::NodeId, tgdist::NodeId>, std::vector<long>> series;
    const std::size_t T = g.num_snapshots();
    for (std::size_t t = 0; t < T; ++t)
        for (const auto& e : g.snapshot(t).edges()) {
            auto& s = series[{e.i, e.j}];
            s.resize(T, 0);
            s[t] = std::lround(e.w);
        }
    std::map<int, long> hist;
    for (auto& [pair, s] : series) {
        long top = *std::max_element(s.begin(), s.end());
        for (long level = 1; level <= top; ++level) {
            int run = 0;
            for (std::size_t t = 0; t <= T; ++t) {
                if (t < T && s[t] >= level) {
                    ++run;
                } else if (run > 0) {
                    ++hist[run];
                    run = 0;
                }
            }
        }
    }
    return hist;
}

inline std::map<int, long> tau_histogram(const std::vector<tgdist::ContactEvent>& events) {
    std::map<int, long> hist;
    for (const auto& e : events) ++hist[e.tau];
    return hist;
}

inline std::vector<std::size_t> edges_per_snapshot(const tgdist::TemporalGraph& g) {
    std::vector<std::size_t> c;
    for (std::size_t t = 0; t < g.num_snapshots(); ++t) c.push_back(g.snapshot(t).edges().size());
    return c;
}

inline std::vector<std::multiset<double>> weights_per_snapshot(const tgdist::TemporalGraph& g) {
    std::vector<std::multiset<double>> w;
    for (std::size_t t = 0; t < g.num_snapshots(); ++t) {
        std::multiset<double> s;
        for (const auto& e : g.snapshot(t).edges()) s.insert(e.w);
        w.push_back(s);
    }
    return w;
}

inline std::vector<std::set<tgdist::NodeId>> active_sets(const tgdist::TemporalGraph& g) {
    std::vector<std::set<tgdist::NodeId>> a;
    for (std::size_t t = 0; t < g.num_snapshots(); ++t) {
        std::set<tgdist::NodeId> s;
        for (const auto& e : g.snapshot(t).edges()) s.insert({e.i, e.j});
        a.push_back(s);
    }
    return a;
}

inline std::map<std::pair<tgdist::NodeId, tgdist::NodeId>, long> aggregated(const tgdist::TemporalGraph& g) {
    std::map<std::pair<tgdist::NodeId, tgdist::NodeId>, long> m;
    for (std::size_t t = 0; t < g.num_snapshots(); ++t)
        for (const auto& e : g.snapshot(t).edges()) m[{e.i, e.j}] += std::lround(e.w);
    return m;
}

using SnapshotKey = std::vector<std::tuple<tgdist::NodeId, tgdist::NodeId, long>>;

inline std::multiset<SnapshotKey> snapshot_multiset(const tgdist::TemporalGraph& g) {
    std::multiset<SnapshotKey> m;
    for (std::size_t t = 0; t < g.num_snapshots(); ++t) {
        SnapshotKey s;
        for (const auto& e : g.snapshot(t).edges()) s.emplace_back(e.i, e.j, std::lround(e.w));
        m.insert(s);
    }
    return m;
}

inline std::vector<long> weighted_degrees(const tgdist::TemporalGraph& g) {
    std::vector<long> d(static_cast<std::size_t>(g.num_nodes()), 0);
    for (std::size_t t = 0; t < g.num_snapshots(); ++t)
        for (const auto& e : g.snapshot(t).edges()) {
            d[e.i] += std::lround(e.w);
            d[e.j] += std::lround(e.w);
        }
    return d;
}

/// Names of the preserved quantities that `r` fails to keep; empty when all hold.
inline std::vector<std::string> conservation_failures(const tgdist::TemporalGraph& g,
                                                      const tgdist::RandomizeOutcome& r,
                                                      tgdist::RandomizationKind kind) {
    using tgdist::RandomizationKind;
    std::vector<std::string> bad;
    auto expect = [&](bool ok, const char* what) {
        if (!ok) bad.emplace_back(what);
    };
    const auto& h = r.graph;
    expect(h.num_nodes() == g.num_nodes(), "node count");
    expect(h.num_snapshots() == g.num_snapshots(), "snapshot count");
    bool loops = false;
    for (std::size_t t = 0; t < h.num_snapshots(); ++t)
        for (const auto& e : h.snapshot(t).edges()) loops |= e.i == e.j;
    expect(!loops, "no self loops");
    switch (kind) {
        case RandomizationKind::Random:
            expect(instance_count(h) == instance_count(g), "instance count");
            break;
        case RandomizationKind::WeightedDegree:
            expect(instance_count(h) == instance_count(g), "instance count");
            expect(weighted_degrees(h) == weighted_degrees(g), "weighted degrees");
            break;
        case RandomizationKind::RandomDelta: {
            expect(instance_count(h) == instance_count(g), "instance count");
            expect(tau_histogram(r.events) == tau_histogram(g), "duration histogram");
            bool inside = true;
            for (const auto& e : r.events) inside &= e.t >= 0 && e.t + e.tau <= static_cast<int>(g.num_snapshots());
            expect(inside, "events inside the time range");
            break;
        }
        case RandomizationKind::ActiveSnapshot:
            expect(edges_per_snapshot(h) == edges_per_snapshot(g), "edges per snapshot");
            expect(active_sets(h) == active_sets(g), "active node sets");
            expect(weights_per_snapshot(h) == weights_per_snapshot(g), "weights per snapshot");
            break;
        case RandomizationKind::Time:
            expect(aggregated(h) == aggregated(g), "aggregated weighted graph");
            break;
        case RandomizationKind::Sequence:
            expect(snapshot_multiset(h) == snapshot_multiset(g), "snapshot multiset");
            break;
    }
    return bad;
}

/// End-point frequencies of `walks` lazy walks from `start`: a walker of length
/// l (uniform in 1..T) starts at snapshot T - l and steps through the rest,
/// sampling each move from the dense lazy transition row.
inline Eigen::VectorXd simulate_walks(const RawGraph& raw, int start, int walks, std::mt19937_64& rng) {
    const int T = static_cast<int>(raw.snapshots.size());
    const int n = static_cast<int>(raw.n);
    std::vector<Eigen::MatrixXd> L;
    for (int t = 0; t < T; ++t) L.push_back(lazy_transition(raw.dense(static_cast<std::size_t>(t))));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(n);
    for (int w = 0; w < walks; ++w) {
        int len = 1 + static_cast<int>(rng() % static_cast<unsigned>(T));
        int at = start;
        for (int t = T - len; t < T; ++t) {
            double r = u(rng), acc = 0.0;
            int next = n - 1;
            for (int j = 0; j < n; ++j) {
                acc += L[static_cast<std::size_t>(t)](at, j);
                if (r < acc) {
                    next = j;
                    break;
                }
            }
            at = next;
        }
        counts(at) += 1.0;
    }
    return counts / walks;
}

/// The fixed 5-node, T = 4 toy used for walk simulations.
inline RawGraph walk_toy() {
    std::vector<std::vector<tgdist::WeightedEdge>> s(4);
    s[0] = {{0, 1, 1.0}, {2, 3, 2.0}};
    s[1] = {{1, 2, 1.0}, {3, 4, 1.0}, {0, 4, 3.0}};
    s[2] = {{0, 2, 1.0}};
    s[3] = {{1, 3, 1.0}, {2, 4, 2.0}, {0, 1, 1.0}};
    return {5, s};
}

}  // namespace testing
