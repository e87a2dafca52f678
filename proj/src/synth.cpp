#include "tgdist/synth.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numbers>

#include "tgdist/error.hpp"
#include "tgdist/rng.hpp"

namespace tgdist {

std::vector<int> StaticGraph::degrees() const {
    std::vector<int> deg(static_cast<std::size_t>(n), 0);
    for (auto [i, j] : edges) {
        ++deg[i];
        ++deg[j];
    }
    return deg;
}

double StaticGraph::average_clustering() const {
    if (n == 0) return 0.0;
    std::vector<std::vector<NodeId>> adj(static_cast<std::size_t>(n));
    for (auto [i, j] : edges) {
        adj[i].push_back(j);
        adj[j].push_back(i);
    }
    for (auto& a : adj) std::sort(a.begin(), a.end());
    double total = 0.0;
    for (NodeId v = 0; v < n; ++v) {
        const auto& nb = adj[v];
        if (nb.size() < 2) continue;
        std::size_t links = 0;
        for (std::size_t x = 0; x < nb.size(); ++x)
            for (std::size_t y = x + 1; y < nb.size(); ++y)
                if (std::binary_search(adj[nb[x]].begin(), adj[nb[x]].end(), nb[y])) ++links;
        total += 2.0 * static_cast<double>(links) / (static_cast<double>(nb.size()) * (nb.size() - 1));
    }
    return total / n;
}

namespace {

void validate(const DcsbmParams& p) {
    if (p.n < 1) throw UsageError("DCSBM needs n >= 1");
    if (p.labels.size() != static_cast<std::size_t>(p.n) || p.theta.size() != static_cast<std::size_t>(p.n))
        throw UsageError("DCSBM labels and theta must have n entries");
    if (p.affinity.rows() != p.affinity.cols()) throw UsageError("DCSBM affinity must be square");
    if ((p.affinity - p.affinity.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw UsageError("DCSBM affinity must be symmetric");
    if ((p.affinity.array() < 0.0).any()) throw UsageError("DCSBM affinity must be nonnegative");
    for (int l : p.labels)
        if (l < 0 || l >= p.affinity.rows()) throw UsageError("DCSBM label out of range");
    double sum = 0.0;
    for (double t : p.theta) {
        if (t < 0.0) throw UsageError("DCSBM theta must be nonnegative");
        sum += t;
    }
    if (std::abs(sum - p.n) > 1e-6 * p.n)
        throw UsageError("DCSBM theta must sum to n (got " + std::to_string(sum) + ")");
}

double dcsbm_probability(const DcsbmParams& p, NodeId i, NodeId j) {
    return std::min(1.0, p.theta[i] * p.theta[j] * p.affinity(p.labels[i], p.labels[j]) / p.n);
}

double geometric_probability(const GeometricParams& p, NodeId i, NodeId j) {
    return std::min(1.0, p.scale * std::exp(-p.beta * (p.positions[i] - p.positions[j]).norm()));
}

std::vector<Eigen::Vector2d> disk_positions(NodeId n, Rng& rng) {
    std::vector<Eigen::Vector2d> pos(static_cast<std::size_t>(n));
    for (auto& x : pos) {
        // uniform in the disk: radius ~ sqrt(U)
        double r = std::sqrt(uniform01(rng));
        double phi = 2.0 * std::numbers::pi * uniform01(rng);
        x = {r * std::cos(phi), r * std::sin(phi)};
    }
    return pos;
}

template <class Prob>
StaticGraph bernoulli_graph(NodeId n, Prob&& prob, std::uint64_t seed) {
    Rng rng(seed);
    StaticGraph g{n, {}};
    for (NodeId i = 0; i < n; ++i)
        for (NodeId j = i + 1; j < n; ++j)
            if (uniform01(rng) < prob(i, j)) g.edges.emplace_back(i, j);
    return g;
}

template <class MeanDegree>
double bisect_scale(MeanDegree&& mean_degree, double target, double hi_cap) {
    double lo = 0.0, hi = 1.0;
    while (mean_degree(hi) < target) {
        hi *= 2.0;
        if (hi > hi_cap) throw UsageError("target mean degree " + std::to_string(target) + " is unreachable");
    }
    for (int it = 0; it < 100 && hi - lo > 1e-12 * hi; ++it) {
        double mid = 0.5 * (lo + hi);
        (mean_degree(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double dcsbm_expected_mean_degree(const DcsbmParams& p) {
    double sum = 0.0;
    for (NodeId i = 0; i < p.n; ++i)
        for (NodeId j = i + 1; j < p.n; ++j) sum += dcsbm_probability(p, i, j);
    return 2.0 * sum / p.n;
}

StaticGraph dcsbm(const DcsbmParams& params, std::uint64_t seed) {
    validate(params);
    return bernoulli_graph(params.n, [&](NodeId i, NodeId j) { return dcsbm_probability(params, i, j); }, seed);
}

double geometric_expected_mean_degree(const GeometricParams& p) {
    if (p.positions.size() != static_cast<std::size_t>(p.n)) throw UsageError("geometric model needs n positions");
    double sum = 0.0;
    for (NodeId i = 0; i < p.n; ++i)
        for (NodeId j = i + 1; j < p.n; ++j) sum += geometric_probability(p, i, j);
    return 2.0 * sum / p.n;
}

StaticGraph geometric(const GeometricParams& params, std::uint64_t seed) {
    if (params.n < 1) throw UsageError("geometric model needs n >= 1");
    if (!(params.beta > 0.0)) throw UsageError("geometric model needs beta > 0");
    GeometricParams p = params;
    Rng rng(derive_seed(seed, 0));
    if (p.positions.empty()) p.positions = disk_positions(p.n, rng);
    if (p.positions.size() != static_cast<std::size_t>(p.n)) throw UsageError("geometric model needs n positions");
    for (const auto& x : p.positions)
        if (x.norm() > 1.0 + 1e-12) throw UsageError("latent positions must lie in the unit disk");
    return bernoulli_graph(p.n, [&](NodeId i, NodeId j) { return geometric_probability(p, i, j); },
                           derive_seed(seed, 1));
}

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::ER: return "er";
        case ModelKind::SBM: return "sbm";
        case ModelKind::CM: return "cm";
        case ModelKind::GM: return "gm";
    }
    return "?";
}

ModelKind parse_model_kind(const std::string& name) {
    std::string key = name;
    std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
    for (auto kind : kAllModels)
        if (key == to_string(kind)) return kind;
    throw UsageError("unknown model '" + name + "' (expected er, sbm, cm or gm)");
}

DcsbmParams dcsbm_preset(ModelKind kind, NodeId n, double target, std::uint64_t seed) {
    if (n < 10) throw UsageError("presets need n >= 10");
    if (!(target > 0.0)) throw UsageError("target mean degree must be positive");
    DcsbmParams p;
    p.n = n;
    p.labels.assign(static_cast<std::size_t>(n), 0);
    p.theta.assign(static_cast<std::size_t>(n), 1.0);
    p.affinity = Eigen::MatrixXd::Ones(1, 1);
    Rng rng(seed);
    switch (kind) {
        case ModelKind::ER: break;
        case ModelKind::SBM: {
            constexpr int k = 5;
            for (NodeId i = 0; i < n; ++i) p.labels[i] = static_cast<int>(static_cast<long>(i) * k / n);
            p.affinity = Eigen::MatrixXd::Ones(k, k) + 19.0 * Eigen::MatrixXd::Identity(k, k);
            break;
        }
        case ModelKind::CM: {
            double sum = 0.0;
            for (auto& t : p.theta) {
                t = std::pow(3.0 + 7.0 * uniform01(rng), 4.0);
                sum += t;
            }
            for (auto& t : p.theta) t *= n / sum;
            break;
        }
        case ModelKind::GM: throw UsageError("the geometric model is not a DCSBM preset");
    }
    // scale C so the expected mean degree hits the target (min(1, .) makes this nonlinear)
    const Eigen::MatrixXd base = p.affinity;
    auto mean_at = [&](double s) {
        p.affinity = s * base;
        return dcsbm_expected_mean_degree(p);
    };
    double guess = target / mean_at(1.0);
    double s = std::abs(mean_at(guess) - target) <= 1e-9 * target ? guess
                                                                  : bisect_scale(mean_at, target, 1e12);
    p.affinity = s * base;
    return p;
}

GeometricParams geometric_preset(NodeId n, double target, std::uint64_t seed) {
    if (n < 10) throw UsageError("presets need n >= 10");
    GeometricParams p;
    p.n = n;
    p.beta = 20.0;
    Rng rng(derive_seed(seed, 0));
    p.positions = disk_positions(n, rng);
    auto mean_at = [&](double s) {
        p.scale = s;
        return geometric_expected_mean_degree(p);
    };
    p.scale = bisect_scale(mean_at, target, 1e12);
    return p;
}

StaticGraph preset(ModelKind kind, NodeId n, double target_mean_degree, std::uint64_t seed) {
    if (kind == ModelKind::GM) return geometric(geometric_preset(n, target_mean_degree, seed), seed);
    return dcsbm(dcsbm_preset(kind, n, target_mean_degree, derive_seed(seed, 7)), seed);
}

TemporalGraph temporalize(const StaticGraph& sg, const TemporalGraph& activity_source, std::uint64_t seed,
                          bool circular_shift) {
    std::map<std::pair<NodeId, NodeId>, std::vector<std::pair<std::size_t, double>>> bank_map;
    for (std::size_t t = 0; t < activity_source.num_snapshots(); ++t)
        for (const auto& e : activity_source.snapshot(t).edges()) bank_map[{e.i, e.j}].push_back({t, e.w});
    if (bank_map.empty()) throw DataError("activity source has no active edge");
    std::vector<const std::vector<std::pair<std::size_t, double>>*> bank;
    bank.reserve(bank_map.size());
    for (const auto& [pair, series] : bank_map) bank.push_back(&series);

    const std::size_t T = activity_source.num_snapshots();
    Rng rng(seed);
    std::vector<std::vector<WeightedEdge>> per(T);
    for (auto [i, j] : sg.edges) {
        if (i == j || i < 0 || j < 0 || i >= sg.n || j >= sg.n) throw UsageError("static graph has an invalid edge");
        const auto& series = *bank[uniform_int<std::size_t>(rng, 0, bank.size() - 1)];
        std::size_t shift = circular_shift ? uniform_int<std::size_t>(rng, 0, T - 1) : 0;
        for (auto [t, w] : series) per[(t + shift) % T].push_back({i, j, w});
    }
    std::vector<Snapshot> snaps;
    snaps.reserve(T);
    for (auto& e : per) snaps.push_back(Snapshot::from_edges(sg.n, e));
    return TemporalGraph(sg.n, std::move(snaps), activity_source.t_res());
}

namespace {

// Inverse-CDF sampler for P(k) ~ k^-alpha on k = 1..kmax.
class PowerLawSampler {
public:
    PowerLawSampler(double alpha, std::size_t kmax) : cdf_(kmax) {
        double acc = 0.0;
        for (std::size_t k = 1; k <= kmax; ++k) {
            acc += std::pow(static_cast<double>(k), -alpha);
            cdf_[k - 1] = acc;
        }
        for (auto& c : cdf_) c /= acc;
    }
    std::size_t operator()(Rng& rng) const {
        double u = uniform01(rng);
        return static_cast<std::size_t>(std::upper_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin()) + 1;
    }

private:
    std::vector<double> cdf_;
};

}  // namespace

TemporalGraph synthetic_activity(const ActivityProfile& profile, std::uint64_t seed) {
    if (profile.num_snapshots < 1 || profile.bank_size < 1) throw UsageError("activity bank needs T >= 1 and size >= 1");
    const std::size_t T = profile.num_snapshots;
    PowerLawSampler on(profile.on_exponent, T);
    PowerLawSampler off(profile.off_exponent, T);
    Rng rng(seed);
    std::vector<std::vector<WeightedEdge>> per(T);
    for (std::size_t k = 0; k < profile.bank_size; ++k) {
        const NodeId a = static_cast<NodeId>(2 * k), b = a + 1;
        std::vector<std::size_t> active;
        while (active.empty()) {
            // start inside an off period so that series begin at random times
            std::size_t t = uniform_int<std::size_t>(rng, 0, off(rng) - 1);
            while (t < T) {
                std::size_t len = on(rng);
                for (std::size_t s = t; s < std::min(T, t + len); ++s) active.push_back(s);
                t += len + off(rng);
            }
        }
        for (auto t : active) per[t].push_back({a, b, 1.0});
    }
    const auto n = static_cast<NodeId>(2 * profile.bank_size);
    std::vector<Snapshot> snaps;
    snaps.reserve(T);
    for (auto& e : per) snaps.push_back(Snapshot::from_edges(n, e));
    return TemporalGraph(n, std::move(snaps));
}

}  // namespace tgdist
