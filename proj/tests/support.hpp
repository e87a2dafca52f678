#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tgdist/graph.hpp"

namespace testing {

/// Raw per-snapshot edge lists, kept alongside the graph so oracles never read
/// back through the library's own storage.
struct RawGraph {
    tgdist::NodeId n = 0;
    std::vector<std::vector<tgdist::WeightedEdge>> snapshots;

    tgdist::TemporalGraph build() const {
        std::vector<tgdist::Snapshot> s;
        for (const auto& e : snapshots) s.push_back(tgdist::Snapshot::from_edges(n, e));
        return tgdist::TemporalGraph(n, std::move(s));
    }

    /// Dense symmetric W_t.
    Eigen::MatrixXd dense(std::size_t t) const {
        Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, n);
        for (const auto& e : snapshots[t]) {
            W(e.i, e.j) += e.w;
            W(e.j, e.i) += e.w;
        }
        return W;
    }
};

/// Each snapshot holds each pair with probability `density`; weights are
/// integers in 1..max_weight (or uniform reals when max_weight == 0).
inline RawGraph random_raw_graph(tgdist::NodeId n, std::size_t T, double density, std::uint64_t seed,
                                 int max_weight = 3) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_int_distribution<int> w(1, std::max(1, max_weight));
    RawGraph g{n, std::vector<std::vector<tgdist::WeightedEdge>>(T)};
    for (std::size_t t = 0; t < T; ++t)
        for (tgdist::NodeId i = 0; i < n; ++i)
            for (tgdist::NodeId j = i + 1; j < n; ++j)
                if (u(rng) < density)
                    g.snapshots[t].push_back({i, j, max_weight == 0 ? 0.1 + u(rng) : static_cast<double>(w(rng))});
    return g;
}

/// (D + I)^{-1} (W + I), straight from the definition.
inline Eigen::MatrixXd lazy_transition(const Eigen::MatrixXd& W) {
    const auto n = W.rows();
    Eigen::MatrixXd A = W + Eigen::MatrixXd::Identity(n, n);
    for (Eigen::Index i = 0; i < n; ++i) A.row(i) /= A.row(i).sum();
    return A;
}

/// (1/T) sum_tau L_tau ... L_T by explicit dense products.
inline Eigen::MatrixXd dense_global_transition(const RawGraph& g) {
    const std::size_t T = g.snapshots.size();
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(g.n, g.n);
    for (std::size_t tau = 0; tau < T; ++tau) {
        Eigen::MatrixXd prod = Eigen::MatrixXd::Identity(g.n, g.n);
        for (std::size_t t = tau; t < T; ++t) prod = prod * lazy_transition(g.dense(t));
        P += prod;
    }
    return P / static_cast<double>(T);
}

inline Eigen::MatrixXd random_unit_rows(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    Eigen::MatrixXd X(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index c = 0; c < d; ++c) X(i, c) = z(rng);
        X.row(i).normalize();
    }
    return X;
}

inline Eigen::MatrixXd random_orthogonal(Eigen::Index d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    Eigen::MatrixXd A(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index c = 0; c < d; ++c) A(i, c) = z(rng);
    return Eigen::HouseholderQR<Eigen::MatrixXd>(A).householderQ();
}

/// Raw face-to-face style contact list: records every 20 s during 8-hour days
/// separated by nights, group-biased pairs, heavy-tailed contact durations.
/// Load with t_res = 600 to obtain weights in 1..30.
inline void write_contact_file(const std::filesystem::path& path, int n, int days, int contacts_per_day,
                               std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::ofstream out(path);
    out << "# t i j\n";
    const long day = 86400, open = 8 * 3600, tick = 20;
    for (int d = 0; d < days; ++d) {
        for (int c = 0; c < contacts_per_day; ++c) {
            int i = static_cast<int>(rng() % n);
            int j = static_cast<int>(rng() % n);
            if (u(rng) < 0.7) j = (i / 8) * 8 + static_cast<int>(rng() % 8);
            if (j >= n || i == j) continue;
            // duration in ticks, P(k) ~ k^-2 on 1..90
            long k = std::min<long>(90, static_cast<long>(std::floor(1.0 / std::max(1e-9, u(rng)))));
            long start = d * day + static_cast<long>(u(rng) * (open - k * tick)) / tick * tick;
            for (long s = 0; s < k; ++s) out << 1000000 + start + s * tick << ' ' << 's' << i << ' ' << 's' << j << '\n';
        }
    }
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("tgdist_" + tag + "_" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

}  // namespace testing
