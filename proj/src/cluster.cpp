#include "tgdist/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "tgdist/error.hpp"
#include "tgdist/rng.hpp"

namespace tgdist {

namespace {

KMeansResult lloyd_once(const Eigen::MatrixXd& X, int k, Rng& rng, int max_iterations) {
    const Eigen::Index m = X.rows();
    Eigen::MatrixXd centers(k, X.cols());

    // k-means++ seeding
    Eigen::VectorXd best_d2(m);
    Eigen::Index first = uniform_int<Eigen::Index>(rng, 0, m - 1);
    centers.row(0) = X.row(first);
    for (Eigen::Index i = 0; i < m; ++i) best_d2(i) = (X.row(i) - centers.row(0)).squaredNorm();
    for (int c = 1; c < k; ++c) {
        double total = best_d2.sum();
        Eigen::Index pick = 0;
        if (total > 0.0) {
            double target = uniform01(rng) * total;
            double acc = 0.0;
            pick = m - 1;
            for (Eigen::Index i = 0; i < m; ++i) {
                acc += best_d2(i);
                if (acc > target && best_d2(i) > 0.0) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = uniform_int<Eigen::Index>(rng, 0, m - 1);
        }
        centers.row(c) = X.row(pick);
        for (Eigen::Index i = 0; i < m; ++i)
            best_d2(i) = std::min(best_d2(i), (X.row(i) - centers.row(c)).squaredNorm());
    }

    std::vector<int> labels(static_cast<std::size_t>(m), -1);
    for (int iter = 0; iter < max_iterations; ++iter) {
        bool changed = false;
        for (Eigen::Index i = 0; i < m; ++i) {
            int arg = 0;
            double best = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                double d2 = (X.row(i) - centers.row(c)).squaredNorm();
                if (d2 < best) {
                    best = d2;
                    arg = c;
                }
            }
            if (labels[i] != arg) {
                labels[i] = arg;
                changed = true;
            }
        }
        if (!changed && iter > 0) break;

        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, X.cols());
        std::vector<Eigen::Index> counts(k, 0);
        for (Eigen::Index i = 0; i < m; ++i) {
            sums.row(labels[i]) += X.row(i);
            ++counts[labels[i]];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[c] > 0) {
                centers.row(c) = sums.row(c) / static_cast<double>(counts[c]);
                continue;
            }
            // empty cluster: move it to the point farthest from its center
            Eigen::Index far = 0;
            double far_d = -1.0;
            for (Eigen::Index i = 0; i < m; ++i) {
                double d2 = (X.row(i) - centers.row(labels[i])).squaredNorm();
                if (d2 > far_d) {
                    far_d = d2;
                    far = i;
                }
            }
            centers.row(c) = X.row(far);
        }
    }

    KMeansResult res;
    res.centers = centers;
    res.inertia = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) res.inertia += (X.row(i) - centers.row(labels[i])).squaredNorm();
    res.labeling = {std::move(labels), k};
    return res;
}

}  // namespace

KMeansResult kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed, KMeansOptions options) {
    if (k < 1) throw UsageError("k-means needs k >= 1");
    if (points.rows() < k)
        throw UsageError("k-means needs at least k points (m=" + std::to_string(points.rows()) +
                         ", k=" + std::to_string(k) + ")");
    Rng rng(seed);
    KMeansResult best;
    best.inertia = std::numeric_limits<double>::infinity();
    for (int r = 0; r < std::max(1, options.restarts); ++r) {
        auto res = lloyd_once(points, k, rng, options.max_iterations);
        if (res.inertia < best.inertia) best = std::move(res);
    }
    return best;
}

NmfResult nmf(const Eigen::MatrixXd& M, int k, int iterations, std::uint64_t seed) {
    if (k < 1) throw UsageError("NMF needs k >= 1");
    if ((M.array() < 0.0).any()) throw UsageError("NMF input has a negative entry");
    constexpr double eps = 1e-12;
    const Eigen::Index m = M.rows();
    const Eigen::Index p = M.cols();

    Rng rng(seed);
    // random init scaled so that W H has the magnitude of M
    double scale = std::sqrt(std::max(M.mean(), eps) / static_cast<double>(k));
    NmfResult res;
    res.W.resize(m, k);
    res.H.resize(k, p);
    for (Eigen::Index i = 0; i < res.W.size(); ++i) res.W.data()[i] = scale * (0.5 + uniform01(rng));
    for (Eigen::Index i = 0; i < res.H.size(); ++i) res.H.data()[i] = scale * (0.5 + uniform01(rng));

    res.objective.reserve(static_cast<std::size_t>(iterations));
    for (int it = 0; it < iterations; ++it) {
        Eigen::MatrixXd numH = res.W.transpose() * M;
        Eigen::MatrixXd denH = (res.W.transpose() * res.W) * res.H;
        res.H.array() *= numH.array() / (denH.array() + eps);
        Eigen::MatrixXd numW = M * res.H.transpose();
        Eigen::MatrixXd denW = res.W * (res.H * res.H.transpose());
        res.W.array() *= numW.array() / (denW.array() + eps);
        res.objective.push_back((M - res.W * res.H).squaredNorm());
    }
    return res;
}

double nmi(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size())
        throw UsageError("nmi: labelings have different lengths (" + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()) + ")");
    if (a.empty()) return 1.0;
    std::map<int, double> ca, cb;
    std::map<std::pair<int, int>, double> joint;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ca[a[i]] += 1.0;
        cb[b[i]] += 1.0;
        joint[{a[i], b[i]}] += 1.0;
    }
    const double m = static_cast<double>(a.size());
    auto entropy = [m](const std::map<int, double>& counts) {
        double h = 0.0;
        for (const auto& [label, c] : counts) h -= (c / m) * std::log(c / m);
        return h;
    };
    double ha = entropy(ca);
    double hb = entropy(cb);
    if (ha == 0.0 && hb == 0.0) return 1.0;
    double mi = 0.0;
    for (const auto& [key, c] : joint) mi += (c / m) * std::log(c * m / (ca[key.first] * cb[key.second]));
    double value = mi / (0.5 * (ha + hb));
    return std::clamp(value, 0.0, 1.0);
}

double nmi(const Labeling& a, const Labeling& b) { return nmi(a.labels, b.labels); }

Labeling cluster_distances(const Eigen::MatrixXd& D, int k, std::uint64_t seed, ClusterOptions options) {
    if (D.rows() != D.cols()) throw UsageError("distance matrix must be square");
    if (k < 1 || D.rows() < k) throw UsageError("cluster_distances needs 1 <= k <= m");
    Eigen::MatrixXd input = D;
    if (options.gaussian_kernel) {
        std::vector<double> off;
        for (Eigen::Index i = 0; i < D.rows(); ++i)
            for (Eigen::Index j = i + 1; j < D.cols(); ++j) off.push_back(D(i, j));
        double s = 1.0;
        if (!off.empty()) {
            std::nth_element(off.begin(), off.begin() + off.size() / 2, off.end());
            s = off[off.size() / 2] > 0.0 ? off[off.size() / 2] : 1.0;
        }
        input = (-(D.array().square()) / (2.0 * s * s)).exp().matrix();
    }
    auto factor = nmf(input, k, options.nmf_iterations, derive_seed(seed, 1));
    return kmeans(factor.W, k, derive_seed(seed, 2), options.kmeans).labeling;
}

}  // namespace tgdist
