#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace tgdist {

/// Class assignment per item, labels in 0..num_classes-1.
struct Labeling {
    std::vector<int> labels;
    int num_classes = 0;

    std::size_t size() const { return labels.size(); }
};

struct KMeansOptions {
    int restarts = 10;
    int max_iterations = 300;
};

struct KMeansResult {
    Labeling labeling;
    Eigen::MatrixXd centers;  // k x dim
    double inertia = 0.0;
};

/// k-means++ seeding followed by Lloyd iterations; best restart by inertia.
/// Rows of `points` are the items.
KMeansResult kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed, KMeansOptions options = {});

struct NmfResult {
    Eigen::MatrixXd W;  // m x k
    Eigen::MatrixXd H;  // k x m
    std::vector<double> objective;  // squared Frobenius error after each iteration
};

/// Lee-Seung multiplicative updates for M ~ W H under the Frobenius loss.
NmfResult nmf(const Eigen::MatrixXd& M, int k, int iterations, std::uint64_t seed);

/// Mutual information over the arithmetic mean of the two entropies (natural log).
/// Two single-cluster partitions score 1.
double nmi(const Labeling& a, const Labeling& b);
double nmi(const std::vector<int>& a, const std::vector<int>& b);

struct ClusterOptions {
    int nmf_iterations = 500;
    /// Replace D by exp(-D^2 / (2 s^2)) with s the median off-diagonal distance before NMF.
    bool gaussian_kernel = false;
    KMeansOptions kmeans{};
};

/// NMF with k components on the distance matrix, then k-means on the rows of W.
Labeling cluster_distances(const Eigen::MatrixXd& D, int k, std::uint64_t seed, ClusterOptions options = {});

}  // namespace tgdist
