#include <doctest.h>

#include <numeric>
#include <random>

#include "support.hpp"
#include "tgdist/cluster.hpp"
#include "tgdist/error.hpp"
#include "tgdist/experiments.hpp"

using namespace tgdist;

TEST_CASE("nmf") {
    SUBCASE("rank-1 recovery") {
        Eigen::VectorXd w = Eigen::VectorXd::LinSpaced(12, 0.5, 3.0);
        Eigen::MatrixXd M = w * w.transpose();
        auto r = nmf(M, 1, 500, 3);
        CHECK((M - r.W * r.H).norm() / M.norm() < 1e-6);
    }
    SUBCASE("k = m is exact") {
        Eigen::MatrixXd M = (Eigen::MatrixXd::Random(6, 6).array() + 1.0).matrix();
        auto r = nmf(M, 6, 5000, 1);
        CHECK((M - r.W * r.H).norm() / M.norm() < 1e-8);
    }
    SUBCASE("objective never increases; factors stay nonnegative") {
        Eigen::MatrixXd M = (Eigen::MatrixXd::Random(15, 15).array() + 1.0).matrix();
        auto r = nmf(M, 3, 300, 2);
        for (std::size_t k = 1; k < r.objective.size(); ++k) CHECK(r.objective[k] <= r.objective[k - 1] * (1 + 1e-12));
        CHECK(r.W.minCoeff() >= 0.0);
        CHECK(r.H.minCoeff() >= 0.0);
    }
    Eigen::MatrixXd neg = Eigen::MatrixXd::Ones(3, 3);
    neg(1, 2) = -0.1;
    CHECK_THROWS_AS(nmf(neg, 2, 10, 1), UsageError);
}

TEST_CASE("kmeans") {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> z(0.0, 0.1);
    Eigen::MatrixXd pts(60, 2);
    for (int i = 0; i < 60; ++i) {
        double cx = i < 30 ? 0.0 : 10.0;
        pts(i, 0) = cx + z(rng);
        pts(i, 1) = z(rng);
    }
    auto r = kmeans(pts, 2, 1).labeling;
    std::vector<int> truth(60);
    for (int i = 0; i < 60; ++i) truth[i] = i < 30 ? 0 : 1;
    CHECK(nmi(r.labels, truth) == 1.0);

    // point order does not matter up to renaming
    std::vector<int> order(60);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    Eigen::MatrixXd shuffled(60, 2);
    std::vector<int> shuffled_truth(60);
    for (int i = 0; i < 60; ++i) {
        shuffled.row(i) = pts.row(order[i]);
        shuffled_truth[i] = truth[order[i]];
    }
    CHECK(nmi(kmeans(shuffled, 2, 5).labeling.labels, shuffled_truth) == 1.0);

    Eigen::MatrixXd same = Eigen::MatrixXd::Ones(10, 3);
    auto s = kmeans(same, 3, 2).labeling.labels;
    CHECK(std::all_of(s.begin(), s.end(), [&](int l) { return l == s[0]; }));
    CHECK(kmeans(pts, 2, 1).labeling.labels == kmeans(pts, 2, 1).labeling.labels);
    CHECK_THROWS_AS(kmeans(pts.topRows(2), 3, 1), UsageError);
}

TEST_CASE("nmi") {
    std::vector<int> a{0, 0, 1, 1, 2, 2};
    std::vector<int> perm{2, 2, 0, 0, 1, 1};
    CHECK(nmi(a, a) == 1.0);
    CHECK(nmi(a, perm) == doctest::Approx(1.0).epsilon(1e-15));
    std::vector<int> b{0, 1, 0, 1, 0, 1};
    CHECK(nmi(a, b) == nmi(b, a));
    CHECK(nmi(a, b) >= 0.0);
    std::vector<int> one(6, 0), other(6, 4);
    CHECK(nmi(one, other) == 1.0);
    CHECK(nmi(one, a) == 0.0);
    std::vector<int> shorter{0, 1};
    CHECK_THROWS_AS(nmi(a, shorter), UsageError);

    std::mt19937_64 rng(11);
    std::vector<int> x(10000), y(10000);
    for (auto& v : x) v = static_cast<int>(rng() % 2);
    for (auto& v : y) v = static_cast<int>(rng() % 2);
    CHECK(nmi(x, y) < 0.01);
}

TEST_CASE("clustering distance matrices") {
    const int m = 20;
    Eigen::MatrixXd D = Eigen::MatrixXd::Constant(m, m, 5.0);
    D.topLeftCorner(10, 10).setConstant(0.2);
    D.bottomRightCorner(10, 10).setConstant(0.2);
    D.diagonal().setZero();
    std::vector<int> truth(m);
    for (int i = 0; i < m; ++i) truth[i] = i < 10 ? 0 : 1;
    CHECK(nmi(cluster_distances(D, 2, 3).labels, truth) == 1.0);

    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(2);
    std::shuffle(order.begin(), order.end(), rng);
    Eigen::MatrixXd Dp(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) Dp(i, j) = D(order[i], order[j]);
    std::vector<int> tp(m);
    for (int i = 0; i < m; ++i) tp[i] = truth[order[i]];
    CHECK(nmi(cluster_distances(Dp, 2, 3).labels, tp) == 1.0);

    ClusterOptions kernel;
    kernel.gaussian_kernel = true;
    CHECK(nmi(cluster_distances(D, 2, 3, kernel).labels, truth) == 1.0);

    auto z = cluster_distances(Eigen::MatrixXd::Zero(6, 6), 2, 1);
    CHECK(z.labels.size() == 6);
}

TEST_CASE("partial relabeling") {
    CHECK(partial_relabeling(50, 0.0, 1) == [] {
        std::vector<NodeId> id(50);
        std::iota(id.begin(), id.end(), 0);
        return id;
    }());
    for (double alpha : {0.1, 0.5, 1.0}) {
        auto p = partial_relabeling(50, alpha, 3);
        std::vector<NodeId> sorted = p;
        std::sort(sorted.begin(), sorted.end());
        for (NodeId i = 0; i < 50; ++i) CHECK(sorted[i] == i);
        long moved = 0;
        for (NodeId i = 0; i < 50; ++i) moved += p[i] != i;
        CHECK(moved == std::lround(alpha * 50));
    }
    CHECK_THROWS_AS(partial_relabeling(10, 1.5, 1), UsageError);
}

TEST_CASE("config JSON round trip") {
    ClassesConfig c;
    c.dims = {3, 5};
    c.embed.z_mode = ZMode::Mixture;
    c.activity.synthetic.bank_size = 17;
    ClassesConfig back;
    merge_json(back, to_json(c));
    CHECK(to_json(back) == to_json(c));

    RelabelConfig r;
    merge_json(r, nlohmann::json{{"models", {"gm"}}, {"alphas", {0.0, 0.5}}});
    CHECK(r.models == std::vector<ModelKind>{ModelKind::GM});
    CHECK(r.n == 300);
    RandomizationConfig z;
    merge_json(z, nlohmann::json{{"kinds", {"time", "sequence"}}});
    CHECK(z.kinds.size() == 2);
    CHECK_THROWS_AS(merge_json(z, nlohmann::json{{"kinds", {"nope"}}}), UsageError);
    CHECK_THROWS_AS(merge_json(z, nlohmann::json::array()), UsageError);
}

TEST_CASE("experiments are reproducible") {
    ClassesConfig c;
    c.instances_per_model = 3;
    c.n_min = 30;
    c.n_max = 40;
    c.dims = {2, 4};
    c.activity.synthetic.num_snapshots = 30;
    c.activity.synthetic.bank_size = 50;
    c.embed.epochs = 5;
    auto a = experiment_model_classes(c, 7);
    c.threads = 3;
    auto b = experiment_model_classes(c, 7);
    CHECK(a.results == b.results);
    CHECK(a.results["nmi"].size() == 2);
    CHECK(a.tables.size() == 4);

    RelabelConfig r;
    r.n = 30;
    r.repetitions = 2;
    r.alphas = {0.0, 0.5};
    r.models = {ModelKind::SBM};
    r.activity.synthetic.num_snapshots = 20;
    r.embed.epochs = 5;
    auto ra = experiment_relabel(r, 3);
    CHECK(ra.results == experiment_relabel(r, 3).results);
    CHECK(ra.results["sbm"][0]["mean"].get<double>() == 0.0);

    RandomizationConfig z;
    z.replicas = 3;
    z.kinds = {RandomizationKind::Random, RandomizationKind::Sequence};
    z.embed.dim = 4;
    z.embed.epochs = 5;
    auto g = bursty_test_graph(1, 20, 30);
    auto za = experiment_randomization_pairs(g, z, 5);
    CHECK(za.results == experiment_randomization_pairs(g, z, 5).results);
    CHECK(za.results["nmi_matched"]["random"].size() == 2);

    testing::TempDir dir("eval");
    auto files = write_report(za, dir / "rep");
    CHECK(files.size() == za.tables.size() + 1);
    for (const auto& f : files) CHECK(std::filesystem::exists(f));
}
