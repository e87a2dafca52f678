#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "support.hpp"
#include "tgdist/edrep.hpp"
#include "tgdist/error.hpp"

using namespace tgdist;

namespace {

double max_abs(const Eigen::MatrixXd& a) { return a.cwiseAbs().maxCoeff(); }

/// Double loop over the definition, with the regularizer as a double sum too.
double brute_force_loss(const Eigen::MatrixXd& P, const Eigen::MatrixXd& X) {
    const auto n = X.rows();
    double loss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double Z = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) Z += std::exp(X.row(i).dot(X.row(k)));
        for (Eigen::Index j = 0; j < n; ++j) {
            double s = X.row(i).dot(X.row(j));
            loss -= P(i, j) * (s - std::log(Z)) - s / static_cast<double>(n);
        }
    }
    return loss;
}

TransitionOperator random_operator(NodeId n, std::uint64_t seed, OperatorMode mode = OperatorMode::Lazy) {
    auto raw = testing::random_raw_graph(n, 4, 2.5 / n, seed);
    return TransitionOperator::build(raw.build(), mode);
}

Eigen::MatrixXd central_difference(const TransitionOperator& op, const Eigen::MatrixXd& X, ZMode mode, int q,
                                   double h) {
    Eigen::MatrixXd G(X.rows(), X.cols());
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        for (Eigen::Index c = 0; c < X.cols(); ++c) {
            Eigen::MatrixXd up = X, down = X;
            up(i, c) += h;
            down(i, c) -= h;
            G(i, c) = (evaluate_loss(op, up, mode, q, 3, false).loss - evaluate_loss(op, down, mode, q, 3, false).loss) /
                      (2 * h);
        }
    return G;
}

}  // namespace

TEST_CASE("two orthogonal nodes with P = I") {
    testing::RawGraph raw{2, std::vector<std::vector<WeightedEdge>>(1)};
    auto op = TransitionOperator::build(raw.build());
    Eigen::MatrixXd X(2, 2);
    X << 1, 0, 0, 1;
    CHECK(loss_exact(op, X) == doctest::Approx(2 * std::log(1 + std::exp(-1.0)) + 1).epsilon(1e-14));
}

TEST_CASE("loss matches the brute-force double loop") {
    auto raw = testing::random_raw_graph(10, 5, 0.3, 21, 0);
    auto op = TransitionOperator::build(raw.build(), OperatorMode::Lazy);
    Eigen::MatrixXd P = testing::dense_global_transition(raw);
    for (std::uint64_t s = 0; s < 3; ++s) {
        auto X = testing::random_unit_rows(10, 4, s);
        CHECK(std::abs(loss_exact(op, X) - brute_force_loss(P, X)) < 1e-10);
        CHECK(std::abs(evaluate_loss(op, X, ZMode::Exact, 1, 0, false).loss - brute_force_loss(P, X)) < 1e-10);
    }
}

TEST_CASE("loss is the same in lazy and materialized mode") {
    auto raw = testing::random_raw_graph(30, 6, 0.1, 2);
    auto lazy = TransitionOperator::build(raw.build(), OperatorMode::Lazy);
    auto dense = TransitionOperator::build(raw.build(), OperatorMode::Materialized);
    auto X = testing::random_unit_rows(30, 5, 1);
    CHECK(std::abs(loss_exact(lazy, X) - loss_exact(dense, X)) < 1e-10);
}

TEST_CASE("loss is invariant under orthogonal column transforms") {
    auto op = random_operator(25, 4);
    auto X = testing::random_unit_rows(25, 6, 2);
    auto R = testing::random_orthogonal(6, 9);
    CHECK(std::abs(loss_exact(op, X) - loss_exact(op, X * R)) < 1e-9);
    for (int q : {1, 3})
        CHECK(std::abs(evaluate_loss(op, X, ZMode::Mixture, q, 5, false).loss -
                       evaluate_loss(op, X * R, ZMode::Mixture, q, 5, false).loss) < 1e-9);
}

TEST_CASE("partition function estimates") {
    SUBCASE("identical rows") {
        Eigen::MatrixXd X = Eigen::MatrixXd::Zero(7, 3);
        X.col(0).setOnes();
        Eigen::VectorXd Z = estimate_partition(X, 1, 0);
        for (Eigen::Index i = 0; i < 7; ++i) CHECK(Z(i) == doctest::Approx(7 * std::exp(1.0)).epsilon(1e-15));
        CHECK(max_abs(exact_partition(X) - Z) < 1e-12);
    }
    SUBCASE("q = n is exact") {
        auto X = testing::random_unit_rows(40, 5, 3);
        Eigen::VectorXd Z = exact_partition(X);
        Eigen::VectorXd Zq = estimate_partition(X, 40, 1);
        CHECK(((Zq - Z).array() / Z.array()).abs().maxCoeff() < 1e-12);
    }
    SUBCASE("q = 1 on isotropic embeddings") {
        auto X = testing::random_unit_rows(500, 16, 4);
        Eigen::VectorXd Z = exact_partition(X);
        Eigen::VectorXd Zq = estimate_partition(X, 1, 0);
        auto good = ((Zq - Z).array() / Z.array()).abs() < 0.05;
        CHECK(good.count() >= 475);
    }
    SUBCASE("mixture summary") {
        auto X = testing::random_unit_rows(60, 4, 5);
        auto s = summarize_mixture(X, 3, 2);
        CHECK(std::accumulate(s.sizes.begin(), s.sizes.end(), 0.0) == 60.0);
        for (const auto& O : s.covariances) {
            CHECK(max_abs(O - O.transpose()) == 0.0);
            CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(O).eigenvalues().minCoeff() > -1e-12);
        }
        CHECK_THROWS_AS(summarize_mixture(X, 61, 0), UsageError);
    }
}

TEST_CASE("gradient matches central differences") {
    const double h = 1e-5;
    for (std::uint64_t s = 0; s < 4; ++s) {
        auto op = random_operator(12, 40 + s);
        auto X = testing::random_unit_rows(12, 4, s);
        for (auto mode : {ZMode::Exact, ZMode::Mixture}) {
            auto G = evaluate_loss(op, X, mode, 1, 3, true).gradient;
            CHECK(max_abs(G - central_difference(op, X, mode, 1, h)) < 1e-5);
        }
        auto G3 = evaluate_loss(op, X, ZMode::Mixture, 3, 3, true).gradient;
        CHECK(max_abs(G3 - central_difference(op, X, ZMode::Mixture, 3, h)) < 1e-5);
    }
}

TEST_CASE("gradient symmetry at identical rows") {
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(9, 3);
    X.col(1).setOnes();
    SUBCASE("doubly stochastic P: whole gradient equal across rows") {
        std::vector<std::vector<WeightedEdge>> s(2);
        for (NodeId i = 0; i < 9; ++i) s[0].push_back({i, static_cast<NodeId>((i + 1) % 9), 1.0});
        for (NodeId i = 0; i < 9; ++i) s[1].push_back({i, static_cast<NodeId>((i + 3) % 9), 2.0});
        auto op = TransitionOperator::build(testing::RawGraph{9, s}.build());
        for (auto mode : {ZMode::Exact, ZMode::Mixture}) {
            auto G = evaluate_loss(op, X, mode, 1, 0, true).gradient;
            for (Eigen::Index i = 1; i < 9; ++i) CHECK(max_abs(G.row(i) - G.row(0)) < 1e-12);
        }
    }
    SUBCASE("general P: all but the P^T X term equal across rows") {
        auto op = random_operator(9, 7);
        auto G = evaluate_loss(op, X, ZMode::Exact, 1, 0, true).gradient + op.apply_transpose(X);
        for (Eigen::Index i = 1; i < 9; ++i) CHECK(max_abs(G.row(i) - G.row(0)) < 1e-12);
    }
}

TEST_CASE("regularizer gradient") {
    // With P = I the cross-entropy terms of rows are decoupled from the
    // regularizer; remove them explicitly and compare with (2/n) sum_j x_j.
    testing::RawGraph raw{6, std::vector<std::vector<WeightedEdge>>(1)};
    auto op = TransitionOperator::build(raw.build());
    auto X = testing::random_unit_rows(6, 3, 8);
    Eigen::MatrixXd S = X * X.transpose();
    Eigen::MatrixXd Q = S.array().exp();
    for (Eigen::Index i = 0; i < 6; ++i) Q.row(i) /= Q.row(i).sum();
    Eigen::MatrixXd cross_entropy = -2 * X + (Q + Q.transpose()) * X;
    Eigen::MatrixXd reg = evaluate_loss(op, X, ZMode::Exact, 1, 0, true).gradient - cross_entropy;
    Eigen::RowVectorXd expected = 2.0 / 6 * X.colwise().sum();
    for (Eigen::Index i = 0; i < 6; ++i) CHECK(max_abs(reg.row(i) - expected) < 1e-12);
}

TEST_CASE("embedding optimizer") {
    auto raw = testing::random_raw_graph(40, 8, 0.06, 12);
    auto g = raw.build();
    EmbedConfig cfg;
    cfg.dim = 6;
    cfg.seed = 17;
    cfg.tolerance = 0.0;
    auto r = embed_detailed(g, cfg);

    SUBCASE("loss never increases across accepted steps") {
        REQUIRE(r.loss_history.size() > 1);
        for (std::size_t k = 1; k < r.loss_history.size(); ++k) CHECK(r.loss_history[k] <= r.loss_history[k - 1]);
        CHECK(r.loss_history.back() < r.loss_history.front());
    }
    SUBCASE("rows are unit vectors") {
        CHECK((r.embedding.matrix().rowwise().norm().array() - 1.0).abs().maxCoeff() < 1e-12);
    }
    SUBCASE("same seed, same bits; thread count irrelevant") {
        auto again = embed_detailed(g, cfg);
        CHECK(again.embedding.matrix() == r.embedding.matrix());
        cfg.threads = 3;
        CHECK(embed_detailed(g, cfg).embedding.matrix() == r.embedding.matrix());
    }
    SUBCASE("permuted copy: loss of the permuted embedding") {
        std::vector<NodeId> perm(40);
        std::iota(perm.begin(), perm.end(), 0);
        std::mt19937_64 rng(3);
        std::shuffle(perm.begin(), perm.end(), rng);
        auto h = relabel(g, perm);
        auto emb_h = embed(h, cfg);
        // row perm[i] of emb_h is node i
        Eigen::MatrixXd back(40, 6);
        for (NodeId i = 0; i < 40; ++i) back.row(i) = emb_h.matrix().row(perm[i]);
        auto op_g = TransitionOperator::build(g);
        auto op_h = TransitionOperator::build(h);
        CHECK(std::abs(loss_exact(op_g, back) - loss_exact(op_h, emb_h.matrix())) < 1e-8);
    }
    SUBCASE("mixture mode and auto selection") {
        cfg.z_mode = ZMode::Mixture;
        cfg.mixture_groups = 2;
        auto m = embed_detailed(g, cfg);
        CHECK(m.z_mode == ZMode::Mixture);
        CHECK(m.loss_history.back() < m.loss_history.front());
        CHECK(resolve_z_mode(ZMode::Auto, 2000, 2000) == ZMode::Exact);
        CHECK(resolve_z_mode(ZMode::Auto, 2001, 2000) == ZMode::Mixture);
    }
    SUBCASE("invalid configurations") {
        cfg.dim = 0;
        CHECK_THROWS_AS(embed(g, cfg), UsageError);
        cfg.dim = 2;
        cfg.z_mode = ZMode::Mixture;
        cfg.mixture_groups = 41;
        CHECK_THROWS_AS(embed(g, cfg), UsageError);
    }
}

TEST_CASE("embedding validation and CSV") {
    Eigen::MatrixXd bad(2, 2);
    bad << 1, 0, 0.5, 0.5;
    CHECK_THROWS_AS(Embedding{bad}, DataError);
    auto e = Embedding::normalized(bad);
    CHECK(e.matrix().row(1).norm() == doctest::Approx(1.0));
    testing::TempDir dir("edrep");
    Embedding x(testing::random_unit_rows(11, 4, 2));
    write_embedding_csv(x, dir / "x.csv");
    CHECK(read_embedding_csv(dir / "x.csv").matrix() == x.matrix());
}
