#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Dense>

#include "tgdist/graph.hpp"
#include "tgdist/transition.hpp"

namespace tgdist {

/// n x d matrix whose rows are unit vectors (within 1e-9).
class Embedding {
public:
    /// Throws DataError if a row is not unit-norm or has non-finite entries.
    explicit Embedding(Eigen::MatrixXd rows);
    /// Rescales every row to unit norm; zero rows are rejected.
    static Embedding normalized(Eigen::MatrixXd rows);

    const Eigen::MatrixXd& matrix() const { return x_; }
    Eigen::Index size() const { return x_.rows(); }
    Eigen::Index dim() const { return x_.cols(); }

private:
    Eigen::MatrixXd x_;
};

enum class ZMode { Auto, Exact, Mixture };

struct EmbedConfig {
    int dim = 32;
    int mixture_groups = 1;  // q
    int epochs = 30;
    double step = 0.5;       // largest row displacement of an epoch, cosine-decayed
    int max_backtracks = 30;
    double tolerance = 1e-5; // stop when the relative loss decrease drops below this
    std::uint64_t seed = 0;
    ZMode z_mode = ZMode::Auto;
    int exact_z_max_nodes = 2000;  // Auto uses the exact partition function up to this n
    OperatorMode operator_mode = OperatorMode::Auto;
    unsigned threads = 1;
};

/// Gaussian summary of the embedding cloud per group.
struct MixtureSummary {
    std::vector<int> assignment;          // group of every node
    std::vector<double> sizes;            // pi_a
    std::vector<Eigen::VectorXd> means;   // mu_a
    std::vector<Eigen::MatrixXd> covariances;  // Omega_a (population covariance)
};

/// q = 1 keeps all rows in one group; q > 1 groups rows with k-means.
MixtureSummary summarize_mixture(const Eigen::MatrixXd& X, int q, std::uint64_t seed);

/// Z_i = sum_k exp(x_i . x_k), exactly.
Eigen::VectorXd exact_partition(const Eigen::MatrixXd& X);

/// Z_i ~ sum_a pi_a exp(x_i . mu_a + x_i^T Omega_a x_i / 2).
Eigen::VectorXd estimate_partition(const Eigen::MatrixXd& X, int q, std::uint64_t seed);

/// Cross-entropy loss
///   L(X) = -sum_ij [ P_ij log Q_ij - x_i.x_j / n ],  Q_ij = exp(x_i.x_j) / Z_i,
/// with the exact partition function. Uses only P X, so it runs in lazy mode too.
double loss_exact(const TransitionOperator& op, const Eigen::MatrixXd& X, unsigned threads = 1);

struct LossEvaluation {
    double loss = 0.0;
    Eigen::MatrixXd gradient;  // empty unless requested
};

/// Loss with the exact Z (Exact) or the mixture estimate of Z (Mixture), and
/// optionally its Euclidean gradient
///
///   G = -(P + P^T) X + d/dX sum_i log Z_i + (2/n) 1 (1^T X).
///
/// Exact: d/dX sum_i log Z_i = (Q + Q^T) X.
/// Mixture: with r_ia the responsibility of group a in Z_i,
///   row i gains sum_a r_ia (mu_a + Omega_a x_i)                  (direct)
///   row k in group a gains (A_a + B_a (x_k - mu_a)) / pi_a       (through mu_a, Omega_a)
/// where A_a = sum_i r_ia x_i and B_a = sum_i r_ia x_i x_i^T. Group membership
/// is held fixed. Row sums of P are taken as exactly 1.
LossEvaluation evaluate_loss(const TransitionOperator& op, const Eigen::MatrixXd& X, ZMode mode, int q,
                             std::uint64_t seed, bool with_gradient, unsigned threads = 1);

Eigen::MatrixXd loss_gradient(const TransitionOperator& op, const Eigen::MatrixXd& X, ZMode mode, int q = 1,
                              std::uint64_t seed = 0, unsigned threads = 1);

struct EmbedResult {
    Embedding embedding;
    std::vector<double> loss_history;  // one entry per accepted iterate, starting at the initial point
    int epochs_run = 0;
    bool converged = false;
    ZMode z_mode = ZMode::Exact;
};

/// Projected gradient descent on the unit sphere per row. The tangent gradient is
/// scaled so its largest row has length eta (cosine-decayed from cfg.step), rows
/// are renormalized after the move, and eta halves until the loss does not increase.
EmbedResult embed_detailed(const TransitionOperator& op, const EmbedConfig& cfg);
EmbedResult embed_detailed(const TemporalGraph& g, const EmbedConfig& cfg);
Embedding embed(const TemporalGraph& g, const EmbedConfig& cfg);

ZMode resolve_z_mode(ZMode mode, Eigen::Index n, int exact_max_nodes);

/// CSV with header "node,x0,...,x{d-1}".
void write_embedding_csv(const Embedding& e, const std::filesystem::path& path);
Embedding read_embedding_csv(const std::filesystem::path& path);

}  // namespace tgdist
