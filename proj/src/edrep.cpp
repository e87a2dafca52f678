#include "tgdist/edrep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "tgdist/cluster.hpp"
#include "tgdist/error.hpp"
#include "tgdist/rng.hpp"

namespace tgdist {

Embedding::Embedding(Eigen::MatrixXd rows) : x_(std::move(rows)) {
    if (!x_.allFinite()) throw DataError("embedding has non-finite entries");
    for (Eigen::Index i = 0; i < x_.rows(); ++i)
        if (std::abs(x_.row(i).norm() - 1.0) > 1e-9)
            throw DataError("embedding row " + std::to_string(i) + " is not unit-norm");
}

Embedding Embedding::normalized(Eigen::MatrixXd rows) {
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        double nrm = rows.row(i).norm();
        if (!(nrm > 0.0) || !std::isfinite(nrm)) throw DataError("cannot normalize a zero or non-finite row");
        rows.row(i) /= nrm;
    }
    return Embedding(std::move(rows));
}

ZMode resolve_z_mode(ZMode mode, Eigen::Index n, int exact_max_nodes) {
    if (mode != ZMode::Auto) return mode;
    return n <= exact_max_nodes ? ZMode::Exact : ZMode::Mixture;
}

MixtureSummary summarize_mixture(const Eigen::MatrixXd& X, int q, std::uint64_t seed) {
    const Eigen::Index n = X.rows();
    const Eigen::Index d = X.cols();
    if (q < 1) throw UsageError("mixture needs q >= 1");
    if (q > n) throw UsageError("mixture groups q=" + std::to_string(q) + " exceed n=" + std::to_string(n));

    MixtureSummary s;
    if (q == 1) {
        s.assignment.assign(static_cast<std::size_t>(n), 0);
    } else {
        s.assignment = kmeans(X, q, seed, {.restarts = 1, .max_iterations = 50}).labeling.labels;
    }
    s.sizes.assign(q, 0.0);
    s.means.assign(q, Eigen::VectorXd::Zero(d));
    s.covariances.assign(q, Eigen::MatrixXd::Zero(d, d));
    for (Eigen::Index i = 0; i < n; ++i) {
        int a = s.assignment[i];
        s.sizes[a] += 1.0;
        s.means[a] += X.row(i).transpose();
    }
    for (int a = 0; a < q; ++a)
        if (s.sizes[a] > 0) s.means[a] /= s.sizes[a];
    for (Eigen::Index i = 0; i < n; ++i) {
        int a = s.assignment[i];
        Eigen::VectorXd c = X.row(i).transpose() - s.means[a];
        s.covariances[a].noalias() += c * c.transpose();
    }
    for (int a = 0; a < q; ++a)
        if (s.sizes[a] > 0) s.covariances[a] /= s.sizes[a];
    return s;
}

namespace {

struct PartitionTerms {
    Eigen::VectorXd log_z;
    Eigen::MatrixXd gradient;  // d/dX sum_i log Z_i, if requested
};

PartitionTerms exact_terms(const Eigen::MatrixXd& X, bool with_gradient) {
    const Eigen::Index n = X.rows();
    Eigen::MatrixXd G = X * X.transpose();
    PartitionTerms out;
    out.log_z.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double m = G.row(i).maxCoeff();
        out.log_z(i) = m + std::log((G.row(i).array() - m).exp().sum());
    }
    if (with_gradient) {
        // G becomes Q in place
        for (Eigen::Index j = 0; j < n; ++j) G.col(j) = (G.col(j) - out.log_z).array().exp().matrix();
        out.gradient.noalias() = G * X;
        out.gradient.noalias() += G.transpose() * X;
    }
    return out;
}

PartitionTerms mixture_terms(const Eigen::MatrixXd& X, int q, std::uint64_t seed, bool with_gradient) {
    const Eigen::Index n = X.rows();
    const Eigen::Index d = X.cols();
    auto s = summarize_mixture(X, q, seed);

    // e(i,a) = log pi_a + x_i.mu_a + x_i^T Omega_a x_i / 2
    Eigen::MatrixXd e(n, q);
    std::vector<Eigen::MatrixXd> x_omega(q);
    for (int a = 0; a < q; ++a) {
        if (s.sizes[a] == 0.0) {
            e.col(a).setConstant(-std::numeric_limits<double>::infinity());
            continue;
        }
        x_omega[a].noalias() = X * s.covariances[a];
        e.col(a) = (X * s.means[a]).array() + 0.5 * (x_omega[a].array() * X.array()).rowwise().sum() +
                   std::log(s.sizes[a]);
    }
    PartitionTerms out;
    out.log_z.resize(n);
    Eigen::MatrixXd r(n, q);
    for (Eigen::Index i = 0; i < n; ++i) {
        double m = e.row(i).maxCoeff();
        r.row(i) = (e.row(i).array() - m).exp().matrix();
        double total = r.row(i).sum();
        out.log_z(i) = m + std::log(total);
        r.row(i) /= total;
    }
    if (!with_gradient) return out;

    out.gradient = Eigen::MatrixXd::Zero(n, d);
    for (int a = 0; a < q; ++a) {
        if (s.sizes[a] == 0.0) continue;
        // direct: r_ia (mu_a + Omega_a x_i)
        out.gradient += r.col(a).asDiagonal() * (x_omega[a].rowwise() + s.means[a].transpose());
        Eigen::VectorXd A = X.transpose() * r.col(a);
        Eigen::MatrixXd B = X.transpose() * r.col(a).asDiagonal() * X;
        for (Eigen::Index k = 0; k < n; ++k) {
            if (s.assignment[k] != a) continue;
            out.gradient.row(k) +=
                ((A + B * (X.row(k).transpose() - s.means[a])) / s.sizes[a]).transpose();
        }
    }
    return out;
}

}  // namespace

Eigen::VectorXd exact_partition(const Eigen::MatrixXd& X) {
    return exact_terms(X, false).log_z.array().exp().matrix();
}

Eigen::VectorXd estimate_partition(const Eigen::MatrixXd& X, int q, std::uint64_t seed) {
    return mixture_terms(X, q, seed, false).log_z.array().exp().matrix();
}

LossEvaluation evaluate_loss(const TransitionOperator& op, const Eigen::MatrixXd& X, ZMode mode, int q,
                             std::uint64_t seed, bool with_gradient, unsigned threads) {
    if (X.rows() != op.size())
        throw UsageError("embedding has " + std::to_string(X.rows()) + " rows but the graph has n=" +
                         std::to_string(op.size()));
    mode = resolve_z_mode(mode, X.rows(), 2000);
    const double n = static_cast<double>(X.rows());

    Eigen::MatrixXd PX = op.apply(X, threads);
    PartitionTerms part = mode == ZMode::Exact ? exact_terms(X, with_gradient)
                                               : mixture_terms(X, q, seed, with_gradient);
    Eigen::RowVectorXd total = X.colwise().sum();

    LossEvaluation out;
    out.loss = -(X.array() * PX.array()).sum() + part.log_z.sum() + total.squaredNorm() / n;
    if (with_gradient) {
        out.gradient = std::move(part.gradient);
        out.gradient -= PX;
        out.gradient -= op.apply_transpose(X, threads);
        out.gradient.rowwise() += (2.0 / n) * total;
    }
    return out;
}

double loss_exact(const TransitionOperator& op, const Eigen::MatrixXd& X, unsigned threads) {
    return evaluate_loss(op, X, ZMode::Exact, 1, 0, false, threads).loss;
}

Eigen::MatrixXd loss_gradient(const TransitionOperator& op, const Eigen::MatrixXd& X, ZMode mode, int q,
                              std::uint64_t seed, unsigned threads) {
    return evaluate_loss(op, X, mode, q, seed, true, threads).gradient;
}

namespace {

Eigen::MatrixXd normalize_rows(Eigen::MatrixXd X) {
    for (Eigen::Index i = 0; i < X.rows(); ++i) X.row(i) /= X.row(i).norm();
    return X;
}

Eigen::MatrixXd random_unit_rows(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd X(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        do {
            for (Eigen::Index c = 0; c < d; ++c) X(i, c) = normal(rng);
        } while (X.row(i).norm() < 1e-12);
    }
    return normalize_rows(std::move(X));
}

}  // namespace

EmbedResult embed_detailed(const TransitionOperator& op, const EmbedConfig& cfg) {
    if (cfg.dim < 1) throw UsageError("embedding dimension must be >= 1");
    if (cfg.mixture_groups < 1) throw UsageError("mixture groups q must be >= 1");
    if (cfg.epochs < 1) throw UsageError("epochs must be >= 1");
    if (!(cfg.step > 0.0)) throw UsageError("step size must be positive");

    const Eigen::Index n = op.size();
    const ZMode mode = resolve_z_mode(cfg.z_mode, n, cfg.exact_z_max_nodes);
    if (mode == ZMode::Mixture && cfg.mixture_groups > n)
        throw UsageError("mixture groups q exceed the number of nodes");
    const std::uint64_t mix_seed = derive_seed(cfg.seed, 1);

    Eigen::MatrixXd X = random_unit_rows(n, cfg.dim, derive_seed(cfg.seed, 0));
    auto current = evaluate_loss(op, X, mode, cfg.mixture_groups, mix_seed, true, cfg.threads);
    if (!std::isfinite(current.loss)) throw NumericError("embedding loss is not finite at the initial point");

    std::vector<double> history{current.loss};
    int epochs_run = 0;
    bool converged = false;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        ++epochs_run;
        double eta = cfg.step * 0.5 * (1.0 + std::cos(std::numbers::pi * epoch / cfg.epochs));
        // tangent component of the gradient on each row's sphere
        Eigen::VectorXd radial = (current.gradient.array() * X.array()).rowwise().sum();
        Eigen::MatrixXd direction = current.gradient - radial.asDiagonal() * X;
        // eta is the tangent displacement of the row with the largest gradient
        const double largest = direction.rowwise().norm().maxCoeff();
        if (!(largest > 0.0)) {
            converged = true;
            break;
        }
        direction /= largest;

        bool accepted = false;
        for (int b = 0; b <= cfg.max_backtracks; ++b, eta *= 0.5) {
            Eigen::MatrixXd candidate = normalize_rows(X - eta * direction);
            auto trial = evaluate_loss(op, candidate, mode, cfg.mixture_groups, mix_seed, true, cfg.threads);
            if (std::isfinite(trial.loss) && trial.loss <= current.loss) {
                double rel = (current.loss - trial.loss) / std::max(std::abs(current.loss), 1e-300);
                X = std::move(candidate);
                current = std::move(trial);
                history.push_back(current.loss);
                accepted = true;
                converged = rel < cfg.tolerance;
                break;
            }
        }
        if (!accepted) {
            converged = true;  // no descent along the projected gradient at any tried step
            break;
        }
        if (converged) break;
    }
    return EmbedResult{Embedding(std::move(X)), std::move(history), epochs_run, converged, mode};
}

EmbedResult embed_detailed(const TemporalGraph& g, const EmbedConfig& cfg) {
    auto op = TransitionOperator::build(g, cfg.operator_mode);
    return embed_detailed(op, cfg);
}

Embedding embed(const TemporalGraph& g, const EmbedConfig& cfg) { return embed_detailed(g, cfg).embedding; }

void write_embedding_csv(const Embedding& e, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << "node";
    for (Eigen::Index c = 0; c < e.dim(); ++c) out << ",x" << c;
    out << '\n';
    char buf[32];
    for (Eigen::Index i = 0; i < e.size(); ++i) {
        out << i;
        for (Eigen::Index c = 0; c < e.dim(); ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", e.matrix()(i, c));
            out << ',' << buf;
        }
        out << '\n';
    }
}

Embedding read_embedding_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open embedding " + path.string());
    std::string line;
    if (!std::getline(in, line) || line.rfind("node", 0) != 0)
        throw ParseError(1, "embedding CSV must start with a \"node,x0,...\" header");
    std::size_t dim = static_cast<std::size_t>(std::count(line.begin(), line.end(), ','));
    if (dim == 0) throw ParseError(1, "embedding CSV has no coordinate columns");
    std::vector<std::vector<double>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        std::stringstream ls(line);
        std::string cell;
        std::vector<double> row;
        std::getline(ls, cell, ',');
        try {
            if (std::stoll(cell) != static_cast<long long>(rows.size()))
                throw ParseError(lineno, "node ids must be 0..n-1 in order");
            while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        } catch (const std::logic_error&) {
            throw ParseError(lineno, "malformed number");
        }
        if (row.size() != dim) throw ParseError(lineno, "expected " + std::to_string(dim) + " coordinates");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw DataError("embedding " + path.string() + " has no rows");
    Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t c = 0; c < dim; ++c) X(i, c) = rows[i][c];
    return Embedding(std::move(X));
}

}  // namespace tgdist
