#include "tgdist/experiments.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "tgdist/error.hpp"
#include "tgdist/parallel.hpp"
#include "tgdist/rng.hpp"

namespace tgdist {

using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation
};

MeanStd mean_std(const std::vector<double>& v) {
    MeanStd r;
    if (v.empty()) return r;
    r.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - r.mean) * (x - r.mean);
        r.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    return r;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

Embedding embed_one(const TemporalGraph& g, EmbedConfig cfg, std::uint64_t seed) {
    cfg.seed = seed;
    cfg.threads = 1;
    return embed(g, cfg);
}

CsvTable lambda_table(const std::string& name, const std::vector<std::string>& ids,
                      const std::vector<Embedding>& embeddings) {
    CsvTable t{name, {"graph_id"}, {}};
    if (embeddings.empty()) return t;
    for (Eigen::Index k = 0; k < embeddings.front().dim(); ++k) t.header.push_back("l" + std::to_string(k + 1));
    for (std::size_t g = 0; g < embeddings.size(); ++g) {
        auto lam = lambda_vector(embeddings[g]);
        std::vector<std::string> row{ids[g]};
        for (Eigen::Index k = 0; k < lam.values.size(); ++k) row.push_back(fmt(lam.values(k)));
        t.rows.push_back(std::move(row));
    }
    return t;
}

template <class T>
void read(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

void check_object(const json& j, const char* what) {
    if (!j.is_object()) throw UsageError(std::string(what) + " config must be a JSON object");
}

json activity_json(const ActivitySource& a) {
    return {{"path", a.path},
            {"t_res", a.t_res},
            {"synthetic",
             {{"num_snapshots", a.synthetic.num_snapshots},
              {"bank_size", a.synthetic.bank_size},
              {"on_exponent", a.synthetic.on_exponent},
              {"off_exponent", a.synthetic.off_exponent}}}};
}

void merge_activity(ActivitySource& a, const json& j) {
    check_object(j, "activity");
    read(j, "path", a.path);
    read(j, "t_res", a.t_res);
    if (j.contains("synthetic")) {
        const auto& s = j.at("synthetic");
        check_object(s, "activity.synthetic");
        read(s, "num_snapshots", a.synthetic.num_snapshots);
        read(s, "bank_size", a.synthetic.bank_size);
        read(s, "on_exponent", a.synthetic.on_exponent);
        read(s, "off_exponent", a.synthetic.off_exponent);
    }
}

json cluster_json(const ClusterOptions& c) {
    return {{"nmf_iterations", c.nmf_iterations},
            {"gaussian_kernel", c.gaussian_kernel},
            {"kmeans_restarts", c.kmeans.restarts},
            {"kmeans_max_iterations", c.kmeans.max_iterations}};
}

void merge_cluster(ClusterOptions& c, const json& j) {
    check_object(j, "cluster");
    read(j, "nmf_iterations", c.nmf_iterations);
    read(j, "gaussian_kernel", c.gaussian_kernel);
    read(j, "kmeans_restarts", c.kmeans.restarts);
    read(j, "kmeans_max_iterations", c.kmeans.max_iterations);
}

}  // namespace

std::vector<std::filesystem::path> write_report(const ExperimentReport& report, const std::filesystem::path& prefix) {
    std::vector<std::filesystem::path> written;
    json doc = {{"experiment", report.name},
                {"seed", report.seed},
                {"parameters", report.parameters},
                {"results", report.results}};
    auto json_path = std::filesystem::path(prefix.string() + ".json");
    {
        std::ofstream out(json_path);
        if (!out) throw DataError("cannot write " + json_path.string());
        out << doc.dump(2) << '\n';
    }
    written.push_back(json_path);
    for (const auto& table : report.tables) {
        auto path = std::filesystem::path(prefix.string() + "." + table.name + ".csv");
        std::ofstream out(path);
        if (!out) throw DataError("cannot write " + path.string());
        auto line = [&](const std::vector<std::string>& cells) {
            for (std::size_t c = 0; c < cells.size(); ++c) out << (c ? "," : "") << cells[c];
            out << '\n';
        };
        line(table.header);
        for (const auto& row : table.rows) line(row);
        written.push_back(path);
    }
    return written;
}

TemporalGraph load_activity(const ActivitySource& source, std::uint64_t seed) {
    if (source.path.empty()) return synthetic_activity(source.synthetic, seed);
    return load_contact_list(source.path, source.t_res);
}

ClassesConfig ClassesConfig::paper_scale() {
    ClassesConfig c;
    c.instances_per_model = 250;
    c.n_min = 200;
    c.n_max = 1800;
    return c;
}

RelabelConfig RelabelConfig::paper_scale() {
    RelabelConfig c;
    c.n = 1000;
    c.repetitions = 25;
    c.alphas = {0.0, 0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    return c;
}

RandomizationConfig RandomizationConfig::paper_scale() {
    RandomizationConfig c;
    c.replicas = 250;
    return c;
}

TemporalGraph bursty_test_graph(std::uint64_t seed, NodeId n, std::size_t num_snapshots) {
    ActivityProfile profile;
    profile.num_snapshots = num_snapshots;
    auto bank = synthetic_activity(profile, derive_seed(seed, 0));
    auto sg = preset(ModelKind::SBM, n, kDefaultMeanDegree, derive_seed(seed, 1));
    return temporalize(sg, bank, derive_seed(seed, 2));
}

std::vector<NodeId> partial_relabeling(NodeId n, double alpha, std::uint64_t seed) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw UsageError("alpha must lie in [0, 1]");
    std::vector<NodeId> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    auto count = static_cast<std::size_t>(std::llround(alpha * n));
    if (count < 2) return perm;
    Rng rng(seed);
    std::vector<NodeId> nodes = perm;
    std::shuffle(nodes.begin(), nodes.end(), rng);
    nodes.resize(count);
    for (std::size_t k = 0; k < count; ++k) perm[nodes[k]] = nodes[(k + 1) % count];
    return perm;
}

ExperimentReport experiment_model_classes(const ClassesConfig& cfg, std::uint64_t seed) {
    if (cfg.instances_per_model < 1) throw UsageError("classes: instances_per_model must be >= 1");
    if (cfg.n_min < 10 || cfg.n_max < cfg.n_min) throw UsageError("classes: need 10 <= n_min <= n_max");
    if (cfg.dims.empty()) throw UsageError("classes: empty dimension sweep");
    const auto bank = load_activity(cfg.activity, derive_seed(seed, 0));
    const std::size_t per = static_cast<std::size_t>(cfg.instances_per_model);
    const std::size_t m = std::size(kAllModels) * per;

    std::vector<int> labels(m);
    std::vector<NodeId> sizes(m);
    std::vector<std::size_t> edge_counts(m);
    std::vector<std::vector<std::optional<Embedding>>> emb(cfg.dims.size(), std::vector<std::optional<Embedding>>(m));
    parallel_for(m, cfg.threads, [&](std::size_t idx) {
        const auto model = kAllModels[idx / per];
        Rng rng(derive_seed(seed, 1, idx));
        const auto n = uniform_int<NodeId>(rng, cfg.n_min, cfg.n_max);
        auto sg = preset(model, n, cfg.mean_degree, derive_seed(seed, 2, idx));
        auto g = temporalize(sg, bank, derive_seed(seed, 3, idx), cfg.circular_shift);
        labels[idx] = static_cast<int>(idx / per);
        sizes[idx] = n;
        edge_counts[idx] = g.temporal_edge_count();
        auto op = TransitionOperator::build(g, cfg.embed.operator_mode);
        for (std::size_t k = 0; k < cfg.dims.size(); ++k) {
            EmbedConfig ec = cfg.embed;
            ec.dim = cfg.dims[k];
            ec.seed = derive_seed(seed, 4, idx);
            ec.threads = 1;
            emb[k][idx] = embed_detailed(op, ec).embedding;
        }
    });

    ExperimentReport report;
    report.name = "classes";
    report.seed = seed;
    report.parameters = to_json(cfg);
    std::vector<std::string> ids(m);
    for (std::size_t i = 0; i < m; ++i) ids[i] = to_string(kAllModels[i / per]) + "_" + std::to_string(i % per);

    CsvTable instances{"instances", {"graph_id", "model", "n", "temporal_edges"}, {}};
    for (std::size_t i = 0; i < m; ++i)
        instances.rows.push_back(
            {ids[i], to_string(kAllModels[labels[i]]), std::to_string(sizes[i]), std::to_string(edge_counts[i])});

    CsvTable curve{"nmi", {"d", "nmi"}, {}};
    json nmi_by_d = json::array();
    for (std::size_t k = 0; k < cfg.dims.size(); ++k) {
        std::vector<Embedding> es;
        es.reserve(m);
        for (auto& e : emb[k]) es.push_back(std::move(*e));
        auto D = pairwise_distances(es, cfg.distance, ids, cfg.threads);
        auto found = cluster_distances(D.values, static_cast<int>(std::size(kAllModels)), derive_seed(seed, 5, k),
                                       cfg.cluster);
        double score = nmi(found.labels, labels);
        nmi_by_d.push_back({{"d", cfg.dims[k]}, {"nmi", score}});
        curve.rows.push_back({std::to_string(cfg.dims[k]), fmt(score)});
        report.tables.push_back(lambda_table("lambda_d" + std::to_string(cfg.dims[k]), ids, es));
    }
    report.results = {{"nmi", nmi_by_d}, {"num_graphs", m}};
    report.tables.insert(report.tables.begin(), {curve, instances});
    return report;
}

ExperimentReport experiment_relabel(const RelabelConfig& cfg, std::uint64_t seed) {
    if (cfg.n < 10) throw UsageError("relabel: n must be >= 10");
    if (cfg.repetitions < 1) throw UsageError("relabel: repetitions must be >= 1");
    for (double a : cfg.alphas)
        if (!(a >= 0.0 && a <= 1.0)) throw UsageError("relabel: alphas must lie in [0, 1]");
    const auto bank = load_activity(cfg.activity, derive_seed(seed, 0));
    const std::size_t reps = static_cast<std::size_t>(cfg.repetitions);
    const std::size_t jobs = cfg.alphas.size() * reps;

    ExperimentReport report;
    report.name = "relabel";
    report.seed = seed;
    report.parameters = to_json(cfg);
    CsvTable curve{"alpha_curve", {"model", "alpha", "mean", "std"}, {}};
    CsvTable runs{"runs", {"model", "alpha", "repetition", "dm_over_n"}, {}};
    json results = json::object();

    for (std::size_t mi = 0; mi < cfg.models.size(); ++mi) {
        const auto model = cfg.models[mi];
        const auto mid = static_cast<std::uint64_t>(model);
        auto sg = preset(model, cfg.n, cfg.mean_degree, derive_seed(seed, 1, mid));
        auto g = temporalize(sg, bank, derive_seed(seed, 2, mid));
        EmbedConfig ec = cfg.embed;
        ec.threads = cfg.threads;
        ec.seed = derive_seed(seed, 3, mid);
        const auto base = embed(g, ec);

        std::vector<double> value(jobs);
        parallel_for(jobs, cfg.threads, [&](std::size_t job) {
            const double alpha = cfg.alphas[job / reps];
            const std::uint64_t stream = derive_seed(seed, 4 + mid, job);
            auto perm = partial_relabeling(cfg.n, alpha, derive_seed(stream, 0));
            bool identity = true;
            for (NodeId i = 0; i < cfg.n; ++i) identity = identity && perm[i] == i;
            if (identity) {
                value[job] = matched_distance(base, base) / cfg.n;
                return;
            }
            auto moved = relabel(g, perm);
            value[job] = matched_distance(base, embed_one(moved, cfg.embed, derive_seed(stream, 1))) / cfg.n;
        });

        json curve_json = json::array();
        for (std::size_t a = 0; a < cfg.alphas.size(); ++a) {
            std::vector<double> v(value.begin() + static_cast<long>(a * reps),
                                  value.begin() + static_cast<long>((a + 1) * reps));
            auto s = mean_std(v);
            curve_json.push_back({{"alpha", cfg.alphas[a]}, {"mean", s.mean}, {"std", s.std}, {"values", v}});
            curve.rows.push_back({to_string(model), fmt(cfg.alphas[a]), fmt(s.mean), fmt(s.std)});
            for (std::size_t r = 0; r < reps; ++r)
                runs.rows.push_back({to_string(model), fmt(cfg.alphas[a]), std::to_string(r), fmt(v[r])});
        }
        results[to_string(model)] = curve_json;
    }
    report.results = results;
    report.tables = {curve, runs};
    return report;
}

ExperimentReport experiment_randomization_pairs(const TemporalGraph& g, const RandomizationConfig& cfg,
                                                std::uint64_t seed) {
    if (cfg.replicas < 2) throw UsageError("randomization: replicas must be >= 2");
    if (cfg.kinds.empty()) throw UsageError("randomization: no kinds selected");
    const std::size_t R = static_cast<std::size_t>(cfg.replicas);
    const std::size_t K = cfg.kinds.size();
    // 2R replicas per kind: pairs of distinct kinds use the first R of each,
    // a kind against itself uses its two disjoint halves.
    const std::size_t m = K * 2 * R;
    std::vector<std::optional<Embedding>> emb(m);
    parallel_for(m, cfg.threads, [&](std::size_t idx) {
        const auto kind = cfg.kinds[idx / (2 * R)];
        const auto kid = static_cast<std::uint64_t>(kind);
        auto rg = randomize(g, kind, derive_seed(seed, 1 + kid, idx % (2 * R)));
        emb[idx] = embed_one(rg, cfg.embed, derive_seed(seed, 10 + kid, idx % (2 * R)));
    });
    std::vector<Embedding> es;
    es.reserve(m);
    std::vector<std::string> ids(m);
    for (std::size_t i = 0; i < m; ++i) {
        es.push_back(std::move(*emb[i]));
        ids[i] = std::string(to_string(cfg.kinds[i / (2 * R)])) + "_" + std::to_string(i % (2 * R));
    }

    ExperimentReport report;
    report.name = "randomization";
    report.seed = seed;
    report.parameters = to_json(cfg);
    report.parameters["graph"] = {{"n", g.num_nodes()},
                                  {"T", g.num_snapshots()},
                                  {"temporal_edges", g.temporal_edge_count()},
                                  {"total_weight", g.total_weight()}};
    json results = json::object();
    for (auto dk : {DistanceKind::Matched, DistanceKind::Unmatched}) {
        const auto D = pairwise_distances(es, dk, ids, cfg.threads).values;
        Eigen::MatrixXd table = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(K));
        for (std::size_t a = 0; a < K; ++a) {
            for (std::size_t b = a; b < K; ++b) {
                std::vector<std::size_t> members;
                for (std::size_t r = 0; r < R; ++r) members.push_back(a * 2 * R + r);
                for (std::size_t r = 0; r < R; ++r) members.push_back(b * 2 * R + (a == b ? R : 0) + r);
                Eigen::MatrixXd sub(members.size(), members.size());
                for (std::size_t x = 0; x < members.size(); ++x)
                    for (std::size_t y = 0; y < members.size(); ++y)
                        sub(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) = D(
                            static_cast<Eigen::Index>(members[x]), static_cast<Eigen::Index>(members[y]));
                std::vector<int> truth(members.size());
                for (std::size_t x = 0; x < members.size(); ++x) truth[x] = x < R ? 0 : 1;
                auto found = cluster_distances(sub, 2, derive_seed(seed, 20 + static_cast<std::uint64_t>(dk), a * K + b),
                                               cfg.cluster);
                const double score = nmi(found.labels, truth);
                table(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = score;
                table(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = score;
            }
        }
        CsvTable csv{"nmi_" + to_string(dk), {"kind"}, {}};
        json rows = json::object();
        for (auto k : cfg.kinds) csv.header.emplace_back(to_string(k));
        for (std::size_t a = 0; a < K; ++a) {
            std::vector<std::string> row{std::string(to_string(cfg.kinds[a]))};
            json jrow = json::object();
            for (std::size_t b = 0; b < K; ++b) {
                const double v = table(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
                row.push_back(fmt(v));
                jrow[std::string(to_string(cfg.kinds[b]))] = v;
            }
            csv.rows.push_back(std::move(row));
            rows[std::string(to_string(cfg.kinds[a]))] = jrow;
        }
        results["nmi_" + to_string(dk)] = rows;
        report.tables.push_back(std::move(csv));
    }
    report.tables.push_back(lambda_table("lambda", ids, es));
    report.results = results;
    return report;
}

std::string to_string(ZMode mode) {
    switch (mode) {
        case ZMode::Auto: return "auto";
        case ZMode::Exact: return "exact";
        case ZMode::Mixture: return "mixture";
    }
    return "?";
}

ZMode parse_z_mode(const std::string& name) {
    auto key = lower(name);
    for (auto m : {ZMode::Auto, ZMode::Exact, ZMode::Mixture})
        if (key == to_string(m)) return m;
    throw UsageError("unknown z mode '" + name + "' (expected auto, exact or mixture)");
}

std::string to_string(OperatorMode mode) {
    switch (mode) {
        case OperatorMode::Auto: return "auto";
        case OperatorMode::Lazy: return "lazy";
        case OperatorMode::Materialized: return "materialized";
    }
    return "?";
}

OperatorMode parse_operator_mode(const std::string& name) {
    auto key = lower(name);
    for (auto m : {OperatorMode::Auto, OperatorMode::Lazy, OperatorMode::Materialized})
        if (key == to_string(m)) return m;
    throw UsageError("unknown operator mode '" + name + "' (expected auto, lazy or materialized)");
}

json to_json(const EmbedConfig& c) {
    return {{"dim", c.dim},
            {"mixture_groups", c.mixture_groups},
            {"epochs", c.epochs},
            {"step", c.step},
            {"max_backtracks", c.max_backtracks},
            {"tolerance", c.tolerance},
            {"seed", c.seed},
            {"z_mode", to_string(c.z_mode)},
            {"exact_z_max_nodes", c.exact_z_max_nodes},
            {"operator_mode", to_string(c.operator_mode)},
            {"threads", c.threads}};
}

void merge_json(EmbedConfig& c, const json& j) {
    check_object(j, "embed");
    read(j, "dim", c.dim);
    read(j, "mixture_groups", c.mixture_groups);
    read(j, "epochs", c.epochs);
    read(j, "step", c.step);
    read(j, "max_backtracks", c.max_backtracks);
    read(j, "tolerance", c.tolerance);
    read(j, "seed", c.seed);
    if (j.contains("z_mode")) c.z_mode = parse_z_mode(j.at("z_mode").get<std::string>());
    read(j, "exact_z_max_nodes", c.exact_z_max_nodes);
    if (j.contains("operator_mode")) c.operator_mode = parse_operator_mode(j.at("operator_mode").get<std::string>());
    read(j, "threads", c.threads);
}

json to_json(const ClassesConfig& c) {
    return {{"instances_per_model", c.instances_per_model},
            {"n_min", c.n_min},
            {"n_max", c.n_max},
            {"mean_degree", c.mean_degree},
            {"dims", c.dims},
            {"distance", to_string(c.distance)},
            {"circular_shift", c.circular_shift},
            {"activity", activity_json(c.activity)},
            {"embed", to_json(c.embed)},
            {"cluster", cluster_json(c.cluster)}};
}

void merge_json(ClassesConfig& c, const json& j) {
    check_object(j, "classes");
    read(j, "instances_per_model", c.instances_per_model);
    read(j, "n_min", c.n_min);
    read(j, "n_max", c.n_max);
    read(j, "mean_degree", c.mean_degree);
    read(j, "dims", c.dims);
    if (j.contains("distance")) c.distance = parse_distance_kind(j.at("distance").get<std::string>());
    read(j, "circular_shift", c.circular_shift);
    if (j.contains("activity")) merge_activity(c.activity, j.at("activity"));
    if (j.contains("embed")) merge_json(c.embed, j.at("embed"));
    if (j.contains("cluster")) merge_cluster(c.cluster, j.at("cluster"));
    read(j, "threads", c.threads);
}

json to_json(const RelabelConfig& c) {
    json models = json::array();
    for (auto m : c.models) models.push_back(to_string(m));
    return {{"n", c.n},
            {"alphas", c.alphas},
            {"repetitions", c.repetitions},
            {"mean_degree", c.mean_degree},
            {"models", models},
            {"activity", activity_json(c.activity)},
            {"embed", to_json(c.embed)}};
}

void merge_json(RelabelConfig& c, const json& j) {
    check_object(j, "relabel");
    read(j, "n", c.n);
    read(j, "alphas", c.alphas);
    read(j, "repetitions", c.repetitions);
    read(j, "mean_degree", c.mean_degree);
    if (j.contains("models")) {
        c.models.clear();
        for (const auto& m : j.at("models")) c.models.push_back(parse_model_kind(m.get<std::string>()));
    }
    if (j.contains("activity")) merge_activity(c.activity, j.at("activity"));
    if (j.contains("embed")) merge_json(c.embed, j.at("embed"));
    read(j, "threads", c.threads);
}

json to_json(const RandomizationConfig& c) {
    json kinds = json::array();
    for (auto k : c.kinds) kinds.push_back(std::string(to_string(k)));
    return {{"replicas", c.replicas}, {"kinds", kinds}, {"embed", to_json(c.embed)}, {"cluster", cluster_json(c.cluster)}};
}

void merge_json(RandomizationConfig& c, const json& j) {
    check_object(j, "randomization");
    read(j, "replicas", c.replicas);
    if (j.contains("kinds")) {
        c.kinds.clear();
        for (const auto& k : j.at("kinds")) c.kinds.push_back(parse_randomization_kind(k.get<std::string>()));
    }
    if (j.contains("embed")) merge_json(c.embed, j.at("embed"));
    if (j.contains("cluster")) merge_cluster(c.cluster, j.at("cluster"));
    read(j, "threads", c.threads);
}

}  // namespace tgdist
