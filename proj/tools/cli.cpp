#include "cli.hpp"

#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tgdist/distances.hpp"
#include "tgdist/edrep.hpp"
#include "tgdist/error.hpp"
#include "tgdist/experiments.hpp"
#include "tgdist/graph.hpp"
#include "tgdist/randomize.hpp"
#include "tgdist/rng.hpp"
#include "tgdist/synth.hpp"

namespace tgdist {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Shortest round-trip representation, always with a decimal point or exponent.
std::string number(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    std::string s(buf, end);
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw DataError("config " + path + " is not valid JSON: " + e.what());
    }
}

/// Numbers and booleans keep their JSON type; anything else stays a string.
json typed(const std::string& s) {
    json v = json::parse(s, nullptr, false);
    if (v.is_number() || v.is_boolean()) return v;
    return s;
}

/// Effective value of every option of a subcommand, after config overrides.
json effective_options(const CLI::App& sub) {
    json j = json::object();
    for (const CLI::Option* opt : sub.get_options()) {
        std::string name = opt->get_single_name();
        if (name.empty() || name == "help" || name == "config") continue;
        if (opt->count() > 0) {
            auto res = opt->results();
            if (res.size() == 1 && !opt->get_allow_extra_args()) {
                j[name] = typed(res.front());
            } else {
                j[name] = json::array();
                for (const auto& r : res) j[name].push_back(typed(r));
            }
        } else {
            j[name] = typed(opt->get_default_str());
        }
    }
    return j;
}

void write_sidecar(const fs::path& output, const std::string& command, const json& config, std::uint64_t seed) {
    json doc = {{"tool", "tgdist"}, {"command", command}, {"seed", seed}, {"config", config}};
    fs::path path = output.string() + ".config.json";
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

/// Config-file keys override the same-named options of `sub`.
void apply_config_overrides(CLI::App& sub, const json& cfg) {
    if (!cfg.is_object()) throw UsageError("config file must hold a JSON object");
    for (const auto& [key, value] : cfg.items()) {
        CLI::Option* opt = sub.get_option_no_throw("--" + key);
        if (opt == nullptr) throw UsageError("config key '" + key + "' is not an option of '" + sub.get_name() + "'");
        opt->clear();
        auto add = [&](const json& v) {
            opt->add_result(v.is_string() ? v.get<std::string>() : v.dump());
        };
        if (value.is_array())
            for (const auto& v : value) add(v);
        else
            add(value);
        opt->run_callback();
    }
}

/// A graph bundle written by ingest/generate, or a raw contact list.
TemporalGraph load_graph_any(const std::string& path, std::int64_t t_res) {
    fs::path p(path);
    if (p.extension() == ".json" || p.extension() == ".edges" || fs::exists(p.string() + ".json"))
        return read_graph(p);
    if (!fs::exists(p)) throw UsageError("input file not found: " + path);
    return load_contact_list(p, t_res);
}

struct EmbedFlags {
    EmbedConfig cfg;
    std::string z_mode = "auto";
    std::string operator_mode = "auto";

    void bind(CLI::App* sub) {
        sub->add_option("--dim,-d", cfg.dim, "embedding dimension")->check(CLI::PositiveNumber);
        sub->add_option("--q", cfg.mixture_groups, "mixture groups for the Z estimate")->check(CLI::PositiveNumber);
        sub->add_option("--epochs", cfg.epochs)->check(CLI::NonNegativeNumber);
        sub->add_option("--step", cfg.step)->check(CLI::PositiveNumber);
        sub->add_option("--tolerance", cfg.tolerance);
        sub->add_option("--z-mode", z_mode, "auto, exact or mixture");
        sub->add_option("--exact-z-max-nodes", cfg.exact_z_max_nodes);
        sub->add_option("--operator-mode", operator_mode, "auto, lazy or materialized");
    }
    EmbedConfig resolve(std::uint64_t seed, unsigned threads) const {
        EmbedConfig c = cfg;
        c.z_mode = parse_z_mode(z_mode);
        c.operator_mode = parse_operator_mode(operator_mode);
        c.seed = seed;
        c.threads = threads;
        return c;
    }
};

std::vector<std::string> graph_ids(const std::vector<std::string>& paths) {
    std::vector<std::string> ids;
    for (const auto& p : paths) {
        std::string stem = fs::path(p).filename().string();
        for (const char* ext : {".csv", ".emb"})
            if (stem.size() > std::strlen(ext) && stem.ends_with(ext)) stem.resize(stem.size() - std::strlen(ext));
        ids.push_back(stem);
    }
    return ids;
}

std::vector<Embedding> read_embeddings(const std::vector<std::string>& paths) {
    std::vector<Embedding> es;
    es.reserve(paths.size());
    for (const auto& p : paths) es.push_back(read_embedding_csv(p));
    return es;
}

void write_matrix_csv(const Eigen::MatrixXd& M, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    char buf[32];
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", M(i, j));
            out << (j ? "," : "") << buf;
        }
        out << '\n';
    }
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Distances between temporal graphs via random-walk embeddings", "tgdist"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();

    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::string config_path;
    std::int64_t t_res = 1;
    std::string output;

    auto common = [&](CLI::App* sub, bool with_seed) {
        sub->add_option("--config", config_path, "JSON file whose keys override the flags")
            ->check(CLI::ExistingFile);
        sub->add_option("--threads", threads, "worker threads (0 = all cores); results do not depend on it");
        if (with_seed) sub->add_option("--seed", seed, "master seed");
    };

    // ingest
    bool drop_empty = false;
    std::string ingest_input;
    auto* ingest = app.add_subcommand("ingest", "read a contact list and write a graph bundle");
    ingest->add_option("input", ingest_input, "contact list: i j t per line")->required()->check(CLI::ExistingFile);
    ingest->add_option("--output,-o", output, "output prefix")->required();
    ingest->add_option("--t-res", t_res, "snapshot width in timestamp units")->check(CLI::PositiveNumber);
    ingest->add_flag("--drop-empty", drop_empty, "remove snapshots without edges");
    common(ingest, false);

    // embed
    EmbedFlags embed_flags;
    std::string embed_input, dump_p;
    auto* embed_cmd = app.add_subcommand("embed", "embed a temporal graph");
    embed_cmd->add_option("graph", embed_input, "graph bundle prefix or contact list")->required();
    embed_cmd->add_option("--output,-o", output, "embedding CSV")->required();
    embed_cmd->add_option("--t-res", t_res, "snapshot width when reading a contact list");
    embed_cmd->add_option("--dump-p", dump_p, "also write the dense transition matrix P as CSV");
    embed_flags.bind(embed_cmd);
    common(embed_cmd, true);

    // dist
    std::string dist_kind = "unmatched";
    std::vector<std::string> dist_inputs;
    auto* dist = app.add_subcommand("dist", "distance between two embeddings");
    dist->add_option("--kind,-k", dist_kind, "matched or unmatched");
    dist->add_option("embeddings", dist_inputs, "two embedding CSV files")
        ->required()
        ->expected(2)
        ->check(CLI::ExistingFile);
    dist->add_option("--output,-o", output, "also write the value to this file");
    common(dist, false);

    // distmat
    std::vector<std::string> distmat_inputs;
    auto* distmat = app.add_subcommand("distmat", "pairwise distance matrix of many embeddings");
    distmat->add_option("--kind,-k", dist_kind, "matched or unmatched");
    distmat->add_option("embeddings", distmat_inputs, "embedding CSV files")
        ->required()
        ->expected(1, -1)
        ->check(CLI::ExistingFile);
    distmat->add_option("--output,-o", output, "distance matrix CSV")->required();
    common(distmat, false);

    // randomize
    std::string rand_kind, rand_input;
    int reps = 1;
    auto* randomize_cmd = app.add_subcommand("randomize", "null-model randomization of a temporal graph");
    randomize_cmd->add_option("graph", rand_input, "graph bundle prefix or contact list")->required();
    randomize_cmd->add_option("--kind,-k", rand_kind,
                              "random, random_delta, active_snapshot, time, sequence or weighted_degree")
        ->required();
    randomize_cmd->add_option("--reps", reps, "number of replicas")->check(CLI::PositiveNumber);
    randomize_cmd->add_option("--output,-o", output, "output prefix (.r<k> appended when reps > 1)")->required();
    randomize_cmd->add_option("--t-res", t_res, "snapshot width when reading a contact list");
    common(randomize_cmd, true);

    // generate
    std::string model = "er", activity = "synthetic";
    int gen_n = 100;
    double mean_degree = kDefaultMeanDegree;
    bool circular_shift = false;
    ActivityProfile profile;
    auto* generate = app.add_subcommand("generate", "synthetic temporal graph from a static model");
    generate->add_option("--model", model, "er, sbm, cm or gm");
    generate->add_option("--n", gen_n, "number of nodes")->check(CLI::Range(10, 10000000));
    generate->add_option("--mean-degree", mean_degree)->check(CLI::PositiveNumber);
    generate->add_option("--activity", activity, "contact list to copy activity from, or 'synthetic'");
    generate->add_option("--t-res", t_res, "snapshot width of the activity contact list");
    generate->add_option("--T", profile.num_snapshots, "snapshots of the synthetic activity bank");
    generate->add_option("--bank-size", profile.bank_size, "series in the synthetic activity bank");
    generate->add_option("--burst-exponent", profile.on_exponent, "power-law exponent of on and off durations");
    generate->add_flag("--circular-shift", circular_shift, "rotate every copied series by a random offset");
    generate->add_option("--output,-o", output, "output prefix")->required();
    common(generate, true);

    // experiment
    std::string experiment_name, exp_graph, exp_activity;
    bool desk_scale = false, paper_scale = false;
    auto* experiment = app.add_subcommand("experiment", "run an evaluation protocol");
    experiment->add_option("name", experiment_name, "classes, relabel or randomization")
        ->required()
        ->check(CLI::IsMember({"classes", "relabel", "randomization"}));
    auto* desk_flag = experiment->add_flag("--desk-scale", desk_scale, "scaled-down defaults (the default)");
    experiment->add_flag("--paper-scale", paper_scale, "paper-size defaults")->excludes(desk_flag);
    experiment->add_option("--graph", exp_graph, "randomization: input graph (default: bursty synthetic graph)");
    experiment->add_option("--activity", exp_activity, "classes/relabel: contact list used as activity source");
    experiment->add_option("--t-res", t_res, "snapshot width of --graph/--activity contact lists");
    experiment->add_option("--output,-o", output, "report prefix (default: the experiment name)");
    common(experiment, true);

    // export-lambda
    std::vector<std::string> lambda_inputs;
    auto* export_lambda = app.add_subcommand("export-lambda", "eigenvalue vectors of embeddings as CSV");
    export_lambda->add_option("embeddings", lambda_inputs, "embedding CSV files")
        ->required()
        ->expected(1, -1)
        ->check(CLI::ExistingFile);
    export_lambda->add_option("--output,-o", output, "lambda CSV")->required();
    common(export_lambda, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return static_cast<int>(ErrorKind::Usage);
    }

    CLI::App* sub = app.get_subcommands().front();
    try {
        json experiment_cfg;
        if (!config_path.empty()) {
            json cfg = read_json_file(config_path);
            if (sub == experiment) {
                if (!cfg.is_object()) throw UsageError("config file must hold a JSON object");
                if (cfg.contains("seed")) seed = cfg.at("seed").get<std::uint64_t>();
                if (cfg.contains("threads")) threads = cfg.at("threads").get<unsigned>();
                experiment_cfg = cfg;
                experiment_cfg.erase("seed");
            } else {
                apply_config_overrides(*sub, cfg);
            }
        }
        const json options = effective_options(*sub);

        if (sub == ingest) {
            LoadStats stats;
            auto g = load_contact_list(ingest_input, t_res, &stats);
            if (drop_empty) g = drop_empty_snapshots(g);
            write_graph(g, output);
            write_sidecar(output, "ingest", options, 0);
            err << "ingested " << stats.records << " records (" << stats.skipped_self_loops
                << " self-loops skipped): n=" << g.num_nodes() << " T=" << g.num_snapshots()
                << " temporal edges=" << g.temporal_edge_count() << '\n';
        } else if (sub == embed_cmd) {
            auto g = load_graph_any(embed_input, t_res);
            auto cfg = embed_flags.resolve(seed, threads);
            auto op = TransitionOperator::build(g, cfg.operator_mode);
            if (!dump_p.empty()) {
                write_matrix_csv(op.materialize(), dump_p);
                write_sidecar(dump_p, "embed", options, seed);
            }
            auto result = embed_detailed(op, cfg);
            write_embedding_csv(result.embedding, output);
            write_sidecar(output, "embed", options, seed);
            err << "embedded n=" << g.num_nodes() << " d=" << cfg.dim << " epochs=" << result.epochs_run
                << " loss=" << number(result.loss_history.back()) << '\n';
        } else if (sub == dist) {
            auto kind = parse_distance_kind(dist_kind);
            auto a = read_embedding_csv(dist_inputs[0]);
            auto b = read_embedding_csv(dist_inputs[1]);
            double d = kind == DistanceKind::Matched ? matched_distance(a, b) : unmatched_distance(a, b);
            out << number(d) << '\n';
            if (!output.empty()) {
                std::ofstream f(output);
                if (!f) throw DataError("cannot write " + output);
                f << number(d) << '\n';
                write_sidecar(output, "dist", options, 0);
            }
        } else if (sub == distmat) {
            auto kind = parse_distance_kind(dist_kind);
            auto es = read_embeddings(distmat_inputs);
            auto m = pairwise_distances(es, kind, graph_ids(distmat_inputs), threads);
            write_distance_matrix_csv(m, output);
            write_sidecar(output, "distmat", options, 0);
        } else if (sub == randomize_cmd) {
            auto kind = parse_randomization_kind(rand_kind);
            auto g = load_graph_any(rand_input, t_res);
            for (int r = 0; r < reps; ++r) {
                auto res = randomize_detailed(g, kind, derive_seed(seed, static_cast<std::uint64_t>(r)));
                for (const auto& w : res.warnings) err << "warning: " << w << '\n';
                std::string prefix = reps == 1 ? output : output + ".r" + std::to_string(r);
                write_graph(res.graph, prefix);
                json opts = options;
                opts["replica"] = r;
                write_sidecar(prefix, "randomize", opts, seed);
            }
        } else if (sub == generate) {
            auto kind = parse_model_kind(model);
            profile.off_exponent = profile.on_exponent;
            auto bank = activity == "synthetic" ? synthetic_activity(profile, derive_seed(seed, 0))
                                                : load_graph_any(activity, t_res);
            auto sg = preset(kind, gen_n, mean_degree, derive_seed(seed, 1));
            auto g = temporalize(sg, bank, derive_seed(seed, 2), circular_shift);
            write_graph(g, output);
            write_sidecar(output, "generate", options, seed);
            err << "generated " << to_string(kind) << " n=" << gen_n << " static edges=" << sg.edges.size()
                << " mean degree=" << number(sg.mean_degree()) << " T=" << g.num_snapshots() << '\n';
        } else if (sub == experiment) {
            std::string prefix = output.empty() ? experiment_name : output;
            ExperimentReport report;
            json effective;
            if (experiment_name == "classes") {
                auto cfg = paper_scale ? ClassesConfig::paper_scale() : ClassesConfig{};
                if (!exp_activity.empty()) cfg.activity = {exp_activity, t_res, {}};
                if (!experiment_cfg.is_null()) merge_json(cfg, experiment_cfg);
                if (paper_scale && cfg.activity.path.empty())
                    throw UsageError("--paper-scale classes needs an empirical activity source (--activity FILE)");
                cfg.threads = threads;
                effective = to_json(cfg);
                report = experiment_model_classes(cfg, seed);
            } else if (experiment_name == "relabel") {
                auto cfg = paper_scale ? RelabelConfig::paper_scale() : RelabelConfig{};
                if (!exp_activity.empty()) cfg.activity = {exp_activity, t_res, {}};
                if (!experiment_cfg.is_null()) merge_json(cfg, experiment_cfg);
                cfg.threads = threads;
                effective = to_json(cfg);
                report = experiment_relabel(cfg, seed);
            } else {
                auto cfg = paper_scale ? RandomizationConfig::paper_scale() : RandomizationConfig{};
                if (!experiment_cfg.is_null()) merge_json(cfg, experiment_cfg);
                cfg.threads = threads;
                effective = to_json(cfg);
                auto g = exp_graph.empty() ? bursty_test_graph(derive_seed(seed, 99))
                                           : load_graph_any(exp_graph, t_res);
                report = experiment_randomization_pairs(g, cfg, seed);
            }
            auto written = write_report(report, prefix);
            json side = options;
            side["experiment"] = effective;
            write_sidecar(prefix, "experiment " + experiment_name, side, seed);
            for (const auto& p : written) err << "wrote " << p.string() << '\n';
        } else if (sub == export_lambda) {
            auto es = read_embeddings(lambda_inputs);
            std::vector<LambdaVector> lambdas;
            for (const auto& e : es) lambdas.push_back(lambda_vector(e));
            write_lambda_csv(lambdas, graph_ids(lambda_inputs), output);
            write_sidecar(output, "export-lambda", options, 0);
        }
        return 0;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return static_cast<int>(ErrorKind::Usage);
    } catch (const json::exception& e) {
        err << "usage error: bad config value: " << e.what() << '\n';
        return static_cast<int>(ErrorKind::Usage);
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(ErrorKind::Data);
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace tgdist
