#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tgdist/cluster.hpp"
#include "tgdist/distances.hpp"
#include "tgdist/edrep.hpp"
#include "tgdist/randomize.hpp"
#include "tgdist/synth.hpp"

namespace tgdist {

struct CsvTable {
    std::string name;  // file suffix
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// Self-describing experiment output. Contains no timings, so reruns are byte-identical.
struct ExperimentReport {
    std::string name;
    std::uint64_t seed = 0;
    nlohmann::json parameters;
    nlohmann::json results;
    std::vector<CsvTable> tables;
};

/// Writes <prefix>.json and <prefix>.<table>.csv for every table; returns the paths written.
std::vector<std::filesystem::path> write_report(const ExperimentReport& report, const std::filesystem::path& prefix);

/// Where temporalization takes its edge activity from.
struct ActivitySource {
    std::string path;            // contact list; empty selects the synthetic bank
    std::int64_t t_res = 1;      // only used with `path`
    ActivityProfile synthetic{};
};

TemporalGraph load_activity(const ActivitySource& source, std::uint64_t seed);

struct ClassesConfig {
    int instances_per_model = 20;
    int n_min = 100;
    int n_max = 400;
    double mean_degree = kDefaultMeanDegree;
    std::vector<int> dims = {2, 4, 8, 16, 32};
    DistanceKind distance = DistanceKind::Unmatched;
    bool circular_shift = false;
    ActivitySource activity{};
    EmbedConfig embed{};  // dim is overridden by the sweep
    ClusterOptions cluster{};
    unsigned threads = 1;

    static ClassesConfig paper_scale();
};

struct RelabelConfig {
    int n = 300;
    std::vector<double> alphas = {0.0, 0.1, 0.3, 0.6, 1.0};
    int repetitions = 10;
    double mean_degree = kDefaultMeanDegree;
    std::vector<ModelKind> models = {ModelKind::ER, ModelKind::SBM, ModelKind::CM, ModelKind::GM};
    ActivitySource activity{};
    EmbedConfig embed{};
    unsigned threads = 1;

    static RelabelConfig paper_scale();
};

struct RandomizationConfig {
    int replicas = 25;
    std::vector<RandomizationKind> kinds{kAllRandomizations.begin(), kAllRandomizations.end()};
    EmbedConfig embed{};
    ClusterOptions cluster{};
    unsigned threads = 1;

    static RandomizationConfig paper_scale();
};

/// The default test graph of the randomization experiment: an SBM preset
/// (n = 100) temporalized with a synthetic bursty bank of T = 200 snapshots.
TemporalGraph bursty_test_graph(std::uint64_t seed, NodeId n = 100, std::size_t num_snapshots = 200);

/// Rewires every node of a random alpha-fraction along a random cycle, so that
/// each selected node changes label. Returns perm with node i -> perm[i].
std::vector<NodeId> partial_relabeling(NodeId n, double alpha, std::uint64_t seed);

ExperimentReport experiment_model_classes(const ClassesConfig& cfg, std::uint64_t seed);
ExperimentReport experiment_relabel(const RelabelConfig& cfg, std::uint64_t seed);
ExperimentReport experiment_randomization_pairs(const TemporalGraph& g, const RandomizationConfig& cfg,
                                                std::uint64_t seed);

// JSON round trip; missing keys keep their current values.
nlohmann::json to_json(const EmbedConfig& c);
void merge_json(EmbedConfig& c, const nlohmann::json& j);
nlohmann::json to_json(const ClassesConfig& c);
void merge_json(ClassesConfig& c, const nlohmann::json& j);
nlohmann::json to_json(const RelabelConfig& c);
void merge_json(RelabelConfig& c, const nlohmann::json& j);
nlohmann::json to_json(const RandomizationConfig& c);
void merge_json(RandomizationConfig& c, const nlohmann::json& j);

std::string to_string(ZMode mode);
ZMode parse_z_mode(const std::string& name);
std::string to_string(OperatorMode mode);
OperatorMode parse_operator_mode(const std::string& name);

}  // namespace tgdist
