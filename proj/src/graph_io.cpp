#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tgdist/error.hpp"
#include "tgdist/graph.hpp"

namespace tgdist {

namespace {

std::filesystem::path with_suffix(const std::filesystem::path& prefix, const char* suffix) {
    std::filesystem::path p = prefix;
    if (p.extension() == ".json" || p.extension() == ".edges") p.replace_extension();
    p += suffix;
    return p;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void write_graph(const TemporalGraph& g, const std::filesystem::path& prefix) {
    nlohmann::json desc;
    desc["format"] = "tgdist-graph";
    desc["version"] = 1;
    desc["n"] = g.num_nodes();
    desc["T"] = g.num_snapshots();
    desc["t_res"] = g.t_res();
    desc["node_names"] = g.node_names();

    auto json_path = with_suffix(prefix, ".json");
    std::ofstream js(json_path);
    if (!js) throw DataError("cannot write " + json_path.string());
    js << desc.dump(2) << '\n';

    auto edge_path = with_suffix(prefix, ".edges");
    std::ofstream es(edge_path);
    if (!es) throw DataError("cannot write " + edge_path.string());
    es << "# t i j w\n";
    for (std::size_t t = 0; t < g.num_snapshots(); ++t)
        for (const auto& e : g.snapshot(t).edges())
            es << t << ' ' << e.i << ' ' << e.j << ' ' << format_double(e.w) << '\n';
}

TemporalGraph read_graph(const std::filesystem::path& prefix) {
    auto json_path = with_suffix(prefix, ".json");
    std::ifstream js(json_path);
    if (!js) throw DataError("cannot open graph descriptor " + json_path.string());
    nlohmann::json desc;
    try {
        js >> desc;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("bad graph descriptor " + json_path.string() + ": " + e.what());
    }
    if (desc.value("format", "") != "tgdist-graph") throw DataError(json_path.string() + " is not a tgdist graph");
    NodeId n = desc.at("n").get<NodeId>();
    std::size_t T = desc.at("T").get<std::size_t>();
    double t_res = desc.value("t_res", 1.0);
    auto names = desc.value("node_names", std::vector<std::string>{});

    auto edge_path = with_suffix(prefix, ".edges");
    std::ifstream es(edge_path);
    if (!es) throw DataError("cannot open edge dump " + edge_path.string());
    std::vector<std::vector<WeightedEdge>> per(T);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(es, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        long long t;
        WeightedEdge e;
        if (!(ls >> t >> e.i >> e.j >> e.w)) throw ParseError(lineno, "expected \"t i j w\" in " + edge_path.string());
        if (t < 0 || static_cast<std::size_t>(t) >= T) throw ParseError(lineno, "snapshot index out of range");
        if (e.i < 0 || e.j < 0 || e.i >= n || e.j >= n) throw ParseError(lineno, "node id out of range");
        per[t].push_back(e);
    }
    std::vector<Snapshot> snaps;
    snaps.reserve(T);
    for (auto& e : per) snaps.push_back(Snapshot::from_edges(n, e));
    return TemporalGraph(n, std::move(snaps), t_res, std::move(names));
}

}  // namespace tgdist
