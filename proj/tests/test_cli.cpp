#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "support.hpp"
#include "tgdist/edrep.hpp"
#include "tgdist/graph.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Run run(const testing::TempDir& dir, const std::string& args) {
    auto out = dir / "stdout.txt";
    std::string cmd = std::string(TGDIST_BINARY) + " " + args + " > " + out.string() + " 2> " +
                      (dir / "stderr.txt").string();
    int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out)};
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

void write_file(const fs::path& p, const std::string& body) { std::ofstream(p) << body; }

}  // namespace

TEST_CASE("generate, embed and compare") {
    testing::TempDir dir("cli");
    auto g = dir / "g";
    REQUIRE(run(dir, "generate --model sbm --n 40 --activity synthetic --T 30 --bank-size 60 --seed 3 -o " + q(g))
                .code == 0);
    CHECK(fs::exists(dir / "g.json"));
    CHECK(fs::exists(dir / "g.edges"));
    CHECK(fs::exists(dir / "g.config.json"));

    auto emb = dir / "a.emb";
    REQUIRE(run(dir, "embed " + q(g) + " --dim 4 --epochs 5 -o " + q(emb)).code == 0);
    auto side = nlohmann::json::parse(slurp(dir / "a.emb.config.json"));
    CHECK(side["command"] == "embed");
    CHECK(side["config"]["dim"] == 4);

    auto r = run(dir, "dist --kind matched " + q(emb) + " " + q(emb));
    CHECK(r.code == 0);
    CHECK(r.out == "0.0\n");
    CHECK(run(dir, "dist " + q(emb) + " " + q(emb)).out == "0.0\n");

    SUBCASE("config file overrides flags") {
        write_file(dir / "cfg.json", R"({"dim": 3, "epochs": 2})");
        auto e3 = dir / "b.emb";
        REQUIRE(run(dir, "embed " + q(g) + " --dim 4 --config " + q(dir / "cfg.json") + " -o " + q(e3)).code == 0);
        CHECK(tgdist::read_embedding_csv(e3).dim() == 3);
    }
    SUBCASE("same seed, same embedding") {
        auto again = dir / "c.emb";
        REQUIRE(run(dir, "embed " + q(g) + " --dim 4 --epochs 5 --threads 2 -o " + q(again)).code == 0);
        CHECK(slurp(again) == slurp(emb));
    }
}

TEST_CASE("sequence randomization of identical snapshots") {
    testing::TempDir dir("cli");
    std::string body;
    for (int t = 0; t < 6; ++t) body += std::to_string(t * 10) + " a b\n" + std::to_string(t * 10 + 3) + " b c\n";
    write_file(dir / "c.txt", body);
    REQUIRE(run(dir, "ingest " + q(dir / "c.txt") + " --t-res 10 -o " + q(dir / "g")).code == 0);
    REQUIRE(run(dir, "randomize " + q(dir / "g") + " --kind sequence --reps 2 -o " + q(dir / "s")).code == 0);
    auto g = tgdist::read_graph(dir / "g");
    for (auto name : {"s.r0", "s.r1"}) {
        auto s = tgdist::read_graph(dir / name);
        REQUIRE(s.num_snapshots() == g.num_snapshots());
        for (std::size_t t = 0; t < g.num_snapshots(); ++t) CHECK(s.snapshot(t) == g.snapshot(t));
    }
}

TEST_CASE("experiment reports are byte-identical across runs") {
    testing::TempDir dir("cli");
    write_file(dir / "cfg.json",
               R"({"replicas": 2, "kinds": ["random", "sequence"], "embed": {"dim": 4, "epochs": 5}})");
    std::string base = "experiment randomization --seed 11 --config " + q(dir / "cfg.json");
    REQUIRE(run(dir, base + " -o " + q(dir / "a")).code == 0);
    REQUIRE(run(dir, base + " --threads 2 -o " + q(dir / "b")).code == 0);
    for (auto suffix : {".json", ".nmi_matched.csv", ".nmi_unmatched.csv", ".lambda.csv"}) {
        CAPTURE(suffix);
        REQUIRE(fs::exists(dir / (std::string("a") + suffix)));
        CHECK(slurp(dir / (std::string("a") + suffix)) == slurp(dir / (std::string("b") + suffix)));
    }
    auto side = nlohmann::json::parse(slurp(dir / "a.config.json"));
    CHECK(side["seed"] == 11);
    CHECK(side["config"]["experiment"]["replicas"] == 2);
}

TEST_CASE("exit codes") {
    testing::TempDir dir("cli");
    CHECK(run(dir, "").code == 2);
    CHECK(run(dir, "embed").code == 2);
    CHECK(run(dir, "dist --kind nearest a b").code == 2);
    CHECK(run(dir, "embed " + q(dir / "missing.txt") + " -o " + q(dir / "x")).code == 2);
    CHECK(run(dir, "experiment classes --paper-scale").code == 2);
    CHECK(run(dir, "experiment classes --paper-scale --desk-scale").code == 2);
    write_file(dir / "cfg.json", R"({"no_such_option": 1})");
    CHECK(run(dir, "embed x -o y --config " + q(dir / "cfg.json")).code == 2);

    write_file(dir / "bad.txt", "0 a b\nnot a record\n");
    CHECK(run(dir, "ingest " + q(dir / "bad.txt") + " -o " + q(dir / "g")).code == 3);
    write_file(dir / "bad.emb", "1,2\n3\n");
    CHECK(run(dir, "dist " + q(dir / "bad.emb") + " " + q(dir / "bad.emb")).code == 3);
}
