#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include <bhdnet/simgen.hpp>

#include "cli.hpp"

using nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result call(std::vector<std::string> args) {
    args.insert(args.begin(), "bhdnet");
    std::ostringstream out, err;
    const int code = bhdnet::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::filesystem::path dir() {
    static const auto d = [] {
        auto p = std::filesystem::temp_directory_path() / "bhdnet_cli";
        std::filesystem::remove_all(p);
        std::filesystem::create_directories(p);
        return p;
    }();
    return d;
}

std::string data_file() {
    static const auto p = [] {
        bhdnet::GenConfig cfg;
        cfg.nodes = 4;
        cfg.groups = 3;
        cfg.rows_per_group = 200;
        cfg.seed = 5;
        const auto rep = bhdnet::generate_replicate(cfg, 0, 0, 0);
        const auto path = dir() / "data.csv";
        bhdnet::write_csv(rep.data, path, "site");
        return path.string();
    }();
    return p;
}

}  // namespace

TEST(Cli, HelpListsSubcommandsAndFlags) {
    const auto r = call({"--help"});
    EXPECT_EQ(r.code, 0);
    for (const char* s : {"learn", "score", "simulate", "bench"}) EXPECT_NE(r.out.find(s), std::string::npos);
    const auto l = call({"learn", "--help"});
    EXPECT_EQ(l.code, 0);
    for (const char* f : {"--data", "--group", "--score", "--iss", "--out", "--dot", "--vb-tol", "--vb-max-iters",
                          "--s0", "--max-parents", "--jobs"})
        EXPECT_NE(l.out.find(f), std::string::npos) << f;
    const auto b = call({"bench", "--help"});
    for (const char* f : {"--plan", "--out", "--jobs", "--resume", "--seed", "--full-grid", "--timing"})
        EXPECT_NE(b.out.find(f), std::string::npos) << f;
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(call({}).code, 1);
    EXPECT_EQ(call({"frobnicate"}).code, 1);
    EXPECT_EQ(call({"learn", "--data", data_file(), "--bogus"}).code, 1);
    EXPECT_EQ(call({"learn", "--data", data_file(), "--score", "k2"}).code, 1);
    const auto bhd = call({"learn", "--data", data_file(), "--score", "bhd"});
    EXPECT_EQ(bhd.code, 1);
    EXPECT_NE(bhd.err.find("--group"), std::string::npos);
}

TEST(Cli, DataErrors) {
    EXPECT_EQ(call({"learn", "--data", (dir() / "missing.csv").string()}).code, 2);
    EXPECT_EQ(call({"learn", "--data", data_file(), "--group", "nope"}).code, 2);
    std::ofstream(dir() / "bad.json") << "{\"nodes\": [\"X1\"]}";
    EXPECT_EQ(call({"score", "--data", data_file(), "--group", "site", "--graph", (dir() / "bad.json").string()}).code, 2);
}

TEST(Cli, LearnThenScoreReproducesScore) {
    for (const char* score : {"bdeu", "bic", "bhd"}) {
        const auto graph = (dir() / (std::string("g_") + score + ".json")).string();
        const auto dot = (dir() / (std::string("g_") + score + ".dot")).string();
        const auto l = call({"learn", "--data", data_file(), "--group", "site", "--score", score, "--out", graph, "--dot",
                             dot, "--jobs", "2"});
        ASSERT_EQ(l.code, 0) << l.err;
        const auto lj = json::parse(l.out);
        EXPECT_EQ(lj["schema"], 1);
        EXPECT_EQ(lj["nodes"].size(), 4u);
        for (const auto& g : {graph, dot}) {
            const auto s = call({"score", "--data", data_file(), "--group", "site", "--score", score, "--graph", g});
            ASSERT_EQ(s.code, 0) << s.err;
            const auto sj = json::parse(s.out);
            EXPECT_EQ(sj["schema"], 1);
            EXPECT_EQ(sj["total"].get<double>(), lj["log_score"].get<double>());
            double sum = 0;
            for (const auto& n : sj["per_node"]) sum += n["log_score"].get<double>();
            EXPECT_NEAR(sum, sj["total"].get<double>(), 1e-9);
        }
    }
}

TEST(Cli, PooledScoresIgnoreGrouping) {
    const auto grouped = call({"learn", "--data", data_file(), "--group", "site"});
    const auto plain = call({"learn", "--data", data_file()});
    // Without --group the site column becomes a variable, so compare on BDeu
    // of a fixed graph instead.
    ASSERT_EQ(grouped.code, 0);
    ASSERT_EQ(plain.code, 0);
    EXPECT_EQ(json::parse(plain.out)["nodes"].size(), 5u);
}

TEST(Cli, SimulateWritesReplicatesAndTruth) {
    const auto cfg = dir() / "sim.cfg";
    std::ofstream(cfg) << "N = 5\nF = 3\nn_f = 20\nscenario = b\nN_F = 1\nN_A = 1\nparam_sets = 2\n";
    const auto out = dir() / "sim";
    const auto r = call({"simulate", "--config", cfg.string(), "--out-dir", out.string(), "--seed", "4"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::ifstream in(out / "truth.json");
    const auto truth = json::parse(in);
    EXPECT_EQ(truth["schema"], 1);
    EXPECT_EQ(truth["config"]["seed"], 4);
    ASSERT_EQ(truth["replicates"].size(), 2u);
    for (const auto& rep : truth["replicates"]) {
        EXPECT_TRUE(std::filesystem::exists(out / rep["file"].get<std::string>()));
        EXPECT_EQ(rep["master"].size(), 5u);
        std::size_t reduced = 0;
        for (const auto& g : rep["groups"]) reduced += g["arcs"].size() == 4u;
        EXPECT_EQ(reduced, 1u);
    }
    // Same seed, same files.
    const auto again = dir() / "sim2";
    call({"simulate", "--config", cfg.string(), "--out-dir", again.string(), "--seed", "4"});
    std::ifstream a(out / "replicate-s0-p1-d0.csv"), b(again / "replicate-s0-p1-d0.csv");
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    EXPECT_EQ(sa.str(), sb.str());

    std::ofstream(dir() / "bad.cfg") << "N = 5\nregime = weird\n";
    EXPECT_EQ(call({"simulate", "--config", (dir() / "bad.cfg").string(), "--out-dir", out.string()}).code, 2);
}

TEST(Cli, BenchRunsPlanAndResumes) {
    const auto plan = dir() / "plan.txt";
    std::ofstream(plan) << "N = 4\nF = 2\nn_f = 30\nstructures = 1\nparam_sets = 1\ndata_samplings = 3\n";
    const auto out = (dir() / "results.csv").string();
    const auto r = call({"bench", "--plan", plan.string(), "--out", out, "--jobs", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(json::parse(r.out)["jobs_run"], 3);
    const auto again = call({"bench", "--plan", plan.string(), "--out", out, "--resume"});
    EXPECT_EQ(json::parse(again.out)["jobs_run"], 0);
    EXPECT_EQ(call({"bench", "--plan", plan.string(), "--full-grid", "a", "--out", out}).code, 1);
    std::ofstream(dir() / "badplan.txt") << "unknown = 1\n";
    EXPECT_EQ(call({"bench", "--plan", (dir() / "badplan.txt").string(), "--out", out}).code, 2);
}
