#include "mixlab/io.hpp"
#include "mixlab/models.hpp"
#include "mixlab/product.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace mixlab;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    std::string cmd = std::string(MIXLAB_CLI_PATH) + " " + args + " 2>/dev/null";
    RunResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    std::size_t got = 0;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
    int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(cells);
    }
    return rows;
}

fs::path scratch(const std::string& name) {
    fs::path d = fs::temp_directory_path() / "mixlab_cli_tests";
    fs::create_directories(d);
    return d / name;
}

double num(const std::string& s) { return s == "inf" ? INFINITY : std::stod(s); }

}  // namespace

TEST(Cli, DistanceCurveTwoState) {
    RunResult r = run_cli("distance-curve --model two-state -p alpha=0.5 -p beta=0.5 --kind tv --t-grid 0:5:51 --start 0");
    ASSERT_EQ(r.code, 0);
    auto rows = parse_csv(r.out);
    ASSERT_EQ(rows.size(), 52u);
    EXPECT_EQ(rows[0][0], "t_chain_time");
    EXPECT_EQ(rows.size() - 1, 51u);
    double prev = 2.0;
    for (std::size_t k = 1; k < rows.size(); ++k) {
        double t = num(rows[k][0]);
        double v = num(rows[k][1]);
        // d_TV(0, t) = pi_1 e^{-(a+b) t} for the two-state chain.
        EXPECT_NEAR(v, 0.5 * std::exp(-t), 1e-10);
        EXPECT_LE(v, prev);
        prev = v;
    }
}

TEST(Cli, EmptyGridIsAnInputError) {
    EXPECT_EQ(run_cli("distance-curve --model two-state --t-grid 0:5:0").code, 2);
    EXPECT_EQ(run_cli("distance-curve --model two-state --t-grid 5:1:3").code, 2);
    EXPECT_EQ(run_cli("distance-curve --model two-state").code, 2);
    EXPECT_EQ(run_cli("distance-curve --chain /nonexistent.json --t-grid 0:1:2").code, 2);
    EXPECT_EQ(run_cli("no-such-command").code, 2);
}

TEST(Cli, StationaryStartGivesZeros) {
    RunResult r = run_cli("distance-curve --model cycle -p n=5 --kind hellinger --t-grid 0:3:7 --start stationary");
    ASSERT_EQ(r.code, 0);
    auto rows = parse_csv(r.out);
    ASSERT_EQ(rows.size(), 8u);
    for (std::size_t k = 1; k < rows.size(); ++k) EXPECT_NEAR(num(rows[k][1]), 0.0, 1e-12);
}

TEST(Cli, OutputIsDeterministic) {
    fs::path a = scratch("det_a.csv"), b = scratch("det_b.csv");
    ASSERT_EQ(run_cli("distance-curve --model ehrenfest -p n=6 --t-grid 0:4:9 --out " + a.string()).code, 0);
    ASSERT_EQ(run_cli("distance-curve --model ehrenfest -p n=6 --t-grid 0:4:9 --out " + b.string()).code, 0);
    std::ifstream fa(a), fb(b);
    std::stringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    EXPECT_EQ(sa.str(), sb.str());
    EXPECT_FALSE(sa.str().empty());
}

TEST(Cli, ConfigFileWithFlagOverride) {
    fs::path cfg = scratch("cfg.json");
    std::ofstream(cfg) << R"({"model":"two-state","param":["alpha=0.5","beta=0.5"],"t-grid":"0:1:3","kind":"hellinger"})";
    RunResult r = run_cli("distance-curve --config " + cfg.string() + " --kind tv --start 0");
    ASSERT_EQ(r.code, 0);
    auto rows = parse_csv(r.out);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[1][2], "tv");
    EXPECT_NEAR(num(rows[3][1]), 0.5 * std::exp(-1.0), 1e-10);

    std::ofstream(cfg) << R"({"bogus":1})";
    EXPECT_EQ(run_cli("distance-curve --config " + cfg.string()).code, 2);
}

TEST(Cli, MixTime) {
    RunResult r = run_cli("mix-time --model two-state --kind tv --epsilon 0.25 --start 0");
    ASSERT_EQ(r.code, 0);
    auto rows = parse_csv(r.out);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_NEAR(num(rows[1][4]), std::log(2.0), 1e-5);
}

TEST(Cli, ModelEmitRoundTrip) {
    fs::path p = scratch("lacoin.json");
    ASSERT_EQ(run_cli("model-emit --model lacoin -p n=4 -p a=0.01 -p b=0.1 --out " + p.string()).code, 0);
    MarkovChain c = load_chain(p);
    EXPECT_EQ(c.size(), 9);
    EXPECT_EQ(run_cli("validate --chain " + p.string()).code, 0);

    fs::path bad = scratch("bad.json");
    std::ofstream(bad) << R"({"matrix":[[0.5,0.6],[0.5,0.5]]})";
    EXPECT_EQ(run_cli("validate --chain " + bad.string()).code, 2);
    EXPECT_EQ(run_cli("model-emit --model lacoin -p n=4 -p a=0.2 -p b=0.1").code, 2);
}

TEST(Cli, ProductEvalBracketsContainDenseOracle) {
    ProductSpec spec;
    spec.coords = {two_state_chain({0.3, 0.6}), two_state_chain({0.5, 0.2})};
    spec.weights = {1.0, 1.0};
    fs::path p = scratch("prod2.json");
    std::ofstream(p) << product_to_json(spec).dump();
    for (const char* kind : {"tv", "hellinger"}) {
        RunResult r = run_cli("product-eval --product " + p.string() + " --kind " + kind + " --t-grid 0:6:13");
        ASSERT_EQ(r.code, 0);
        auto rows = parse_csv(r.out);
        ASSERT_EQ(rows.size(), 14u);
        ASSERT_EQ(rows[0].size(), 11u);
        for (std::size_t k = 1; k < rows.size(); ++k) {
            const auto& row = rows[k];
            double dense_tv = num(row[9]);
            double dense_h = num(row[10]);
            EXPECT_NEAR(num(row[1]), dense_h, 1e-9);
            EXPECT_LE(num(row[2]), dense_tv + 1e-12);
            EXPECT_GE(num(row[3]), dense_tv - 1e-12);
            double target = std::string(kind) == "tv" ? dense_tv : dense_h * dense_h;
            EXPECT_LE(num(row[5]), target + 1e-12);
            EXPECT_GE(num(row[6]), target - 1e-12);
        }
        // Before the tail threshold the tail bound columns are absent.
        EXPECT_EQ(rows[1][7], "");
        EXPECT_EQ(rows[1][8], "");
        EXPECT_NE(rows.back()[7], "");
    }
}

TEST(Cli, ProductEvalSingleCoordinateMatchesCurve) {
    ProductSpec spec;
    spec.coords = {two_state_chain({0.3, 0.6})};
    spec.weights = {2.0};
    fs::path p = scratch("prod1.json");
    std::ofstream(p) << product_to_json(spec).dump();
    RunResult prod = run_cli("product-eval --product " + p.string() + " --kind hellinger --t-grid 0:4:5");
    fs::path c = scratch("coord.json");
    save_chain(spec.coords[0], c);
    RunResult curve = run_cli("distance-curve --chain " + c.string() + " --kind hellinger --t-grid 0:4:5");
    ASSERT_EQ(prod.code, 0);
    ASSERT_EQ(curve.code, 0);
    auto pr = parse_csv(prod.out), cr = parse_csv(curve.out);
    ASSERT_EQ(pr.size(), cr.size());
    for (std::size_t k = 1; k < pr.size(); ++k) {
        EXPECT_NEAR(num(pr[k][1]), num(cr[k][1]), 1e-12);
        EXPECT_NEAR(num(pr[k][2]), num(pr[k][3]), 1e-12);
    }
}

TEST(Cli, CutoffScanVerdicts) {
    fs::path rep = scratch("scan.json");
    fs::path csv = scratch("scan.csv");
    auto verdict_of = [&](const std::string& args) {
        RunResult r = run_cli("cutoff-scan " + args + " --out " + csv.string() + " --report " + rep.string());
        EXPECT_EQ(r.code, 0);
        return read_json_file(rep);
    };
    Json e = verdict_of("--model ehrenfest --n-list 8,16,32,64 --epsilon 0.1 --delta 0.9");
    EXPECT_EQ(e["verdict"], "consistent-with-cutoff");
    EXPECT_EQ(e["thresholds"]["min_indices"], 4);
    Json l = verdict_of("--model lazy-path --n-list 8,16,32,64 --epsilon 0.1 --delta 0.9");
    EXPECT_EQ(l["verdict"], "consistent-with-no-cutoff");
    Json one = verdict_of("--model ehrenfest --n-range 8:8 --epsilon 0.1 --delta 0.9");
    EXPECT_EQ(one["verdict"], "inconclusive");

    std::ifstream in(csv);
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "n,T_eps_chain_time,T_delta_chain_time,ratio,window_chain_time,relative_window,D_n");
}

TEST(Cli, CutoffScanPartialFailure) {
    // Product members above the dense limit fail for TV, so most indices fail.
    fs::path rep = scratch("partial.json");
    RunResult r = run_cli("cutoff-scan --model interleaved --n-list 2,3,12,13,14 --epsilon 0.1 --delta 0.9 --report " +
                          rep.string());
    EXPECT_EQ(r.code, 4);
    Json j = read_json_file(rep);
    EXPECT_TRUE(j["partial"].get<bool>());
    EXPECT_EQ(j["failures"].size(), 3u);
}

TEST(Cli, LacoinBounds) {
    RunResult r = run_cli("lacoin-bounds -p n=5 -p a=0.01 -p b=0.1 --t-grid 1:30:30");
    ASSERT_EQ(r.code, 0);
    auto rows = parse_csv(r.out);
    ASSERT_EQ(rows.size(), 31u);
    for (std::size_t k = 1; k < rows.size(); ++k) {
        const auto& row = rows[k];
        double h2 = num(row[1]), tv = num(row[2]);
        if (!row[3].empty()) EXPECT_LE(h2, num(row[3]) + 1e-12);
        if (!row[4].empty()) EXPECT_LE(h2, num(row[4]) + 1e-12);
        if (!row[5].empty()) EXPECT_GE(h2, num(row[5]) - 1e-12);
        if (!row[6].empty()) EXPECT_GE(tv, num(row[6]) - 1e-12);
        double pi = num(row[7]);
        EXPECT_GT(pi, 1 - 2 * 0.01);
        EXPECT_LT(pi, 1 - 0.01);
    }
}
