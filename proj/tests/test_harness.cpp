#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bolt/harness.hpp"

using namespace bolt;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("bolt_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json small_config(const fs::path& out) {
    return json{{"schema_version", 1},
                {"benchmark", "drift1d"},
                {"algorithm",
                 {{"name", "bolt"},
                  {"refit_every", 5},
                  {"fit_restarts", 1},
                  {"fit_iterations", 10},
                  {"acquisition_starts", 2},
                  {"acquisition_iterations", 10}}},
                {"seeds", {0, 1}},
                {"horizon", 30.0},
                {"warmup", 5},
                {"clock", {{"mode", "simulated"}, {"r0", 0.01}, {"gamma", 1e-4}}},
                {"output_dir", out.string()},
                {"threads", 2}};
}

}  // namespace

TEST(Config, ParsesAllSections) {
    json j = small_config("/tmp/x");
    j["algorithm"]["kernel"] = {{"spatial", "rq"}, {"rq_alpha", 2.5}, {"temporal", "matern12"}, {"temporal_lengthscale", 40.0}};
    j["algorithm"]["n_star"] = 12;
    const auto c = parse_config(j);
    EXPECT_EQ(c.benchmark, "drift1d");
    EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{0, 1}));
    EXPECT_EQ(c.warmup, 5);
    EXPECT_EQ(*c.horizon, 30.0);
    EXPECT_EQ(c.clock.gamma, 1e-4);
    EXPECT_EQ(c.optimizer.refit_every, 5);
    EXPECT_EQ(c.optimizer.kernel.spatial.family.kind, KernelKind::RationalQuadratic);
    EXPECT_EQ(c.optimizer.kernel.spatial.family.alpha, 2.5);
    EXPECT_EQ(c.optimizer.kernel.temporal->lengthscale, 40.0);
    EXPECT_EQ(*c.optimizer.fixed_n_star, 12);
}

TEST(Config, RejectsInvalid) {
    auto bad = [](auto mutate) {
        json j = small_config("/tmp/x");
        mutate(j);
        return j;
    };
    EXPECT_THROW(parse_config(bad([](json& j) { j.erase("schema_version"); })), ConfigError);
    EXPECT_THROW(parse_config(bad([](json& j) { j["schema_version"] = 2; })), ConfigError);
    EXPECT_THROW(parse_config(bad([](json& j) { j["seeds"] = json::array(); })), ConfigError);
    EXPECT_THROW(parse_config(bad([](json& j) { j["seeds"] = {1, 1}; })), ConfigError);
    EXPECT_THROW(parse_config(bad([](json& j) { j["warmup"] = -1; })), ConfigError);
    EXPECT_THROW(parse_config(bad([](json& j) { j["horizon"] = -3.0; })), ConfigError);
    EXPECT_THROW(parse_config(bad([](json& j) { j["colour"] = "red"; })), ConfigError);
    EXPECT_THROW(parse_config(bad([](json& j) { j["algorithm"]["name"] = "ucb"; })), Error);
    EXPECT_THROW(parse_config(bad([](json& j) { j["algorithm"]["refit_every"] = "often"; })), ConfigError);
    EXPECT_THROW(parse_config(bad([](json& j) { j["clock"]["mode"] = "sundial"; })), ConfigError);
    EXPECT_THROW(parse_config(bad([](json& j) { j.erase("algorithm"); })), ConfigError);
    EXPECT_THROW(load_config("/nonexistent/config.json"), IoError);
}

TEST(Csv, ShortestRoundTripNumbers) {
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(format_double(1e-300), "1e-300");
    EXPECT_EQ(format_double(2.0), "2");
    for (double v : {1.0 / 3.0, 6.02214076e23, -4.9e-324}) EXPECT_EQ(*parse_double(format_double(v)), v);
}

TEST(Csv, TraceRoundTrip) {
    RegretTrace tr;
    tr.dim = 2;
    tr.rows.push_back({1, 0.0, Eigen::Vector2d(0.25, 1.0 / 3.0), -0.5, 0.125, 0.125, 1, 0.01});
    tr.rows.push_back({2, 1.51, Eigen::Vector2d(0.5, 0.75), 0.2, 0.0, 0.125, 2, 0.0100002});
    std::ostringstream out;
    write_trace_csv(out, tr);
    const std::string s = out.str();
    EXPECT_EQ(s.find('\r'), std::string::npos);
    EXPECT_EQ(s.substr(0, s.find('\n')), "iteration,virtual_t,x1,x2,y,regret,cumulative_regret,dataset_size,response_seconds");
    std::istringstream in(s);
    const auto back = read_trace_csv(in);
    ASSERT_EQ(back.rows.size(), 2u);
    EXPECT_EQ(back.dim, 2);
    EXPECT_EQ(back.rows[0].x(1), 1.0 / 3.0);
    EXPECT_EQ(back.rows[1].response_seconds, 0.0100002);
    EXPECT_EQ(back.final_average_regret(), 0.0625);
}

TEST(Normalize, TwoAlgorithmsGiveZeroAndOne) {
    const auto s = normalize_scores({{"b", {{"x", 3.0}, {"y", 7.0}}}});
    ASSERT_EQ(s.size(), 4u);
    EXPECT_EQ(s[0].normalized, 0.0);
    EXPECT_EQ(s[1].normalized, 1.0);
}

TEST(Normalize, IdenticalRegretsGiveZero) {
    for (const auto& r : normalize_scores({{"b", {{"x", 2.0}, {"y", 2.0}, {"z", 2.0}}}})) EXPECT_EQ(r.normalized, 0.0);
}

TEST(Normalize, ThreeAlgorithmsByHand) {
    const auto s = normalize_scores({{"b1", {{"a", 1.0}, {"b", 3.0}, {"c", 2.0}}}, {"b2", {{"a", 10.0}, {"b", 4.0}, {"c", 6.0}}}});
    std::map<std::pair<std::string, std::string>, double> got;
    for (const auto& r : s) got[{r.benchmark, r.algorithm}] = r.normalized;
    EXPECT_EQ(got.at({"b1", "c"}), 0.5);
    EXPECT_NEAR(got.at({"b2", "c"}), 1.0 / 3.0, 1e-15);
    EXPECT_EQ(got.at({"all", "a"}), 0.5);
    EXPECT_EQ(got.at({"all", "b"}), 0.5);
    EXPECT_NEAR(got.at({"all", "c"}), 5.0 / 12.0, 1e-15);
}

TEST(Normalize, SingleAlgorithmIsAnError) {
    EXPECT_THROW(normalize_scores({{"b", {{"x", 1.0}}}}), PreconditionError);
}

TEST(Stats, RankSumMatchesReference) {
    EXPECT_NEAR(wilcoxon_rank_sum_less({1.1, 2.3, 0.4, 3.3, 0.9}, {4.1, 2.9, 5.5, 3.8, 6.0, 2.0}), 0.015151515151515152, 1e-15);
    EXPECT_NEAR(wilcoxon_rank_sum_less({1, 2, 2, 3, 4}, {2, 4, 5, 5, 6}), 0.035242314523105486, 1e-12);
    std::vector<double> a, b;
    for (int i = 0; i < 10; ++i) {
        a.push_back(i);
        b.push_back(10 + i);
    }
    EXPECT_NEAR(wilcoxon_rank_sum_less(a, b), 5.412544112234515e-06, 1e-18);
    EXPECT_NEAR(wilcoxon_rank_sum_less(b, a), 1.0, 1e-12);
    EXPECT_NEAR(standard_error({1.0, 2.0, 3.0, 4.0}), std::sqrt(5.0 / 3.0) / 2.0, 1e-15);
}

TEST(Run, HorizonZeroIsWarmupOnly) {
    json j = small_config(scratch("h0"));
    j["horizon"] = 0.0;
    j["warmup"] = 15;
    j["seeds"] = {7};
    const auto traces = run(parse_config(j));
    ASSERT_EQ(traces.size(), 1u);
    EXPECT_EQ(traces[0].rows.size(), 15u);
}

TEST(Run, TraceInvariantsAndSummary) {
    const fs::path dir = scratch("inv");
    const auto c = parse_config(small_config(dir));
    const auto traces = run(c);
    const double cost = make_benchmark("drift1d").cost();
    for (const auto& tr : traces) {
        ASSERT_GT(tr.rows.size(), 5u);
        EXPECT_GE(tr.rows.back().virtual_t + tr.rows.back().response_seconds + cost, 30.0);
        for (std::size_t k = 0; k + 1 < tr.rows.size(); ++k) {
            EXPECT_NEAR(tr.rows[k + 1].virtual_t - tr.rows[k].virtual_t, cost + tr.rows[k].response_seconds, 1e-9);
            EXPECT_GE(tr.rows[k + 1].cumulative_regret, tr.rows[k].cumulative_regret);
            // R(n) is charged on the dataset size before the step
            const double n = k > 0 ? static_cast<double>(tr.rows[k - 1].dataset_size) : 0.0;
            EXPECT_EQ(tr.rows[k].response_seconds, 0.01 + 1e-4 * n * n * n);
        }
    }
    // summary recomputed from the CSVs on disk
    const json summary = json::parse(slurp(dir / "drift1d__bolt__summary.json"));
    std::vector<double> finals;
    for (auto seed : c.seeds) {
        std::ifstream in(dir / trace_file_name("drift1d", "bolt", seed));
        finals.push_back(read_trace_csv(in).final_average_regret());
    }
    EXPECT_EQ(summary["final_average_regret"]["mean"].get<double>(), mean(finals));
    EXPECT_EQ(summary["final_average_regret"]["standard_error"].get<double>(), standard_error(finals));
    EXPECT_EQ(summary["per_seed"][1]["final_average_regret"].get<double>(), finals[1]);
    for (const auto& e : fs::directory_iterator(dir)) EXPECT_NE(e.path().extension(), ".tmp");
}

TEST(Run, DeterministicTraces) {
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    run(parse_config(small_config(a)));
    json jb = small_config(b);
    jb["threads"] = 1;
    run(parse_config(jb));
    for (std::uint64_t seed : {0, 1}) {
        const auto name = trace_file_name("drift1d", "bolt", seed);
        const std::string x = slurp(a / name);
        EXPECT_FALSE(x.empty());
        EXPECT_EQ(x, slurp(b / name)) << name;
    }
}

TEST(Aggregate, WritesScoresFromTraceDirectory) {
    const fs::path dir = scratch("agg");
    json j = small_config(dir);
    j["horizon"] = 10.0;
    j["seeds"] = {0};
    run(parse_config(j));
    j["algorithm"]["name"] = "gp-ucb";
    run(parse_config(j));
    aggregate(dir.string(), (dir / "scores.csv").string());
    const std::string s = slurp(dir / "scores.csv");
    std::istringstream in(s);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "benchmark,algorithm,mean_final_average_regret,normalized_regret");
    int rows = 0;
    std::set<std::string> norm;
    while (std::getline(in, line)) {
        ++rows;
        if (line.rfind("drift1d,", 0) == 0) norm.insert(line.substr(line.rfind(',') + 1));
    }
    EXPECT_EQ(rows, 4);
    EXPECT_TRUE(norm == std::set<std::string>({"0", "1"}) || norm == std::set<std::string>({"0"}));

    const fs::path lone = scratch("agg_lone");
    j["output_dir"] = lone.string();
    run(parse_config(j));
    EXPECT_THROW(aggregate(lone.string(), (lone / "s.csv").string()), PreconditionError);
}

namespace {
std::vector<std::vector<std::string>> csv_rows(const std::string& s) {
    std::vector<std::vector<std::string>> out;
    std::istringstream in(s);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string c;
        while (std::getline(ls, c, ',')) cells.push_back(c);
        out.push_back(cells);
    }
    return out;
}
}  // namespace

TEST(TheoryCurves, SlopeIsNonIncreasingAndSpotMatches) {
    std::ostringstream out;
    emit_theory_curves(TheoryFigure::Slope, out);
    const auto rows = csv_rows(out.str());
    ASSERT_EQ(rows.size(), 5u * 61u);
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i][2] == rows[i - 1][2]) EXPECT_LE(std::stod(rows[i][1]), std::stod(rows[i - 1][1])) << i;
    for (std::size_t i : {0ul, 77ul, 200ul, 304ul}) {
        TheoryParams p;
        p.d = 4;
        p.temporal = {KernelFamily::parse(rows[i][2], theory_rq_alpha), 1.0};
        p.cost = 1.0 / *parse_double(rows[i][0]);
        EXPECT_EQ(*parse_double(rows[i][1]), regret_slope(p)) << i;
    }
}

TEST(TheoryCurves, UsizeConstantIncreasesAndSpotMatches) {
    std::ostringstream out;
    emit_theory_curves(TheoryFigure::Usize, out);
    const auto rows = csv_rows(out.str());
    ASSERT_EQ(rows.size(), 8u * 300u);
    double prev = -1.0;
    int constant_rows = 0;
    for (const auto& r : rows) {
        if (r[3] != "constant") continue;
        ++constant_rows;
        const double v = *parse_double(r[1]);
        EXPECT_GT(v, prev);
        prev = v;
    }
    EXPECT_EQ(constant_rows, 300);
    const auto& r = rows[1234];
    const auto& models = theory_response_models();
    const auto m = std::find_if(models.begin(), models.end(), [&](const ResponseCurve& c) { return c.name == r[3]; });
    ASSERT_NE(m, models.end());
    EXPECT_EQ(*parse_double(r[1]), u_norm_sq({KernelFamily::parse(r[2], theory_rq_alpha), 10.0}, m->fn, std::stol(r[0])));
    EXPECT_THROW(parse_theory_figure("pie"), InvalidArgument);
}

#ifdef BOLT_CLI_PATH
namespace {
struct CliResult {
    int status;
    std::string out, err;
};
CliResult cli(const std::string& args) {
    const fs::path dir = fs::temp_directory_path();
    const auto o = dir / "bolt_cli_out.txt", e = dir / "bolt_cli_err.txt";
    const std::string cmd = std::string(BOLT_CLI_PATH) + " " + args + " >" + o.string() + " 2>" + e.string();
    const int rc = std::system(cmd.c_str());
    return {rc, slurp(o), slurp(e)};
}
}  // namespace

TEST(Cli, ErrorsAreJsonOnStderr) {
    for (const char* args : {"run --config /nonexistent.json", "frobnicate", "theory --figure pie --out /tmp/x.csv",
                             "aggregate --in /nonexistent --out /tmp/x.csv"}) {
        const auto r = cli(args);
        EXPECT_NE(r.status, 0) << args;
        const json j = json::parse(r.err);
        EXPECT_TRUE(j.contains("error")) << args;
        EXPECT_TRUE(j.contains("message")) << args;
    }
}

TEST(Cli, BenchListAndTheory) {
    auto r = cli("bench list");
    EXPECT_EQ(r.status, 0);
    EXPECT_NE(r.out.find("hartmann3 d=2"), std::string::npos);
    const auto csv = fs::temp_directory_path() / "bolt_cli_slope.csv";
    r = cli("theory --figure slope --out " + csv.string());
    EXPECT_EQ(r.status, 0);
    std::ostringstream ref;
    emit_theory_curves(TheoryFigure::Slope, ref);
    EXPECT_EQ(slurp(csv), ref.str());
}
#endif
