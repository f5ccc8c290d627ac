#pragma once

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "algorithms.hpp"
#include "benchmarks.hpp"
#include "clock.hpp"
#include "error.hpp"
#include "numeric.hpp"
#include "replay.hpp"
#include "stats.hpp"
#include "theory.hpp"

namespace bolt {

inline constexpr int config_schema_version = 1;

struct ClockConfig {
    enum class Mode { Simulated, Measured };
    Mode mode = Mode::Simulated;
    /// Simulated response time R(n) = r0 + gamma * n^3.
    double r0 = 0.01;
    double gamma = 2e-7;
};

struct ReplaySource {
    std::string path;
    double noise_variance = 0.0;
    double cost = 1.0;
};

struct ExperimentConfig {
    std::string benchmark;
    std::optional<ReplaySource> replay;
    OptimizerConfig optimizer;
    std::vector<std::uint64_t> seeds;
    std::optional<double> horizon;  // defaults to the benchmark's
    int warmup = 15;
    ClockConfig clock;
    std::string output_dir = ".";
    int threads = 0;  // 0: one per hardware thread

    void validate() const {
        if (seeds.empty()) throw ConfigError("seeds must not be empty");
        if (warmup < 0) throw ConfigError("warmup must be non-negative");
        if (horizon && !(*horizon >= 0.0 && std::isfinite(*horizon))) throw ConfigError("horizon must be non-negative");
        if (!(clock.r0 >= 0.0) || !(clock.gamma >= 0.0)) throw ConfigError("clock r0 and gamma must be non-negative");
        if (threads < 0) throw ConfigError("threads must be non-negative");
        if (benchmark.empty()) throw ConfigError("benchmark name is empty");
        if (benchmark.find("__") != std::string::npos) throw ConfigError("benchmark name must not contain '__'");
        std::set<std::uint64_t> unique(seeds.begin(), seeds.end());
        if (unique.size() != seeds.size()) throw ConfigError("seeds must be distinct");
    }
};

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("key '") + key + "' has the wrong type");
    }
}

inline KernelFamily family_from(const std::string& name, double alpha) {
    try {
        return KernelFamily::parse(name, alpha);
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
}

inline void apply_kernel(const json& k, KernelSpec& spec) {
    reject_unknown(k,
                   {"spatial", "spatial_lengthscale", "temporal", "temporal_lengthscale", "rq_alpha", "signal_variance",
                    "noise_variance"},
                   "algorithm.kernel");
    const double alpha = get_or(k, "rq_alpha", 1.0);
    if (k.contains("spatial")) spec.spatial.family = family_from(get_or<std::string>(k, "spatial", ""), alpha);
    spec.spatial.lengthscale = get_or(k, "spatial_lengthscale", spec.spatial.lengthscale);
    if (k.contains("temporal")) {
        const auto name = get_or<std::string>(k, "temporal", "");
        if (name == "none") spec.temporal.reset();
        else spec.temporal = KernelComponent{family_from(name, alpha), spec.temporal ? spec.temporal->lengthscale : 1.0};
    }
    if (spec.temporal) spec.temporal->lengthscale = get_or(k, "temporal_lengthscale", spec.temporal->lengthscale);
    spec.signal_variance = get_or(k, "signal_variance", spec.signal_variance);
    spec.noise_variance = get_or(k, "noise_variance", spec.noise_variance);
}

inline void apply_algorithm(const json& a, OptimizerConfig& c) {
    if (!a.is_object()) throw ConfigError("algorithm must be an object");
    reject_unknown(a,
                   {"name", "kernel", "lipschitz", "delta", "beta_min", "beta_scale", "acquisition_starts", "acquisition_iterations",
                    "raw_samples", "refit_every", "fit_restarts", "warm_restarts", "fit_iterations", "fit_temporal",
                    "lengthscale_prior_sd",
                    "reset_period", "forgetting", "removal_rate", "domain_window", "domain_nodes", "n_max", "n0",
                    "n_star"},
                   "algorithm");
    if (!a.contains("name")) throw ConfigError("algorithm.name is required");
    try {
        c.algorithm = parse_algorithm(get_or<std::string>(a, "name", ""));
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
    if (a.contains("kernel")) apply_kernel(a.at("kernel"), c.kernel);
    c.lipschitz = get_or(a, "lipschitz", c.lipschitz);
    c.delta = get_or(a, "delta", c.delta);
    c.beta_min = get_or(a, "beta_min", c.beta_min);
    c.beta_scale = get_or(a, "beta_scale", c.beta_scale);
    c.acquisition.starts = get_or(a, "acquisition_starts", c.acquisition.starts);
    c.acquisition.max_iterations = get_or(a, "acquisition_iterations", c.acquisition.max_iterations);
    c.acquisition.raw_samples = get_or(a, "raw_samples", c.acquisition.raw_samples);
    c.refit_every = get_or(a, "refit_every", c.refit_every);
    c.fit.restarts = get_or(a, "fit_restarts", c.fit.restarts);
    c.warm_restarts = get_or(a, "warm_restarts", c.warm_restarts);
    c.fit.max_iterations = get_or(a, "fit_iterations", c.fit.max_iterations);
    c.fit.fit_temporal = get_or(a, "fit_temporal", c.fit.fit_temporal);
    c.fit.lengthscale_prior_sd = get_or(a, "lengthscale_prior_sd", c.fit.lengthscale_prior_sd);
    c.reset_period = get_or(a, "reset_period", c.reset_period);
    c.forgetting = get_or(a, "forgetting", c.forgetting);
    c.removal_rate = get_or(a, "removal_rate", c.removal_rate);
    c.domain_window = get_or(a, "domain_window", c.domain_window);
    c.domain_nodes = get_or(a, "domain_nodes", c.domain_nodes);
    c.n_max = get_or(a, "n_max", c.n_max);
    c.n0 = get_or(a, "n0", c.n0);
    if (a.contains("n_star")) c.fixed_n_star = get_or<long>(a, "n_star", 1);
    if (c.acquisition.starts < 1 || c.acquisition.max_iterations < 0 || c.acquisition.raw_samples < 0)
        throw ConfigError("acquisition settings out of range");
    if (c.fit.restarts < 1 || c.warm_restarts < 1 || c.fit.max_iterations < 0) throw ConfigError("fit settings out of range");
    if (c.fixed_n_star && *c.fixed_n_star < 1) throw ConfigError("n_star must be at least 1");
}

}  // namespace detail

inline ExperimentConfig parse_config(const nlohmann::json& j) {
    using detail::get_or;
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    if (!j.contains("schema_version")) throw ConfigError("schema_version is required");
    if (get_or(j, "schema_version", 0) != config_schema_version)
        throw ConfigError("unsupported schema_version; expected " + std::to_string(config_schema_version));
    detail::reject_unknown(j,
                           {"schema_version", "benchmark", "replay", "algorithm", "seeds", "horizon", "warmup", "clock",
                            "output_dir", "threads"},
                           "config");
    ExperimentConfig c;
    if (j.contains("replay")) {
        const auto& r = j.at("replay");
        detail::reject_unknown(r, {"path", "noise_variance", "cost"}, "replay");
        if (!r.contains("path")) throw ConfigError("replay.path is required");
        c.replay = ReplaySource{get_or<std::string>(r, "path", ""), get_or(r, "noise_variance", 0.0), get_or(r, "cost", 1.0)};
        c.benchmark = get_or<std::string>(j, "benchmark", "replay");
    } else {
        if (!j.contains("benchmark")) throw ConfigError("benchmark is required");
        c.benchmark = get_or<std::string>(j, "benchmark", "");
        const auto& names = benchmark_names();
        if (std::find(names.begin(), names.end(), c.benchmark) == names.end())
            throw ConfigError("unknown benchmark '" + c.benchmark + "'");
    }
    if (!j.contains("algorithm")) throw ConfigError("algorithm is required");
    detail::apply_algorithm(j.at("algorithm"), c.optimizer);
    if (!j.contains("seeds")) throw ConfigError("seeds is required");
    c.seeds = get_or<std::vector<std::uint64_t>>(j, "seeds", {});
    if (j.contains("horizon")) c.horizon = get_or(j, "horizon", 0.0);
    c.warmup = get_or(j, "warmup", c.warmup);
    if (j.contains("clock")) {
        const auto& k = j.at("clock");
        detail::reject_unknown(k, {"mode", "r0", "gamma"}, "clock");
        const auto mode = get_or<std::string>(k, "mode", "simulated");
        if (mode == "simulated") c.clock.mode = ClockConfig::Mode::Simulated;
        else if (mode == "measured") c.clock.mode = ClockConfig::Mode::Measured;
        else throw ConfigError("clock.mode must be 'simulated' or 'measured'");
        c.clock.r0 = get_or(k, "r0", c.clock.r0);
        c.clock.gamma = get_or(k, "gamma", c.clock.gamma);
    }
    c.output_dir = get_or<std::string>(j, "output_dir", c.output_dir);
    c.threads = get_or(j, "threads", c.threads);
    c.validate();
    return c;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

struct TraceRow {
    long iteration = 0;
    double virtual_t = 0.0;
    Eigen::VectorXd x;
    double y = 0.0;
    double regret = 0.0;
    double cumulative_regret = 0.0;
    std::size_t dataset_size = 0;
    double response_seconds = 0.0;
};

struct RegretTrace {
    std::string benchmark;
    std::string algorithm;
    std::uint64_t seed = 0;
    int dim = 1;
    std::vector<TraceRow> rows;

    /// R_K / K; 0 for an empty trace.
    [[nodiscard]] double final_average_regret() const {
        if (rows.empty()) return 0.0;
        return rows.back().cumulative_regret / static_cast<double>(rows.size());
    }
};

inline std::string trace_file_name(const std::string& benchmark, const std::string& algorithm, std::uint64_t seed) {
    return benchmark + "__" + algorithm + "__seed" + std::to_string(seed) + ".csv";
}

inline void write_trace_csv(std::ostream& out, const RegretTrace& tr) {
    out << "iteration,virtual_t";
    for (int i = 1; i <= tr.dim; ++i) out << ",x" << i;
    out << ",y,regret,cumulative_regret,dataset_size,response_seconds\n";
    for (const auto& r : tr.rows) {
        out << r.iteration << ',' << format_double(r.virtual_t);
        for (Eigen::Index i = 0; i < r.x.size(); ++i) out << ',' << format_double(r.x(i));
        out << ',' << format_double(r.y) << ',' << format_double(r.regret) << ',' << format_double(r.cumulative_regret)
            << ',' << r.dataset_size << ',' << format_double(r.response_seconds) << '\n';
    }
}

inline RegretTrace read_trace_csv(std::istream& in) {
    RegretTrace tr;
    std::string line;
    if (!std::getline(in, line)) throw InvalidArgument("trace CSV is empty");
    std::vector<std::string> header;
    {
        std::istringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) header.push_back(cell);
    }
    if (header.size() < 8 || header[0] != "iteration" || header[1] != "virtual_t")
        throw InvalidArgument("not a trace CSV header");
    tr.dim = static_cast<int>(header.size()) - 7;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<double> v;
        std::istringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            const auto d = parse_double(cell);
            if (!d) throw InvalidArgument("trace CSV line " + std::to_string(line_no) + ": bad number '" + cell + "'");
            v.push_back(*d);
        }
        if (v.size() != header.size())
            throw InvalidArgument("trace CSV line " + std::to_string(line_no) + " has the wrong column count");
        TraceRow r;
        r.iteration = static_cast<long>(v[0]);
        r.virtual_t = v[1];
        r.x = Eigen::Map<const Eigen::VectorXd>(v.data() + 2, tr.dim);
        const auto k = static_cast<std::size_t>(2 + tr.dim);
        r.y = v[k];
        r.regret = v[k + 1];
        r.cumulative_regret = v[k + 2];
        r.dataset_size = static_cast<std::size_t>(v[k + 3]);
        r.response_seconds = v[k + 4];
        tr.rows.push_back(std::move(r));
    }
    return tr;
}

/// Writes via a temporary file and rename so readers never see partial output.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write '" + tmp + "'");
        out << content;
        out.flush();
        if (!out) throw IoError("write failed for '" + tmp + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename '" + tmp + "': " + ec.message());
}

namespace detail {

inline Benchmark make_experiment_benchmark(const ExperimentConfig& c) {
    if (c.replay) {
        const ReplayGrid grid = ReplayGrid::load(c.replay->path);
        return make_replay_benchmark(grid, c.replay->noise_variance, c.replay->cost, c.benchmark);
    }
    Benchmark b = make_benchmark(c.benchmark);
    if (c.horizon && *c.horizon > 0.0) {
        BenchmarkSpec s = b.spec();
        s.horizon = *c.horizon;
        return Benchmark(std::move(s));
    }
    return b;
}

}  // namespace detail

/// One replication. Runs while fewer than `warmup` iterations are done or the
/// clock is before the horizon.
inline RegretTrace run_seed(const ExperimentConfig& c, std::uint64_t seed) {
    Benchmark bench = detail::make_experiment_benchmark(c);
    const double horizon = c.horizon ? *c.horizon : bench.spec().horizon;
    OptimizerConfig oc = c.optimizer;
    oc.warmup = c.warmup;
    oc.seed = seed;
    if (c.clock.mode == ClockConfig::Mode::Simulated) {
        const double r0 = c.clock.r0, g = c.clock.gamma;
        oc.compute_model = [r0, g](long n) {
            const double m = static_cast<double>(n);
            return r0 + g * m * m * m;
        };
    } else {
        oc.compute_model = nullptr;
    }
    Optimizer opt(oc, bench.dim());
    GroundTruth truth(bench);
    SimulatedClock clock;

    RegretTrace tr;
    tr.benchmark = c.benchmark;
    tr.algorithm = algorithm_name(oc.algorithm);
    tr.seed = seed;
    tr.dim = bench.dim();
    double cumulative = 0.0;
    long k = 0;
    while (k < c.warmup || clock.now() < horizon) {
        const StepResult s = opt.step(bench, clock);
        ++k;
        const Regret r = truth.instantaneous_regret(s.query.x, s.query.t);
        cumulative += r.value;
        tr.rows.push_back({k, s.query.t, s.query.x, s.y, r.value, cumulative, s.dataset_size, s.response_seconds});
    }
    return tr;
}

struct RunSummary {
    std::string benchmark;
    std::string algorithm;
    std::vector<std::uint64_t> seeds;
    std::vector<double> final_average_regret;  // per seed
    std::vector<std::size_t> iterations;
    double mean = 0.0;
    double standard_error = 0.0;
};

inline RunSummary summarize(const std::vector<RegretTrace>& traces) {
    if (traces.empty()) throw InvalidArgument("no traces to summarize");
    RunSummary s;
    s.benchmark = traces.front().benchmark;
    s.algorithm = traces.front().algorithm;
    for (const auto& t : traces) {
        s.seeds.push_back(t.seed);
        s.final_average_regret.push_back(t.final_average_regret());
        s.iterations.push_back(t.rows.size());
    }
    s.mean = mean(s.final_average_regret);
    s.standard_error = standard_error(s.final_average_regret);
    return s;
}

inline std::string summary_json(const RunSummary& s) {
    nlohmann::ordered_json j;
    j["schema_version"] = config_schema_version;
    j["benchmark"] = s.benchmark;
    j["algorithm"] = s.algorithm;
    j["final_average_regret"] = {{"mean", s.mean}, {"standard_error", s.standard_error}};
    auto per = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < s.seeds.size(); ++i)
        per.push_back({{"seed", s.seeds[i]}, {"final_average_regret", s.final_average_regret[i]}, {"iterations", s.iterations[i]}});
    j["per_seed"] = per;
    return j.dump(2) + "\n";
}

/// Runs every seed (concurrently, isolated state), writes one trace CSV per
/// seed and a summary JSON into the output directory.
inline std::vector<RegretTrace> run(const ExperimentConfig& c) {
    c.validate();
    const std::filesystem::path dir(c.output_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + c.output_dir + "': " + ec.message());

    std::vector<RegretTrace> traces(c.seeds.size());
    std::vector<std::exception_ptr> errors(c.seeds.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < c.seeds.size(); i = next++) {
            try {
                traces[i] = run_seed(c, c.seeds[i]);
                std::ostringstream csv;
                write_trace_csv(csv, traces[i]);
                write_file_atomic(dir / trace_file_name(traces[i].benchmark, traces[i].algorithm, c.seeds[i]), csv.str());
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::size_t n_threads = c.threads > 0 ? static_cast<std::size_t>(c.threads) : std::thread::hardware_concurrency();
    n_threads = std::clamp<std::size_t>(n_threads, 1, c.seeds.size());
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    const RunSummary s = summarize(traces);
    write_file_atomic(dir / (s.benchmark + "__" + s.algorithm + "__summary.json"), summary_json(s));
    return traces;
}

struct NormalizedScore {
    std::string benchmark;  // "all" for the cross-benchmark average
    std::string algorithm;
    double mean_final_average_regret = 0.0;  // NaN on "all" rows
    double normalized = 0.0;
};

/// Min-max normalization per benchmark (best 0, worst 1, all 0 on a zero
/// range) followed by the per-algorithm mean over benchmarks.
inline std::vector<NormalizedScore> normalize_scores(const std::map<std::string, std::map<std::string, double>>& means) {
    if (means.empty()) throw InvalidArgument("nothing to aggregate");
    std::vector<NormalizedScore> out;
    std::map<std::string, std::pair<double, int>> totals;
    for (const auto& [bench, algos] : means) {
        if (algos.size() < 2)
            throw PreconditionError("benchmark '" + bench + "' has fewer than two algorithms; normalization undefined");
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto& [a, m] : algos) {
            lo = std::min(lo, m);
            hi = std::max(hi, m);
        }
        for (const auto& [a, m] : algos) {
            const double v = hi > lo ? (m - lo) / (hi - lo) : 0.0;
            out.push_back({bench, a, m, v});
            totals[a].first += v;
            totals[a].second += 1;
        }
    }
    for (const auto& [a, t] : totals)
        out.push_back({"all", a, std::numeric_limits<double>::quiet_NaN(), t.first / static_cast<double>(t.second)});
    return out;
}

inline void write_scores_csv(std::ostream& out, const std::vector<NormalizedScore>& scores) {
    out << "benchmark,algorithm,mean_final_average_regret,normalized_regret\n";
    for (const auto& s : scores) {
        out << s.benchmark << ',' << s.algorithm << ',';
        if (!std::isnan(s.mean_final_average_regret)) out << format_double(s.mean_final_average_regret);
        out << ',' << format_double(s.normalized) << '\n';
    }
}

/// Reads every `<benchmark>__<algorithm>__seed<k>.csv` in `dir` and returns
/// mean final average regret per benchmark and algorithm.
inline std::map<std::string, std::map<std::string, double>> collect_trace_means(const std::string& dir) {
    if (!std::filesystem::is_directory(dir)) throw IoError("'" + dir + "' is not a directory");
    std::map<std::string, std::map<std::string, std::vector<double>>> groups;
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& p : files) {
        const std::string stem = p.stem().string();
        const auto a = stem.find("__");
        const auto b = a == std::string::npos ? a : stem.find("__seed", a + 2);
        if (a == std::string::npos || b == std::string::npos) continue;
        std::ifstream in(p);
        if (!in) throw IoError("cannot read '" + p.string() + "'");
        const RegretTrace tr = read_trace_csv(in);
        groups[stem.substr(0, a)][stem.substr(a + 2, b - a - 2)].push_back(tr.final_average_regret());
    }
    if (groups.empty()) throw IoError("no trace CSVs found in '" + dir + "'");
    std::map<std::string, std::map<std::string, double>> means;
    for (const auto& [bench, algos] : groups)
        for (const auto& [algo, v] : algos) means[bench][algo] = mean(v);
    return means;
}

inline void aggregate(const std::string& in_dir, const std::string& out_csv) {
    const auto scores = normalize_scores(collect_trace_means(in_dir));
    std::ostringstream csv;
    write_scores_csv(csv, scores);
    write_file_atomic(out_csv, csv.str());
}

enum class TheoryFigure { Slope, Usize };

inline TheoryFigure parse_theory_figure(const std::string& s) {
    if (s == "slope") return TheoryFigure::Slope;
    if (s == "usize") return TheoryFigure::Usize;
    throw InvalidArgument("figure must be 'slope' or 'usize'");
}

/// RQ shape used by the theory curves.
inline constexpr double theory_rq_alpha = 10.0;

inline std::vector<KernelFamily> theory_families() {
    return {KernelFamily::matern12(), KernelFamily::matern32(), KernelFamily::matern52(), KernelFamily::rbf(),
            KernelFamily::rational_quadratic(theory_rq_alpha)};
}

/// Regret slope over a log-spaced sweep of 61 sampling frequencies in
/// [0.1, 100] Hz; d = 4, L = l_S = l_T = lambda = 1, Matern-5/2 spatial kernel.
inline void emit_slope_curves(std::ostream& out) {
    out << "frequency_hz,epsilon_c,kernel\n";
    for (const auto& fam : theory_families()) {
        for (int i = 0; i <= 60; ++i) {
            const double hz = std::pow(10.0, -1.0 + 3.0 * i / 60.0);
            TheoryParams p;
            p.d = 4;
            p.temporal = {fam, 1.0};
            p.cost = 1.0 / hz;
            out << format_double(hz) << ',' << format_double(regret_slope(p)) << ',' << fam.name() << '\n';
        }
    }
}

struct ResponseCurve {
    std::string name;
    ResponseTimeFn fn;
};

inline std::vector<ResponseCurve> theory_response_models() {
    return {{"constant", [](long) { return 0.1; }},
            {"linear", [](long n) { return 0.1 + 1e-3 * static_cast<double>(n); }},
            {"quadratic", [](long n) { return 0.1 + 1e-5 * static_cast<double>(n) * static_cast<double>(n); }},
            {"cubic", [](long n) {
                 const double m = static_cast<double>(n);
                 return 0.1 + 1e-6 * m * m * m;
             }}};
}

/// ||u_n||^2 for n = 1..300 with l_T = 10: every kernel under the cubic
/// response time, and RBF under every response model.
inline void emit_usize_curves(std::ostream& out) {
    out << "n,u_norm_sq,kernel,response_model\n";
    const auto models = theory_response_models();
    const ResponseCurve& cubic = models.back();
    auto emit = [&](const KernelFamily& fam, const ResponseCurve& rc) {
        const KernelComponent kt{fam, 10.0};
        for (long n = 1; n <= 300; ++n)
            out << n << ',' << format_double(u_norm_sq(kt, rc.fn, n)) << ',' << fam.name() << ',' << rc.name << '\n';
    };
    for (const auto& fam : theory_families()) emit(fam, cubic);
    for (std::size_t i = 0; i + 1 < models.size(); ++i) emit(KernelFamily::rbf(), models[i]);
}

inline void emit_theory_curves(TheoryFigure fig, std::ostream& out) {
    if (fig == TheoryFigure::Slope) emit_slope_curves(out);
    else emit_usize_curves(out);
}

}  // namespace bolt
