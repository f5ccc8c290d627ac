#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "numeric.hpp"
#include "objective.hpp"
#include "qmc.hpp"

namespace bolt {

/// Raw formula of a benchmark, evaluated at z = (x_1, ..., x_d, t) in raw units.
using RawFunction = std::function<double(const Eigen::VectorXd&)>;

struct BenchmarkSpec {
    std::string name;
    int d = 1;                 // spatial dimensions; the raw formula has d + 1
    Eigen::VectorXd lower;     // raw bounds of all d + 1 coordinates
    Eigen::VectorXd upper;
    double horizon = 600.0;    // seconds mapped onto the last raw coordinate's range
    double noise_variance = 0.0;
    double cost = 1.0;
    bool minimize = true;      // raw formula is a minimization form
    RawFunction raw;
};

class Benchmark final : public Objective {
public:
    explicit Benchmark(BenchmarkSpec spec) : spec_(std::move(spec)) {
        if (spec_.d <= 0) throw InvalidParameter("benchmark needs at least one spatial dimension");
        if (spec_.lower.size() != spec_.d + 1 || spec_.upper.size() != spec_.d + 1)
            throw InvalidParameter("benchmark bounds must cover d + 1 coordinates");
        if (!(spec_.horizon >= 0.0)) throw InvalidParameter("horizon must be non-negative");
        if (!(spec_.noise_variance >= 0.0)) throw InvalidParameter("noise variance must be non-negative");
        if (!(spec_.cost > 0.0)) throw InvalidParameter("cost must be positive");
        if (!spec_.raw) throw InvalidParameter("benchmark has no formula");
    }

    [[nodiscard]] const BenchmarkSpec& spec() const { return spec_; }
    [[nodiscard]] int dim() const override { return spec_.d; }
    [[nodiscard]] double cost() const override { return spec_.cost; }

    /// Affine map of (x in [0,1]^d, t in [0, horizon]) to raw coordinates.
    [[nodiscard]] Eigen::VectorXd to_raw(const Eigen::VectorXd& x, double t) const {
        check(x, t);
        Eigen::VectorXd z(spec_.d + 1);
        const Eigen::VectorXd span = spec_.upper - spec_.lower;
        z.head(spec_.d) = spec_.lower.head(spec_.d) + x.cwiseProduct(span.head(spec_.d));
        const double frac = spec_.horizon > 0.0 ? t / spec_.horizon : 0.0;
        z(spec_.d) = spec_.lower(spec_.d) + frac * span(spec_.d);
        return z;
    }

    [[nodiscard]] std::pair<Eigen::VectorXd, double> from_raw(const Eigen::VectorXd& z) const {
        if (z.size() != spec_.d + 1) throw InvalidArgument("raw point has the wrong dimension");
        const Eigen::VectorXd span = spec_.upper - spec_.lower;
        Eigen::VectorXd x = (z.head(spec_.d) - spec_.lower.head(spec_.d)).cwiseQuotient(span.head(spec_.d));
        const double t = (z(spec_.d) - spec_.lower(spec_.d)) / span(spec_.d) * spec_.horizon;
        return {x, t};
    }

    /// Noise-free value in maximization form.
    [[nodiscard]] double value(const Eigen::VectorXd& x, double t) const {
        const double v = spec_.raw(to_raw(x, t));
        return spec_.minimize ? -v : v;
    }

    double evaluate(const Eigen::VectorXd& x, double t, Rng& rng) override {
        const double v = value(x, t);
        if (spec_.noise_variance == 0.0) return v;
        return v + std::sqrt(spec_.noise_variance) * standard_normal(rng);
    }

private:
    void check(const Eigen::VectorXd& x, double t) const {
        if (x.size() != spec_.d)
            throw InvalidArgument("point has dimension " + std::to_string(x.size()) + ", benchmark expects " +
                                  std::to_string(spec_.d));
        // past the horizon the affine time map simply continues
        if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("time " + format_double(t) + " is negative");
    }

    BenchmarkSpec spec_;
};

namespace formulas {

inline double schwefel(const Eigen::VectorXd& z) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) s += z(i) * std::sin(std::sqrt(std::abs(z(i))));
    return 418.9829 * static_cast<double>(z.size()) - s;
}

inline double eggholder(const Eigen::VectorXd& z) {
    const double a = z(0), b = z(1);
    return -(b + 47.0) * std::sin(std::sqrt(std::abs(b + a / 2.0 + 47.0))) - a * std::sin(std::sqrt(std::abs(a - b - 47.0)));
}

inline double ackley(const Eigen::VectorXd& z, double a = 20.0, double b = 0.2, double c = 2.0 * std::numbers::pi) {
    const double n = static_cast<double>(z.size());
    const double sq = z.squaredNorm() / n;
    double cs = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) cs += std::cos(c * z(i));
    return -a * std::exp(-b * std::sqrt(sq)) - std::exp(cs / n) + a + std::numbers::e;
}

// Shekel constants as printed: rows 3-4 of C repeat rows 1-2. Kept verbatim.
inline constexpr std::array<double, 10> shekel_beta{0.1, 0.2, 0.2, 0.4, 0.4, 0.6, 0.3, 0.7, 0.5, 0.5};
inline constexpr std::array<std::array<double, 10>, 4> shekel_c{{
    {4, 1, 8, 6, 3, 2, 5, 8, 6, 7},
    {4, 1, 8, 6, 7, 9, 3, 1, 2, 3.6},
    {4, 1, 8, 6, 3, 2, 5, 8, 6, 7},
    {4, 1, 8, 6, 7, 9, 3, 1, 2, 3.6},
}};

inline double shekel(const Eigen::VectorXd& z) {
    double s = 0.0;
    for (std::size_t i = 0; i < 10; ++i) {
        double q = shekel_beta[i];
        for (std::size_t j = 0; j < 4; ++j) {
            const double d = z(static_cast<Eigen::Index>(j)) - shekel_c[j][i];
            q += d * d;
        }
        s += 1.0 / q;
    }
    return -s;
}

inline double griewank(const Eigen::VectorXd& z) {
    double s = 0.0, p = 1.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        s += z(i) * z(i) / 4000.0;
        p *= std::cos(z(i) / std::sqrt(static_cast<double>(i + 1)));
    }
    return s - p + 1.0;
}

inline constexpr std::array<double, 4> hartmann_alpha{1.0, 1.2, 3.0, 3.2};
inline constexpr std::array<std::array<double, 3>, 4> hartmann3_a{{{3, 10, 30}, {0.1, 10, 35}, {3, 10, 30}, {0.1, 10, 35}}};
inline constexpr std::array<std::array<double, 3>, 4> hartmann3_p{
    {{3689, 1170, 2673}, {4699, 4387, 7470}, {1091, 8732, 5547}, {381, 5743, 8828}}};
inline constexpr std::array<std::array<double, 6>, 4> hartmann6_a{{
    {10, 3, 17, 3.50, 1.7, 8},
    {0.05, 10, 17, 0.1, 8, 14},
    {3, 3.5, 1.7, 10, 17, 8},
    {17, 8, 0.05, 10, 0.1, 14},
}};
inline constexpr std::array<std::array<double, 6>, 4> hartmann6_p{{
    {1312, 1696, 5569, 124, 8283, 5886},
    {2329, 4135, 8307, 3736, 1004, 9991},
    {2348, 1451, 3522, 2883, 3047, 6650},
    {4047, 8828, 8732, 5743, 1091, 381},
}};

template <std::size_t D>
double hartmann(const Eigen::VectorXd& z, const std::array<std::array<double, D>, 4>& a,
                const std::array<std::array<double, D>, 4>& p) {
    double s = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        double e = 0.0;
        for (std::size_t j = 0; j < D; ++j) {
            const double d = z(static_cast<Eigen::Index>(j)) - 1e-4 * p[i][j];
            e += a[i][j] * d * d;
        }
        s += hartmann_alpha[i] * std::exp(-e);
    }
    return -s;
}

inline double powell(const Eigen::VectorXd& z) {
    double s = 0.0;
    for (Eigen::Index i = 0; i + 3 < z.size(); i += 4) {
        const double a = z(i) + 10.0 * z(i + 1);
        const double b = z(i + 2) - z(i + 3);
        const double c = z(i + 1) - 2.0 * z(i + 2);
        const double e = z(i) - z(i + 3);
        s += a * a + 5.0 * b * b + c * c * c * c + 10.0 * e * e * e * e;
    }
    return s;
}

// Gaussian bump whose centre drifts along x as time goes by.
inline double drift1d(const Eigen::VectorXd& z) {
    const double centre = 0.5 + 0.35 * std::sin(4.0 * std::numbers::pi * z(1));
    const double d = (z(0) - centre) / 0.08;
    return -std::exp(-0.5 * d * d);
}

}  // namespace formulas

namespace detail {
inline BenchmarkSpec make_spec(std::string name, int raw_dim, double lo, double hi, double noise, double cost,
                               RawFunction f) {
    BenchmarkSpec s;
    s.name = std::move(name);
    s.d = raw_dim - 1;
    s.lower = Eigen::VectorXd::Constant(raw_dim, lo);
    s.upper = Eigen::VectorXd::Constant(raw_dim, hi);
    s.noise_variance = noise;
    s.cost = cost;
    s.raw = std::move(f);
    return s;
}
}  // namespace detail

inline const std::vector<std::string>& benchmark_names() {
    static const std::vector<std::string> names{"shekel",    "hartmann3", "ackley", "griewank", "eggholder",
                                                "schwefel",  "hartmann6", "powell", "drift1d"};
    return names;
}

/// Built-in benchmarks. Noise variance and cost per call follow the reference table.
inline Benchmark make_benchmark(const std::string& name) {
    using namespace formulas;
    if (name == "shekel") return Benchmark(detail::make_spec(name, 4, 0.0, 10.0, 0.02, 0.50, shekel));
    if (name == "hartmann3")
        return Benchmark(detail::make_spec(name, 3, 0.0, 1.0, 0.05, 1.00,
                                           [](const Eigen::VectorXd& z) { return hartmann<3>(z, hartmann3_a, hartmann3_p); }));
    if (name == "ackley")
        return Benchmark(detail::make_spec(name, 4, -32.0, 32.0, 0.05, 0.05, [](const Eigen::VectorXd& z) { return ackley(z); }));
    if (name == "griewank") return Benchmark(detail::make_spec(name, 6, -600.0, 600.0, 0.30, 0.05, griewank));
    if (name == "eggholder") return Benchmark(detail::make_spec(name, 2, -512.0, 512.0, 0.10, 0.05, eggholder));
    if (name == "schwefel") return Benchmark(detail::make_spec(name, 4, -500.0, 500.0, 0.25, 0.05, schwefel));
    if (name == "hartmann6")
        return Benchmark(detail::make_spec(name, 6, 0.0, 1.0, 0.05, 0.10,
                                           [](const Eigen::VectorXd& z) { return hartmann<6>(z, hartmann6_a, hartmann6_p); }));
    if (name == "powell") return Benchmark(detail::make_spec(name, 4, -4.0, 5.0, 2.50, 1.00, powell));
    if (name == "drift1d") return Benchmark(detail::make_spec(name, 2, 0.0, 1.0, 0.01, 0.50, drift1d));
    throw InvalidArgument("unknown benchmark '" + name + "'");
}

struct Optimum {
    Eigen::VectorXd x;
    double value = 0.0;
};

struct Regret {
    double value = 0.0;
    bool cache_miss = false;  // the query beat the cached optimum
};

/// Per-time maximizer cache: a scrambled Sobol scan followed by pattern-search
/// refinement of the best scan points.
class GroundTruth {
public:
    explicit GroundTruth(const Benchmark& bench, int scan_points = 4096, int refinements = 8,
                         std::uint64_t seed = 0x9d1f3a5c7e2b4d60ULL)
        : bench_(&bench), refinements_(refinements), scan_(sobol_points(bench.dim(), scan_points, seed)) {}

    const Optimum& at(double t) {
        auto it = cache_.find(t);
        if (it != cache_.end()) return it->second;
        return cache_.emplace(t, search(t)).first->second;
    }

    /// f(x*, t) - f(x, t), clamped at 0.
    Regret instantaneous_regret(const Eigen::VectorXd& x, double t) {
        const Optimum& best = at(t);
        const double v = bench_->value(x, t);
        const double r = best.value - v;
        if (r >= 0.0) return {r, false};
        if (r < -1e-9) warn("ground truth cache beaten at t=" + format_double(t) + "; cache updated");
        cache_[t] = {x, v};
        return {0.0, r < -1e-9};
    }

    [[nodiscard]] std::size_t cached_times() const { return cache_.size(); }

private:
    Optimum search(double t) const {
        const auto m = scan_.cols();
        std::vector<std::pair<double, Eigen::Index>> scored(static_cast<std::size_t>(m));
        for (Eigen::Index j = 0; j < m; ++j) scored[static_cast<std::size_t>(j)] = {bench_->value(scan_.col(j), t), j};
        const auto k = std::min<std::size_t>(static_cast<std::size_t>(refinements_), scored.size());
        std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end(),
                          [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });
        Optimum best{scan_.col(scored[0].second), scored[0].first};
        for (std::size_t i = 0; i < k; ++i) {
            Optimum o = refine(scan_.col(scored[i].second), scored[i].first, t);
            if (o.value > best.value) best = std::move(o);
        }
        return best;
    }

    // Compass search on the unit cube.
    Optimum refine(Eigen::VectorXd x, double fx, double t) const {
        double step = 0.05;
        const int d = bench_->dim();
        while (step > 1e-9) {
            bool improved = false;
            for (int i = 0; i < d && !improved; ++i) {
                for (double sgn : {1.0, -1.0}) {
                    Eigen::VectorXd y = x;
                    y(i) = std::clamp(y(i) + sgn * step, 0.0, 1.0);
                    if (y(i) == x(i)) continue;
                    const double fy = bench_->value(y, t);
                    if (fy > fx) {
                        x = std::move(y);
                        fx = fy;
                        improved = true;
                        break;
                    }
                }
            }
            if (!improved) step *= 0.5;
        }
        return {x, fx};
    }

    const Benchmark* bench_;
    int refinements_;
    Eigen::MatrixXd scan_;
    std::map<double, Optimum> cache_;
};

}  // namespace bolt
