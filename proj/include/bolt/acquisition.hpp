#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "error.hpp"
#include "gp.hpp"
#include "numeric.hpp"

namespace bolt {

/// beta_n = scale * (2d log(L d n^2 / (6 delta)) + 4 log(pi n))
struct BetaSchedule {
    int d = 1;
    double lipschitz = 1.0;
    double delta = 0.05;
    double beta_min = 1e-2;
    double scale = 1.0;  // 1 is the schedule as stated; smaller values exploit more

    void validate() const {
        if (d <= 0) throw InvalidParameter("beta schedule dimension must be positive");
        if (!(lipschitz > 0.0)) throw InvalidParameter("Lipschitz constant must be positive");
        if (!(delta > 0.0 && delta < 1.0)) throw InvalidParameter("delta must lie in (0, 1)");
        if (!(beta_min > 0.0)) throw InvalidParameter("beta floor must be positive");
        if (!(scale > 0.0) || !std::isfinite(scale)) throw InvalidParameter("beta scale must be positive");
    }
};

struct BetaValue {
    double value = 0.0;
    bool floored = false;
};

/// A log argument below 1 makes the schedule meaningless; the value then drops
/// to the configured floor and the result is flagged.
inline BetaValue beta(const BetaSchedule& s, long n) {
    s.validate();
    if (n < 1) throw InvalidArgument("beta needs n >= 1");
    const double nn = static_cast<double>(n);
    const double arg = s.lipschitz * s.d * nn * nn / (6.0 * s.delta);
    if (arg < 1.0) return {s.beta_min, true};
    const double v = 2.0 * s.d * std::log(arg) + 4.0 * std::log(std::numbers::pi * nn);
    if (!(v > 0.0)) return {s.beta_min, true};
    return {std::max(s.scale * v, s.beta_min), false};
}

/// mu + sqrt(beta) sigma
inline double ucb_value(double mean, double variance, double beta_value) {
    return mean + std::sqrt(beta_value) * std::sqrt(std::max(variance, 0.0));
}

inline double ucb(const GpPosterior& p, const BetaSchedule& s, long n, const Point& q) {
    const Prediction pr = p.predict(q);
    return ucb_value(pr.mean, pr.variance, beta(s, n).value);
}

struct MaximizeOptions {
    int starts = 10;
    /// When positive, this many uniform candidates are scored first and the
    /// best ones join the random starts.
    int raw_samples = 0;
    int max_iterations = 50;
};

struct Maximum {
    Eigen::VectorXd x;
    double value = 0.0;
};

namespace detail {

struct UcbEval {
    double value;
    Eigen::VectorXd grad;
};

inline UcbEval ucb_with_gradient(const GpPosterior& p, double beta_value, const Eigen::VectorXd& x, double t) {
    const PredictionGradient g = p.predict_with_gradient({x, t});
    const double sb = std::sqrt(beta_value);
    const double sd = std::sqrt(g.variance);
    UcbEval out{g.mean + sb * sd, g.mean_grad};
    if (sd > 1e-12) out.grad += (sb * 0.5 / sd) * g.variance_grad;
    return out;
}

// Projected gradient ascent on the unit cube with an adaptive step length.
inline Maximum local_ascent(const GpPosterior& p, double beta_value, Eigen::VectorXd x, double t, int max_iter) {
    auto e = ucb_with_gradient(p, beta_value, x, t);
    double step = 0.1;
    for (int it = 0; it < max_iter && step > 1e-6; ++it) {
        const double gn = e.grad.norm();
        if (!(gn > 1e-12)) break;
        const Eigen::VectorXd xn = (x + (step / gn) * e.grad).cwiseMax(0.0).cwiseMin(1.0);
        if ((xn - x).norm() < 1e-12) break;
        auto en = ucb_with_gradient(p, beta_value, xn, t);
        if (en.value > e.value) {
            x = xn;
            e = std::move(en);
            step = std::min(step * 2.0, 1.0);
        } else {
            step *= 0.25;
        }
    }
    return {x, e.value};
}

}  // namespace detail

/// Best of `starts` local ascents of x -> ucb(x, t_now). Starts are uniform in
/// the unit cube, drawn from `seed`; ties keep the earliest start.
inline Maximum maximize(const GpPosterior& p, const BetaSchedule& s, long n, double t_now, int dim, std::uint64_t seed,
                        const MaximizeOptions& options = {}) {
    if (options.starts < 1) throw InvalidArgument("maximize needs at least one start");
    if (dim <= 0) throw InvalidArgument("dimension must be positive");
    const double b = beta(s, n).value;
    Rng rng(seed);
    auto draw = [&] {
        Eigen::VectorXd x(dim);
        for (int i = 0; i < dim; ++i) x(i) = uniform01(rng);
        return x;
    };
    std::vector<Eigen::VectorXd> starts;
    for (int i = 0; i < options.starts; ++i) starts.push_back(draw());
    if (options.raw_samples > 0 && !p.empty()) {
        std::vector<Point> cand;
        cand.reserve(static_cast<std::size_t>(options.raw_samples));
        for (int i = 0; i < options.raw_samples; ++i) cand.push_back({draw(), t_now});
        const auto preds = p.predict(cand);
        std::vector<std::size_t> order(cand.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t c) {
            return ucb_value(preds[a].mean, preds[a].variance, b) > ucb_value(preds[c].mean, preds[c].variance, b);
        });
        const std::size_t extra = std::min<std::size_t>(order.size(), static_cast<std::size_t>(options.starts));
        for (std::size_t i = 0; i < extra; ++i) starts.push_back(cand[order[i]].x);
    }
    Maximum best{starts.front(), -std::numeric_limits<double>::infinity()};
    for (const auto& x0 : starts) {
        Maximum m = detail::local_ascent(p, b, x0, t_now, options.max_iterations);
        if (m.value > best.value) best = std::move(m);
    }
    return best;
}

}  // namespace bolt
