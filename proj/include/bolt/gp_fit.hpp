#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "error.hpp"
#include "gp.hpp"
#include "numeric.hpp"

namespace bolt {

/// Box bounds on the hyperparameters, in natural units.
struct HyperBounds {
    std::array<double, 2> signal_variance{1e-3, 1e3};
    std::array<double, 2> spatial_lengthscale{1e-3, 1e3};
    std::array<double, 2> temporal_lengthscale{1e-3, 1e3};
    std::array<double, 2> noise_variance{1e-3, 1e3};
};

/// [1e-3, 1e3] times a per-parameter scale: var(y) for lambda and the noise,
/// 1 for the spatial lengthscale (inputs live in the unit cube) and the
/// observed time span for the temporal lengthscale. The temporal lengthscale
/// is also kept above the median sampling gap: shorter ones decorrelate every
/// pair of observations and cannot be identified from the data.
inline HyperBounds default_bounds(const Dataset& data, double ratio = 1e3) {
    double var_y = 0.0;
    double span = 0.0;
    double gap = 0.0;
    if (data.size() >= 2) {
        const Eigen::VectorXd y = data.targets();
        var_y = (y.array() - y.mean()).square().sum() / static_cast<double>(y.size());
        span = data.observations().back().t - data.observations().front().t;
        std::vector<double> gaps;
        for (std::size_t i = 1; i < data.size(); ++i) gaps.push_back(data[i].t - data[i - 1].t);
        std::nth_element(gaps.begin(), gaps.begin() + static_cast<std::ptrdiff_t>(gaps.size() / 2), gaps.end());
        gap = gaps[gaps.size() / 2];
    }
    const double sy = var_y > 0.0 ? var_y : 1.0;
    const double st = span > 0.0 ? span : 1.0;
    HyperBounds b;
    b.signal_variance = {sy / ratio, sy * ratio};
    b.spatial_lengthscale = {1.0 / ratio, ratio};
    b.temporal_lengthscale = {std::min(std::max(st / ratio, gap), st), st * ratio};
    b.noise_variance = {sy / ratio, sy * ratio};
    return b;
}

struct FitOptions {
    int restarts = 8;
    int max_iterations = 60;
    std::uint64_t seed = 0;
    bool fit_temporal = true;
    /// Log-normal prior on both lengthscales with this standard deviation in
    /// log space, centred on `prior_centre` (or the initial values). 0 disables it.
    double lengthscale_prior_sd = 0.0;
    std::optional<KernelSpec> prior_centre;
};

struct FitResult {
    KernelSpec spec;
    /// Maximized objective: log evidence, plus the log prior when one is set.
    double log_likelihood = -std::numeric_limits<double>::infinity();
    bool degraded = false;
};

/// Log evidence and its gradient with respect to the log hyperparameters
/// (log lambda, log l_S, log l_T, log noise). The l_T entry is 0 without a temporal kernel.
struct LikelihoodGradient {
    double value = 0.0;
    Eigen::Vector4d gradient = Eigen::Vector4d::Zero();
};

inline LikelihoodGradient log_marginal_likelihood_gradient(const Dataset& data, const KernelSpec& spec) {
    if (data.empty()) throw EmptyDataset("log marginal likelihood needs at least one observation");
    spec.validate();
    const auto n = static_cast<Eigen::Index>(data.size());
    const double lam = spec.signal_variance;
    Eigen::MatrixXd ks(n, n), kt(n, n), dks(n, n), dkt(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        ks(i, i) = 1.0;
        kt(i, i) = 1.0;
        dks(i, i) = 0.0;
        dkt(i, i) = 0.0;
        for (Eigen::Index j = 0; j < i; ++j) {
            const auto& a = data[static_cast<std::size_t>(i)];
            const auto& b = data[static_cast<std::size_t>(j)];
            const double r = (a.x - b.x).norm();
            const double lag = std::abs(a.t - b.t);
            const double s = correlation(spec.spatial, r);
            // d k / d log l = -r k'(r)
            const double ds = -r * correlation_derivative(spec.spatial.family, spec.spatial.lengthscale, r);
            double t = 1.0, dt = 0.0;
            if (spec.temporal) {
                t = correlation(*spec.temporal, lag);
                dt = -lag * correlation_derivative(spec.temporal->family, spec.temporal->lengthscale, lag);
            }
            ks(i, j) = ks(j, i) = s;
            kt(i, j) = kt(j, i) = t;
            dks(i, j) = dks(j, i) = ds;
            dkt(i, j) = dkt(j, i) = dt;
        }
    }
    Eigen::MatrixXd k = lam * ks.cwiseProduct(kt);
    Dataset copy = data;
    const GpPosterior post = GpPosterior::fit(std::move(copy), spec);
    const Eigen::VectorXd& alpha = post.alpha();
    const Eigen::VectorXd y = data.targets();
    LikelihoodGradient out;
    out.value = -0.5 * y.dot(alpha) - 0.5 * post.log_determinant() -
                0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
    const Eigen::MatrixXd w = alpha * alpha.transpose() - post.inverse();
    // 0.5 tr(W dDelta) with W symmetric reduces to an elementwise sum
    out.gradient(0) = 0.5 * w.cwiseProduct(k).sum();
    out.gradient(1) = 0.5 * lam * w.cwiseProduct(dks.cwiseProduct(kt)).sum();
    if (spec.temporal) out.gradient(2) = 0.5 * lam * w.cwiseProduct(ks.cwiseProduct(dkt)).sum();
    out.gradient(3) = 0.5 * spec.noise_variance * w.trace();
    return out;
}

namespace detail {

inline Eigen::Vector4d to_log(const KernelSpec& s) {
    return {std::log(s.signal_variance), std::log(s.spatial.lengthscale),
            s.temporal ? std::log(s.temporal->lengthscale) : 0.0, std::log(s.noise_variance)};
}

inline KernelSpec from_log(const KernelSpec& base, const Eigen::Vector4d& z) {
    KernelSpec s = base;
    s.signal_variance = std::exp(z(0));
    s.spatial.lengthscale = std::exp(z(1));
    if (s.temporal) s.temporal->lengthscale = std::exp(z(2));
    s.noise_variance = std::exp(z(3));
    return s;
}

struct LogBox {
    Eigen::Vector4d lo, hi;
    std::array<bool, 4> active{};
};

inline Eigen::Vector4d project(const LogBox& box, Eigen::Vector4d z, const Eigen::Vector4d& frozen) {
    for (int i = 0; i < 4; ++i) z(i) = box.active[static_cast<std::size_t>(i)] ? std::clamp(z(i), box.lo(i), box.hi(i)) : frozen(i);
    return z;
}

// Projected BFGS ascent with Armijo backtracking.
template <class Eval>
std::pair<Eigen::Vector4d, double> bfgs_ascent(Eval&& eval, const LogBox& box, Eigen::Vector4d z, int max_iter) {
    const Eigen::Vector4d frozen = z;
    z = project(box, z, frozen);
    auto [f, g] = eval(z);
    if (!std::isfinite(f)) return {z, f};
    auto mask = [&](Eigen::Vector4d v) {
        for (int i = 0; i < 4; ++i)
            if (!box.active[static_cast<std::size_t>(i)]) v(i) = 0.0;
        return v;
    };
    g = mask(g);
    Eigen::Matrix4d h = Eigen::Matrix4d::Identity();
    for (int it = 0; it < max_iter; ++it) {
        Eigen::Vector4d dir = mask(h * g);
        for (int i = 0; i < 4; ++i) {
            if ((z(i) <= box.lo(i) && dir(i) < 0.0) || (z(i) >= box.hi(i) && dir(i) > 0.0)) dir(i) = 0.0;
        }
        if (dir.dot(g) <= 0.0) {
            h.setIdentity();
            dir = g;
            for (int i = 0; i < 4; ++i)
                if ((z(i) <= box.lo(i) && dir(i) < 0.0) || (z(i) >= box.hi(i) && dir(i) > 0.0)) dir(i) = 0.0;
        }
        if (dir.lpNorm<Eigen::Infinity>() < 1e-8) break;
        const double cap = dir.lpNorm<Eigen::Infinity>();
        if (cap > 2.0) dir *= 2.0 / cap;
        double step = 1.0;
        bool accepted = false;
        Eigen::Vector4d zn;
        double fn = 0.0;
        Eigen::Vector4d gn;
        for (int bt = 0; bt < 20; ++bt) {
            zn = project(box, z + step * dir, frozen);
            auto r = eval(zn);
            fn = r.first;
            gn = r.second;
            if (std::isfinite(fn) && fn >= f + 1e-4 * g.dot(zn - z)) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            if (h.isIdentity()) break;
            h.setIdentity();
            continue;
        }
        gn = mask(gn);
        const Eigen::Vector4d s = zn - z;
        const Eigen::Vector4d yv = g - gn;  // gradient of -f
        const double sy = s.dot(yv);
        const double df = fn - f;
        z = zn;
        f = fn;
        g = gn;
        if (sy > 1e-12) {
            const double rho = 1.0 / sy;
            const Eigen::Matrix4d i4 = Eigen::Matrix4d::Identity();
            h = (i4 - rho * s * yv.transpose()) * h * (i4 - rho * yv * s.transpose()) + rho * s * s.transpose();
        }
        if (std::abs(df) < 1e-7 * (1.0 + std::abs(f)) || s.lpNorm<Eigen::Infinity>() < 1e-6) break;
    }
    return {z, f};
}

}  // namespace detail

/// Multi-restart maximization of the log evidence over (lambda, l_S, l_T, noise)
/// in log space. The first restart starts at `init`, the rest uniformly in the
/// log box. Kernel families are kept. The result never has a lower likelihood
/// than `init` when `init` is itself evaluable.
inline FitResult fit_hyperparameters(const Dataset& data, const KernelSpec& init, const HyperBounds& bounds,
                                     const FitOptions& options = {}) {
    if (data.size() < 2) throw PreconditionError("hyperparameter fitting needs at least two observations");
    init.validate();
    detail::LogBox box;
    auto set = [&](int i, const std::array<double, 2>& b, bool active) {
        if (!(b[0] > 0.0) || !(b[1] >= b[0])) throw InvalidParameter("hyperparameter bounds must be positive and ordered");
        box.lo(i) = std::log(b[0]);
        box.hi(i) = std::log(b[1]);
        box.active[static_cast<std::size_t>(i)] = active;
    };
    set(0, bounds.signal_variance, true);
    set(1, bounds.spatial_lengthscale, true);
    set(2, bounds.temporal_lengthscale, init.temporal.has_value() && options.fit_temporal);
    set(3, bounds.noise_variance, true);

    KernelSpec base = init;
    if (!(base.noise_variance > 0.0)) base.noise_variance = bounds.noise_variance[0];
    if (!(options.lengthscale_prior_sd >= 0.0)) throw InvalidParameter("prior standard deviation must be non-negative");
    const Eigen::Vector4d z_init = detail::to_log(base);
    Eigen::Vector4d z_prior = z_init;
    if (options.prior_centre) {
        options.prior_centre->validate();
        z_prior(1) = std::log(options.prior_centre->spatial.lengthscale);
        if (options.prior_centre->temporal) z_prior(2) = std::log(options.prior_centre->temporal->lengthscale);
    }
    const double prior_prec = options.lengthscale_prior_sd > 0.0 ? 1.0 / (options.lengthscale_prior_sd * options.lengthscale_prior_sd) : 0.0;
    auto log_prior = [&](const Eigen::Vector4d& z, Eigen::Vector4d* grad) {
        double v = 0.0;
        for (int i : {1, 2}) {
            if (!box.active[static_cast<std::size_t>(i)]) continue;
            const double dz = z(i) - z_prior(i);
            v -= 0.5 * prior_prec * dz * dz;
            if (grad) (*grad)(i) -= prior_prec * dz;
        }
        return v;
    };

    auto eval = [&](const Eigen::Vector4d& z) -> std::pair<double, Eigen::Vector4d> {
        try {
            auto r = log_marginal_likelihood_gradient(data, detail::from_log(base, z));
            if (!std::isfinite(r.value) || !r.gradient.allFinite())
                return {-std::numeric_limits<double>::infinity(), Eigen::Vector4d::Zero()};
            Eigen::Vector4d g = r.gradient;
            const double v = r.value + log_prior(z, &g);
            return {v, g};
        } catch (const ConditioningError&) {
            return {-std::numeric_limits<double>::infinity(), Eigen::Vector4d::Zero()};
        }
    };

    FitResult best;
    best.spec = init;
    best.degraded = true;
    try {
        best.log_likelihood = log_marginal_likelihood(data, init) + log_prior(z_init, nullptr);
    } catch (const ConditioningError&) {
    }

    Rng rng(options.seed);
    bool any = false;
    for (int r = 0; r < std::max(1, options.restarts); ++r) {
        Eigen::Vector4d z0 = z_init;
        if (r > 0) {
            for (int i = 0; i < 4; ++i)
                if (box.active[static_cast<std::size_t>(i)]) z0(i) = box.lo(i) + uniform01(rng) * (box.hi(i) - box.lo(i));
        }
        auto [z, f] = detail::bfgs_ascent(eval, box, z0, options.max_iterations);
        if (!std::isfinite(f)) continue;
        any = true;
        if (f > best.log_likelihood) {
            best.log_likelihood = f;
            best.spec = detail::from_log(base, z);
        }
    }
    best.degraded = !any;
    if (best.degraded) warn("hyperparameter fit: every restart failed, keeping the initial values");
    return best;
}

}  // namespace bolt
