#pragma once

#include <Eigen/Core>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "acquisition.hpp"
#include "clock.hpp"
#include "error.hpp"
#include "gp.hpp"
#include "gp_fit.hpp"
#include "numeric.hpp"
#include "objective.hpp"
#include "relevancy.hpp"
#include "response_time.hpp"
#include "theory.hpp"

namespace bolt {

enum class AlgorithmKind { Bolt, GpUcb, RGpUcb, TvGpUcb, WdboBudget };

inline std::string algorithm_name(AlgorithmKind k) {
    switch (k) {
        case AlgorithmKind::Bolt: return "bolt";
        case AlgorithmKind::GpUcb: return "gp-ucb";
        case AlgorithmKind::RGpUcb: return "r-gp-ucb";
        case AlgorithmKind::TvGpUcb: return "tv-gp-ucb";
        case AlgorithmKind::WdboBudget: return "wdbo-budget";
    }
    return "unknown";
}

inline AlgorithmKind parse_algorithm(const std::string& name) {
    for (auto k : {AlgorithmKind::Bolt, AlgorithmKind::GpUcb, AlgorithmKind::RGpUcb, AlgorithmKind::TvGpUcb,
                   AlgorithmKind::WdboBudget})
        if (algorithm_name(k) == name) return k;
    throw InvalidArgument("unknown algorithm '" + name + "'");
}

inline FitOptions default_fit_options() {
    FitOptions f;
    // warm-up sized datasets barely inform the lengthscales; keep them near the configured guesses
    f.lengthscale_prior_sd = 1.0;
    return f;
}

struct OptimizerConfig {
    AlgorithmKind algorithm = AlgorithmKind::Bolt;
    /// Kernel families and initial hyperparameters (y is standardized internally).
    KernelSpec kernel{{KernelFamily::matern52(), 0.3}, KernelComponent{KernelFamily::matern32(), 30.0}, 1.0, 0.1};
    int warmup = 15;
    double lipschitz = 1.0;
    double delta = 0.05;
    double beta_min = 1e-2;
    double beta_scale = 1.0;
    MaximizeOptions acquisition{};
    /// Hyperparameters are refit every `refit_every` iterations after warm-up.
    int refit_every = 1;
    FitOptions fit = default_fit_options();
    /// Restarts for refits after the first; the current values are always one start.
    int warm_restarts = 1;
    double reset_period = 120.0;   // R-GP-UCB
    double forgetting = 0.01;      // TV-GP-UCB epsilon
    double removal_rate = 1.0;     // W-DBO budget, removals per iteration
    double domain_window = 3.0;    // relevancy window, in temporal lengthscales
    int domain_nodes = 256;
    long n_max = 2000;
    long n0 = 16;
    /// Forces n* (BOLT) instead of deriving it from the response-time model.
    std::optional<long> fixed_n_star;
    /// Modeled compute time per iteration as a function of |D|. Without it the
    /// measured wall time is charged.
    ResponseTimeFn compute_model;
    std::uint64_t seed = 0;
};

struct StepResult {
    Point query;
    double y = 0.0;
    std::vector<std::size_t> removed;
    double response_seconds = 0.0;  // compute time charged for this iteration
    std::size_t dataset_size = 0;   // after cleanup
    std::optional<long> n_star;     // empty when unbounded
    bool reset = false;
};

/// One optimizer instance; stepped sequentially by its owner.
class Optimizer {
public:
    Optimizer(OptimizerConfig config, int dim) : cfg_(std::move(config)), dim_(dim), data_(dim) {
        if (dim <= 0) throw InvalidArgument("dimension must be positive");
        if (cfg_.warmup < 0) throw InvalidArgument("warmup must be non-negative");
        if (cfg_.refit_every < 1) throw InvalidArgument("refit_every must be at least 1");
        if (!(cfg_.reset_period > 0.0)) throw InvalidArgument("reset period must be positive");
        if (!(cfg_.forgetting > 0.0 && cfg_.forgetting < 1.0)) throw InvalidArgument("forgetting must lie in (0, 1)");
        if (!(cfg_.removal_rate >= 0.0)) throw InvalidArgument("removal rate must be non-negative");
        spec_ = cfg_.kernel;
        switch (cfg_.algorithm) {
            case AlgorithmKind::GpUcb:
            case AlgorithmKind::RGpUcb: spec_.temporal.reset(); break;
            case AlgorithmKind::TvGpUcb:
                // (1 - eps)^(|i - j| / 2) = exp(-|i - j| / l) with l = 2 / -log(1 - eps)
                spec_.temporal = KernelComponent{KernelFamily::matern12(), 2.0 / -std::log1p(-cfg_.forgetting)};
                break;
            default:
                if (!spec_.temporal) throw InvalidArgument("time-aware algorithms need a temporal kernel");
        }
        spec_.validate();
        beta_.d = dim;
        beta_.lipschitz = cfg_.lipschitz;
        beta_.delta = cfg_.delta;
        beta_.beta_min = cfg_.beta_min;
        beta_.scale = cfg_.beta_scale;
        beta_.validate();
        rng_.seed(derive_seed(cfg_.seed, 0));
        post_.emplace(GpPosterior::fit(Dataset(dim), spec_));
    }

    StepResult step(Objective& f, Clock& clock) {
        if (f.dim() != dim_) throw InvalidArgument("objective dimension does not match the optimizer");
        StepResult res;
        const double t = clock.now();
        const auto wall_start = std::chrono::steady_clock::now();

        if (cfg_.algorithm == AlgorithmKind::RGpUcb) {
            const auto period = static_cast<long long>(std::floor(t / cfg_.reset_period));
            if (period != period_ && !data_.empty()) {
                clear();
                res.reset = true;
            }
            period_ = period;
        }

        const std::size_t n_start = data_.size();
        ++iteration_;
        const double t_model = model_time(t);

        Eigen::VectorXd x(dim_);
        if (iteration_ <= static_cast<long>(cfg_.warmup) || data_.empty()) {
            for (int i = 0; i < dim_; ++i) x(i) = uniform01(rng_);
        } else {
            if (since_refit_ + 1 >= cfg_.refit_every || !fitted_) refit();
            else ++since_refit_;
            const auto m = maximize(*post_, beta_, iteration_, t_model, dim_,
                                    derive_seed(cfg_.seed, 1000 + static_cast<std::uint64_t>(iteration_)), cfg_.acquisition);
            x = m.x;
        }

        const double measured =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
        const double resp = cfg_.compute_model ? cfg_.compute_model(static_cast<long>(n_start)) : measured;
        clock.advance(resp);
        const double y = f.evaluate(x, t, rng_);
        clock.advance(f.cost());

        append({x, t_model, y});

        rt_samples_.push_back({static_cast<double>(n_start), resp + f.cost()});
        rt_model_ = fit_response_model(rt_samples_);

        if (cfg_.algorithm == AlgorithmKind::Bolt) {
            update_n_star();
            if (n_star_) {
                const double t_next = clock.now();
                while (static_cast<long>(data_.size()) > *n_star_) res.removed.push_back(remove_least_relevant(t_next));
            }
        } else if (cfg_.algorithm == AlgorithmKind::WdboBudget && static_cast<long>(data_.size()) > cfg_.warmup) {
            budget_ += cfg_.removal_rate;
            const double t_next = clock.now();
            while (budget_ >= 1.0 && !data_.empty()) {
                budget_ -= 1.0;
                res.removed.push_back(remove_least_relevant(t_next));
            }
        }

        res.query = {x, t};
        res.y = y;
        res.response_seconds = resp;
        res.dataset_size = data_.size();
        res.n_star = n_star_;
        return res;
    }

    [[nodiscard]] const GpPosterior& posterior() const { return *post_; }
    [[nodiscard]] const KernelSpec& spec() const { return spec_; }
    [[nodiscard]] std::size_t dataset_size() const { return data_.size(); }
    /// Observations in natural units (timestamps are observation indices for TV-GP-UCB).
    [[nodiscard]] const Dataset& dataset() const { return data_; }
    [[nodiscard]] std::optional<long> n_star() const { return n_star_; }
    [[nodiscard]] const ResponseTimeModel& response_model() const { return rt_model_; }
    [[nodiscard]] long iteration() const { return iteration_; }
    [[nodiscard]] const OptimizerConfig& config() const { return cfg_; }

private:
    double model_time(double t) const {
        return cfg_.algorithm == AlgorithmKind::TvGpUcb ? static_cast<double>(iteration_) : t;
    }

    void clear() {
        data_.clear();
        post_.emplace(GpPosterior::fit(Dataset(dim_), spec_));
        fitted_ = false;
        since_refit_ = 0;
    }

    [[nodiscard]] Dataset standardized() const {
        Dataset s(dim_);
        for (const auto& o : data_) s.add({o.x, o.t, (o.y - y_shift_) / y_scale_});
        return s;
    }

    void refit() {
        since_refit_ = 0;
        const Eigen::VectorXd y = data_.targets();
        y_shift_ = y.mean();
        const double var = data_.size() > 1 ? (y.array() - y_shift_).square().sum() / static_cast<double>(y.size()) : 0.0;
        y_scale_ = var > 0.0 ? std::sqrt(var) : 1.0;
        Dataset s = standardized();
        if (s.size() >= 2) {
            FitOptions opt = cfg_.fit;
            opt.seed = derive_seed(cfg_.seed, 2000 + static_cast<std::uint64_t>(iteration_));
            opt.fit_temporal = cfg_.fit.fit_temporal && cfg_.algorithm != AlgorithmKind::TvGpUcb;
            // the prior stays centred on the configured lengthscales, not the last fit
            opt.prior_centre = cfg_.kernel;
            if (fitted_) opt.restarts = std::max(1, cfg_.warm_restarts);
            const FitResult r = fit_hyperparameters(s, spec_, default_bounds(s), opt);
            if (!r.degraded) spec_ = r.spec;
        }
        fitted_ = true;
        try {
            post_.emplace(GpPosterior::fit(std::move(s), spec_));
        } catch (const ConditioningError&) {
            spec_.noise_variance = std::max(spec_.noise_variance * 10.0, 1e-2);
            post_.emplace(GpPosterior::fit(standardized(), spec_));
        }
    }

    void append(const Observation& o) {
        data_.add(o);
        const Observation so{o.x, o.t, (o.y - y_shift_) / y_scale_};
        try {
            post_.emplace(post_->with_observation(so));
        } catch (const ConditioningError&) {
            spec_.noise_variance = std::max(spec_.noise_variance * 10.0, 1e-2);
            post_.emplace(GpPosterior::fit(standardized(), spec_));
        }
    }

    std::size_t remove_least_relevant(double t_now) {
        const double lt = spec_.temporal ? spec_.temporal->lengthscale : 1.0;
        const IntegrationDomain dom = default_domain(model_time(t_now), lt, cfg_.domain_window, cfg_.domain_nodes);
        const std::size_t idx = least_relevant(*post_, dom);
        data_.erase(idx);
        post_.emplace(post_->downdate(idx));
        return idx;
    }

    void update_n_star() {
        if (cfg_.fixed_n_star) {
            n_star_ = *cfg_.fixed_n_star;
            return;
        }
        if (rt_model_.is_constant() || !spec_.temporal) {
            // constant response: ||u_n||^2 increases forever
            n_star_.reset();
            return;
        }
        const ResponseTimeModel model = rt_model_;
        const ResponseTimeFn r = [model](long n) { return model(static_cast<double>(n)); };
        const long init = n_star_ ? *n_star_ : cfg_.n0;
        const SizeRecommendation rec = recommended_size(*spec_.temporal, r, cfg_.n_max, init);
        if (rec.diverged) n_star_.reset();
        else n_star_ = rec.n;
    }

    OptimizerConfig cfg_;
    int dim_;
    KernelSpec spec_;
    BetaSchedule beta_;
    Dataset data_;
    std::optional<GpPosterior> post_;
    Rng rng_;
    long iteration_ = 0;
    int since_refit_ = 0;
    bool fitted_ = false;
    double y_shift_ = 0.0;
    double y_scale_ = 1.0;
    long long period_ = std::numeric_limits<long long>::min();
    double budget_ = 0.0;
    std::vector<ResponseSample> rt_samples_;
    ResponseTimeModel rt_model_;
    std::optional<long> n_star_;
};

}  // namespace bolt
