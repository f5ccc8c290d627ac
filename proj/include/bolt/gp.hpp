#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>
#include <vector>

#include "error.hpp"
#include "kernels.hpp"

namespace bolt {

struct Observation {
    Eigen::VectorXd x;
    double t = 0.0;
    double y = 0.0;

    [[nodiscard]] Point point() const { return {x, t}; }
};

/// Ordered observations sharing one spatial dimension, timestamps non-decreasing.
class Dataset {
public:
    Dataset() = default;
    explicit Dataset(int dim) : dim_(dim) {
        if (dim <= 0) throw InvalidArgument("dataset dimension must be positive");
    }

    void add(Observation o) {
        if (dim_ == 0) dim_ = static_cast<int>(o.x.size());
        if (o.x.size() != dim_)
            throw InvalidArgument("observation has dimension " + std::to_string(o.x.size()) + ", dataset has " +
                                  std::to_string(dim_));
        if (!std::isfinite(o.t) || !std::isfinite(o.y) || !o.x.allFinite())
            throw InvalidArgument("observation contains a non-finite value");
        if (!obs_.empty() && o.t < obs_.back().t) throw InvalidArgument("timestamps must be non-decreasing");
        obs_.push_back(std::move(o));
    }

    void erase(std::size_t index) {
        if (index >= obs_.size()) throw IndexOutOfRange("index " + std::to_string(index) + " out of range");
        obs_.erase(obs_.begin() + static_cast<std::ptrdiff_t>(index));
    }

    void clear() { obs_.clear(); }

    [[nodiscard]] std::size_t size() const { return obs_.size(); }
    [[nodiscard]] bool empty() const { return obs_.empty(); }
    [[nodiscard]] int dim() const { return dim_; }
    [[nodiscard]] const Observation& operator[](std::size_t i) const { return obs_[i]; }
    [[nodiscard]] const std::vector<Observation>& observations() const { return obs_; }
    [[nodiscard]] auto begin() const { return obs_.begin(); }
    [[nodiscard]] auto end() const { return obs_.end(); }

    [[nodiscard]] Eigen::VectorXd targets() const {
        Eigen::VectorXd y(static_cast<Eigen::Index>(obs_.size()));
        for (std::size_t i = 0; i < obs_.size(); ++i) y(static_cast<Eigen::Index>(i)) = obs_[i].y;
        return y;
    }

private:
    std::vector<Observation> obs_;
    int dim_ = 0;
};

/// Prior covariance matrix K over the dataset inputs (no noise).
inline Eigen::MatrixXd gram_matrix(const Dataset& data, const KernelSpec& spec) {
    const auto n = static_cast<Eigen::Index>(data.size());
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        k(i, i) = spec.signal_variance;
        for (Eigen::Index j = 0; j < i; ++j) {
            const auto& a = data[static_cast<std::size_t>(i)];
            const auto& b = data[static_cast<std::size_t>(j)];
            const double v = spec.signal_variance * correlation(spec.spatial, (a.x - b.x).norm()) *
                             temporal_correlation(spec, a.t - b.t);
            k(i, j) = v;
            k(j, i) = v;
        }
    }
    return k;
}

struct Prediction {
    double mean = 0.0;
    double variance = 0.0;
};

/// Prediction with its gradient in the spatial coordinates.
struct PredictionGradient {
    double mean = 0.0;
    double variance = 0.0;
    Eigen::VectorXd mean_grad;
    Eigen::VectorXd variance_grad;
};

namespace detail {

inline double clamp_variance(double v, double prior) {
    if (v < -1e-10 * std::max(1.0, prior)) {
        std::ostringstream os;
        os << "posterior variance " << v << " clamped to 0";
        warn(os.str());
    }
    return std::clamp(v, 0.0, prior);
}

// L L^T + v v^T, in place on the lower triangle.
inline void cholesky_rank_one_update(Eigen::Ref<Eigen::MatrixXd> l, Eigen::VectorXd v) {
    const Eigen::Index m = l.rows();
    for (Eigen::Index k = 0; k < m; ++k) {
        const double lkk = l(k, k);
        const double r = std::hypot(lkk, v(k));
        const double c = r / lkk;
        const double s = v(k) / lkk;
        l(k, k) = r;
        for (Eigen::Index i = k + 1; i < m; ++i) {
            l(i, k) = (l(i, k) + s * v(i)) / c;
            v(i) = c * v(i) - s * l(i, k);
        }
    }
}

inline double condition_estimate(const Eigen::MatrixXd& a) {
    if (a.rows() == 0) return 1.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
    return hi / lo;
}

}  // namespace detail

/// Exact GP posterior. Immutable: downdate and with_observation return new values.
class GpPosterior {
public:
    /// Factorizes K + noise*I, escalating a diagonal jitter from 1e-10*lambda to
    /// 1e-4*lambda when the plain factorization fails.
    static GpPosterior fit(Dataset dataset, const KernelSpec& spec) {
        spec.validate();
        GpPosterior p;
        p.spec_ = spec;
        p.data_ = std::move(dataset);
        const auto n = static_cast<Eigen::Index>(p.data_.size());
        if (n == 0) {
            p.chol_.resize(0, 0);
            p.alpha_.resize(0);
            return p;
        }
        Eigen::MatrixXd delta = gram_matrix(p.data_, spec);
        delta.diagonal().array() += spec.noise_variance;
        double jitter = 0.0;
        const double lam = spec.signal_variance;
        while (true) {
            Eigen::MatrixXd a = delta;
            a.diagonal().array() += jitter;
            Eigen::LLT<Eigen::MatrixXd> llt(a);
            if (llt.info() == Eigen::Success) {
                p.chol_ = llt.matrixL();
                p.jitter_ = jitter;
                break;
            }
            jitter = jitter == 0.0 ? 1e-10 * lam : jitter * 10.0;
            if (jitter > 1e-4 * lam * (1.0 + 1e-9)) {
                const double cond = detail::condition_estimate(delta);
                std::ostringstream os;
                os << "Cholesky factorization failed for n=" << n << " (condition estimate " << cond << ")";
                throw ConditioningError(os.str(), static_cast<std::size_t>(n), cond);
            }
        }
        p.solve_alpha();
        return p;
    }

    [[nodiscard]] const Dataset& dataset() const { return data_; }
    [[nodiscard]] const KernelSpec& spec() const { return spec_; }
    [[nodiscard]] const Eigen::MatrixXd& cholesky() const { return chol_; }
    [[nodiscard]] const Eigen::VectorXd& alpha() const { return alpha_; }
    [[nodiscard]] double jitter() const { return jitter_; }
    [[nodiscard]] std::size_t size() const { return data_.size(); }
    [[nodiscard]] bool empty() const { return data_.empty(); }

    /// k(D, q)
    [[nodiscard]] Eigen::VectorXd cross_covariance(const Point& q) const {
        check_point(q);
        const auto n = static_cast<Eigen::Index>(data_.size());
        Eigen::VectorXd k(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto& o = data_[static_cast<std::size_t>(i)];
            k(i) = spec_.signal_variance * correlation(spec_.spatial, (o.x - q.x).norm()) *
                   temporal_correlation(spec_, q.t - o.t);
        }
        return k;
    }

    [[nodiscard]] Prediction predict(const Point& q) const {
        check_point(q);
        const double lam = spec_.signal_variance;
        if (data_.empty()) return {0.0, lam};
        const Eigen::VectorXd k = cross_covariance(q);
        const Eigen::VectorXd v = chol_.triangularView<Eigen::Lower>().solve(k);
        return {k.dot(alpha_), detail::clamp_variance(lam - v.squaredNorm(), lam)};
    }

    /// Means and variances at many points, sharing one triangular solve.
    [[nodiscard]] std::vector<Prediction> predict(const std::vector<Point>& qs) const {
        std::vector<Prediction> out(qs.size());
        const double lam = spec_.signal_variance;
        if (data_.empty()) {
            for (const auto& q : qs) check_point(q);
            std::fill(out.begin(), out.end(), Prediction{0.0, lam});
            return out;
        }
        const auto n = static_cast<Eigen::Index>(data_.size());
        Eigen::MatrixXd kq(n, static_cast<Eigen::Index>(qs.size()));
        for (std::size_t j = 0; j < qs.size(); ++j) kq.col(static_cast<Eigen::Index>(j)) = cross_covariance(qs[j]);
        const Eigen::VectorXd means = kq.transpose() * alpha_;
        chol_.triangularView<Eigen::Lower>().solveInPlace(kq);
        const Eigen::VectorXd reduction = kq.colwise().squaredNorm().transpose();
        for (std::size_t j = 0; j < qs.size(); ++j) {
            const auto jj = static_cast<Eigen::Index>(j);
            out[j] = {means(jj), detail::clamp_variance(lam - reduction(jj), lam)};
        }
        return out;
    }

    [[nodiscard]] double covariance(const Point& q1, const Point& q2) const {
        check_point(q1);
        check_point(q2);
        const double prior = spatio_temporal_cov(spec_, q1, q2);
        if (data_.empty()) return prior;
        const Eigen::VectorXd v1 = chol_.triangularView<Eigen::Lower>().solve(cross_covariance(q1));
        const Eigen::VectorXd v2 = chol_.triangularView<Eigen::Lower>().solve(cross_covariance(q2));
        const double c = prior - v1.dot(v2);
        if (q1.t == q2.t && q1.x == q2.x) return detail::clamp_variance(c, spec_.signal_variance);
        return c;
    }

    /// Mean, variance and their spatial gradients at q.
    [[nodiscard]] PredictionGradient predict_with_gradient(const Point& q) const {
        check_point(q);
        const Eigen::Index d = q.x.size();
        const double lam = spec_.signal_variance;
        PredictionGradient out{0.0, lam, Eigen::VectorXd::Zero(d), Eigen::VectorXd::Zero(d)};
        if (data_.empty()) return out;
        const auto n = static_cast<Eigen::Index>(data_.size());
        Eigen::VectorXd k(n);
        Eigen::MatrixXd dk(d, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto& o = data_[static_cast<std::size_t>(i)];
            const Eigen::VectorXd diff = q.x - o.x;
            const double r = diff.norm();
            const double kt = lam * temporal_correlation(spec_, q.t - o.t);
            k(i) = kt * correlation(spec_.spatial, r);
            if (r > 0.0) {
                dk.col(i) = (kt * correlation_derivative(spec_.spatial.family, spec_.spatial.lengthscale, r) / r) * diff;
            } else {
                dk.col(i).setZero();
            }
        }
        const Eigen::VectorXd v = chol_.triangularView<Eigen::Lower>().solve(k);
        const Eigen::VectorXd w = chol_.transpose().triangularView<Eigen::Upper>().solve(v);
        out.mean = k.dot(alpha_);
        out.variance = detail::clamp_variance(lam - v.squaredNorm(), lam);
        out.mean_grad = dk * alpha_;
        out.variance_grad = -2.0 * (dk * w);
        return out;
    }

    /// Posterior of the dataset with observation `index` removed. Quadratic cost:
    /// the factor loses a row and column and the trailing block takes a rank-one update.
    [[nodiscard]] GpPosterior downdate(std::size_t index) const {
        const std::size_t n = data_.size();
        if (index >= n)
            throw IndexOutOfRange("downdate index " + std::to_string(index) + " out of range for n=" +
                                  std::to_string(n));
        GpPosterior p;
        p.spec_ = spec_;
        p.jitter_ = jitter_;
        p.data_ = data_;
        p.data_.erase(index);
        const auto ni = static_cast<Eigen::Index>(n);
        const auto k = static_cast<Eigen::Index>(index);
        const Eigen::Index m = ni - k - 1;
        Eigen::MatrixXd l(ni - 1, ni - 1);
        l.setZero();
        l.topLeftCorner(k, k) = chol_.topLeftCorner(k, k);
        l.bottomLeftCorner(m, k) = chol_.bottomLeftCorner(m, k);
        l.bottomRightCorner(m, m) = chol_.bottomRightCorner(m, m);
        if (m > 0) detail::cholesky_rank_one_update(l.bottomRightCorner(m, m), chol_.col(k).tail(m));
        p.chol_ = std::move(l);
        p.solve_alpha();
        return p;
    }

    /// Posterior after appending one observation, extending the factor in O(n^2).
    [[nodiscard]] GpPosterior with_observation(const Observation& o) const {
        Dataset grown = data_;
        grown.add(o);
        const auto n = static_cast<Eigen::Index>(data_.size());
        const Eigen::VectorXd k = cross_covariance(o.point());
        const double diag = spec_.signal_variance + spec_.noise_variance + jitter_;
        Eigen::VectorXd row = chol_.triangularView<Eigen::Lower>().solve(k);
        const double d2 = diag - row.squaredNorm();
        if (!(d2 > 1e-12 * spec_.signal_variance)) return fit(std::move(grown), spec_);
        GpPosterior p;
        p.spec_ = spec_;
        p.jitter_ = jitter_;
        p.data_ = std::move(grown);
        p.chol_.resize(n + 1, n + 1);
        p.chol_.topLeftCorner(n, n) = chol_;
        p.chol_.topRightCorner(n, 1).setZero();
        p.chol_.bottomLeftCorner(1, n) = row.transpose();
        p.chol_(n, n) = std::sqrt(d2);
        p.solve_alpha();
        return p;
    }

    /// (K + noise*I + jitter*I)^-1
    [[nodiscard]] Eigen::MatrixXd inverse() const {
        const auto n = static_cast<Eigen::Index>(data_.size());
        Eigen::MatrixXd inv = Eigen::MatrixXd::Identity(n, n);
        chol_.triangularView<Eigen::Lower>().solveInPlace(inv);
        chol_.transpose().triangularView<Eigen::Upper>().solveInPlace(inv);
        return inv;
    }

    [[nodiscard]] double log_determinant() const { return 2.0 * chol_.diagonal().array().log().sum(); }

private:
    GpPosterior() = default;

    void check_point(const Point& q) const {
        if (data_.dim() != 0 && q.x.size() != data_.dim())
            throw InvalidArgument("query has dimension " + std::to_string(q.x.size()) + ", dataset has " +
                                  std::to_string(data_.dim()));
    }

    void solve_alpha() {
        alpha_ = chol_.triangularView<Eigen::Lower>().solve(data_.targets());
        chol_.transpose().triangularView<Eigen::Upper>().solveInPlace(alpha_);
    }

    Dataset data_;
    KernelSpec spec_;
    Eigen::MatrixXd chol_;
    Eigen::VectorXd alpha_;
    double jitter_ = 0.0;
};

/// log N(y | 0, K + noise*I).
inline double log_marginal_likelihood(const Dataset& data, const KernelSpec& spec) {
    if (data.empty()) throw EmptyDataset("log marginal likelihood needs at least one observation");
    const GpPosterior p = GpPosterior::fit(data, spec);
    const auto n = static_cast<double>(data.size());
    return -0.5 * data.targets().dot(p.alpha()) - 0.5 * p.log_determinant() -
           0.5 * n * std::log(2.0 * std::numbers::pi);
}

}  // namespace bolt
