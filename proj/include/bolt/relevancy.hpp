#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "error.hpp"
#include "gp.hpp"
#include "qmc.hpp"

namespace bolt {

/// S x [t_lo, t_hi] with S the full unit cube, integrated by scrambled Sobol nodes.
struct IntegrationDomain {
    double t_lo = 0.0;
    double t_hi = 1.0;
    int nodes = 256;
    std::uint64_t seed = 0x5eed0f7e1e7a11ULL;

    void validate() const {
        if (!std::isfinite(t_lo) || !std::isfinite(t_hi) || t_lo > t_hi)
            throw InvalidArgument("integration domain needs finite t_lo <= t_hi");
        if (nodes < 16) throw InvalidArgument("integration domain needs at least 16 nodes");
    }

    /// Lebesgue measure of S x T'. A degenerate time interval counts as a slice
    /// of measure 1 so the distance stays informative.
    [[nodiscard]] double volume() const { return t_hi > t_lo ? t_hi - t_lo : 1.0; }
};

/// Forward window [t_now, t_now + window * l_T].
inline IntegrationDomain default_domain(double t_now, double temporal_lengthscale, double window = 3.0,
                                        int nodes = 256) {
    IntegrationDomain d;
    d.t_lo = t_now;
    d.t_hi = t_now + window * temporal_lengthscale;
    d.nodes = nodes;
    return d;
}

inline std::vector<Point> integration_nodes(const IntegrationDomain& domain, int dim) {
    domain.validate();
    const Eigen::MatrixXd u = sobol_points(dim + 1, domain.nodes, domain.seed);
    std::vector<Point> pts(static_cast<std::size_t>(domain.nodes));
    for (int j = 0; j < domain.nodes; ++j) {
        pts[static_cast<std::size_t>(j)].x = u.col(j).head(dim);
        pts[static_cast<std::size_t>(j)].t = domain.t_lo + u(dim, j) * (domain.t_hi - domain.t_lo);
    }
    return pts;
}

namespace detail {
inline double integrated_distance(const std::vector<Prediction>& a, const std::vector<Prediction>& b, double volume) {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double dm = a[j].mean - b[j].mean;
        const double ds = std::sqrt(a[j].variance) - std::sqrt(b[j].variance);
        acc += dm * dm + ds * ds;
    }
    return std::sqrt(acc / static_cast<double>(a.size()) * volume);
}
}  // namespace detail

/// Integrated 2-Wasserstein distance between the posterior and its
/// leave-one-out counterpart, through an explicit downdate.
inline double w2_distance(const GpPosterior& p, std::size_t index, const IntegrationDomain& domain) {
    if (index >= p.size())
        throw IndexOutOfRange("index " + std::to_string(index) + " out of range for n=" + std::to_string(p.size()));
    const auto nodes = integration_nodes(domain, p.dataset().dim());
    const GpPosterior q = p.downdate(index);
    return detail::integrated_distance(p.predict(nodes), q.predict(nodes), domain.volume());
}

/// Every leave-one-out distance at once. With A = Delta^-1 and w = A k(D, q):
///   mu_-i = mu - w_i alpha_i / A_ii,  var_-i = var + w_i^2 / A_ii.
inline std::vector<double> w2_distances(const GpPosterior& p, const IntegrationDomain& domain) {
    const std::size_t n = p.size();
    if (n == 0) return {};
    const int dim = p.dataset().dim();
    const auto nodes = integration_nodes(domain, dim);
    const auto m = static_cast<Eigen::Index>(nodes.size());
    const auto ni = static_cast<Eigen::Index>(n);
    const double lam = p.spec().signal_variance;

    Eigen::MatrixXd kq(ni, m);
    for (Eigen::Index j = 0; j < m; ++j) kq.col(j) = p.cross_covariance(nodes[static_cast<std::size_t>(j)]);
    const Eigen::MatrixXd a = p.inverse();
    const Eigen::MatrixXd w = a * kq;
    const Eigen::VectorXd var = (lam - kq.cwiseProduct(w).colwise().sum().array()).matrix().transpose();
    const Eigen::VectorXd& alpha = p.alpha();

    std::vector<double> out(n);
    for (Eigen::Index i = 0; i < ni; ++i) {
        const double aii = a(i, i);
        double acc = 0.0;
        for (Eigen::Index j = 0; j < m; ++j) {
            const double wij = w(i, j);
            const double v_full = std::clamp(var(j), 0.0, lam);
            const double v_loo = std::clamp(var(j) + wij * wij / aii, 0.0, lam);
            const double dm = wij * alpha(i) / aii;
            const double ds = std::sqrt(v_loo) - std::sqrt(v_full);
            acc += dm * dm + ds * ds;
        }
        out[static_cast<std::size_t>(i)] = std::sqrt(acc / static_cast<double>(m) * domain.volume());
    }
    return out;
}

/// argmin of the leave-one-out distances. Scores within a relative 1e-9 of the
/// minimum tie; ties go to the oldest observation, then to the lowest index.
inline std::size_t least_relevant(const GpPosterior& p, const IntegrationDomain& domain) {
    if (p.empty()) throw EmptyDataset("least_relevant needs a non-empty dataset");
    const auto scores = w2_distances(p, domain);
    double lo = std::numeric_limits<double>::infinity();
    for (double s : scores) lo = std::min(lo, s);
    const double tol = 1e-9 * std::abs(lo) + std::numeric_limits<double>::min();
    std::size_t best = scores.size();
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (scores[i] > lo + tol) continue;
        if (best == scores.size() || p.dataset()[i].t < p.dataset()[best].t) best = i;
    }
    return best;
}

}  // namespace bolt
