#pragma once

#include <boost/math/constants/constants.hpp>

#include <cmath>
#include <functional>
#include <vector>

#include "error.hpp"
#include "kernels.hpp"
#include "numeric.hpp"

namespace bolt {

struct TheoryParams {
    int d = 1;
    double lipschitz = 1.0;
    double signal_variance = 1.0;
    double noise_variance = 0.0;
    KernelComponent spatial{KernelFamily::matern52(), 1.0};
    KernelComponent temporal{KernelFamily::matern32(), 1.0};
    double cost = 1.0;  // seconds per objective call

    void validate() const {
        if (d <= 0) throw InvalidParameter("d must be positive");
        if (!(lipschitz >= 0.0)) throw InvalidParameter("Lipschitz constant must be non-negative");
        if (!(signal_variance > 0.0)) throw InvalidParameter("signal variance must be positive");
        if (!(noise_variance >= 0.0)) throw InvalidParameter("noise variance must be non-negative");
        if (!(spatial.lengthscale > 0.0) || !(temporal.lengthscale > 0.0))
            throw InvalidParameter("lengthscales must be positive");
        if (!(cost > 0.0)) throw InvalidParameter("cost must be positive");
    }
};

/// sigma_c^2 = 2 lambda (1 + k_S(sqrt d)) (1 - F_T(1/c))
inline double sigma_c_sq(const TheoryParams& p) {
    p.validate();
    const double ks = correlation(p.spatial, std::sqrt(static_cast<double>(p.d)));
    const double tail = power_spectral_tail(p.temporal.family, p.temporal.lengthscale, 1.0 / p.cost);
    return std::max(0.0, 2.0 * p.signal_variance * (1.0 + ks) * tail);
}

/// E[X | X > 0] weighted form mu + sigma phi(z)/(1 - Phi(z)), z = -mu/sigma,
/// rewritten as sigma * h(z) to stay finite deep in the tail.
inline double expected_truncated_regret(double mu, double sigma) {
    if (!(sigma > 0.0)) throw InvalidParameter("sigma must be positive");
    return sigma * mills_excess(-mu / sigma);
}

/// eps_c = sigma_c phi(a/sigma_c)/(1 - Phi(a/sigma_c)) - a with a = L sqrt(d).
inline double regret_slope_from_sigma(double sigma_c, double lipschitz, int d) {
    if (!(sigma_c >= 0.0)) throw InvalidParameter("sigma_c must be non-negative");
    if (sigma_c == 0.0) return 0.0;
    const double a = lipschitz * std::sqrt(static_cast<double>(d));
    return sigma_c * mills_excess(a / sigma_c);
}

inline double regret_slope(const TheoryParams& p) {
    return regret_slope_from_sigma(std::sqrt(sigma_c_sq(p)), p.lipschitz, p.d);
}

using ResponseTimeFn = std::function<double(long)>;

/// ||u_n||^2 = sum_{i=1..n} k_T(i R(n))^2
inline double u_norm_sq(const KernelComponent& temporal, const ResponseTimeFn& response, long n) {
    if (n < 1) throw InvalidArgument("u_norm_sq needs n >= 1");
    const double r = response(n);
    if (!(r > 0.0)) throw InvalidParameter("response time must be positive");
    double acc = 0.0;
    for (long i = 1; i <= n; ++i) {
        const double k = correlation(temporal, static_cast<double>(i) * r);
        if (k == 0.0) break;
        acc += k * k;
    }
    return acc;
}

struct SizeRecommendation {
    long n = 1;
    bool diverged = false;
};

/// Walks n <- n + sign(Delta u(n)) from n0 and stops where the finite difference
/// changes sign, returning the endpoint with the larger ||u_n||^2. Reaching
/// n_max sets the divergence flag.
inline SizeRecommendation recommended_size(const KernelComponent& temporal, const ResponseTimeFn& response,
                                           long n_max = 2000, long n0 = 16) {
    if (n_max < 1) throw InvalidArgument("n_max must be at least 1");
    long n = std::clamp(n0, 1L, n_max);
    auto u = [&](long m) { return u_norm_sq(temporal, response, m); };
    double un = u(n);
    if (n == n_max) {
        // only downward moves remain possible
        while (n > 1) {
            const double prev = u(n - 1);
            if (prev < un) break;
            n -= 1;
            un = prev;
        }
        return {n, n == n_max};
    }
    // With R(n + 1) == R(n) the sum only gains a positive term, so an exact tie
    // is rounding and the walk keeps climbing.
    auto climbs = [&](long m, double um, double up) { return up > um || (up == um && response(m + 1) == response(m)); };
    double next = u(n + 1);
    if (climbs(n, un, next)) {
        while (climbs(n, un, next)) {
            n += 1;
            un = next;
            if (n == n_max) return {n_max, true};
            next = u(n + 1);
        }
        return {n, false};
    }
    while (n > 1) {
        const double prev = u(n - 1);
        if (prev < un) break;
        n -= 1;
        un = prev;
    }
    return {n, false};
}

/// 2 + sqrt(4 lambda beta_T T (T - lambda k_S(sqrt d)^2 ||u_n||^2 / (lambda + noise)))
inline double upper_bound(const TheoryParams& p, double beta_t, long horizon, long n, double u_sq) {
    p.validate();
    if (n < 1) throw InvalidArgument("n must be at least 1");
    if (horizon < n) throw PreconditionError("upper bound requires T >= n");
    const double lam = p.signal_variance;
    const double ks = correlation(p.spatial, std::sqrt(static_cast<double>(p.d)));
    const double t = static_cast<double>(horizon);
    const double inner = t - lam * ks * ks * u_sq / (lam + p.noise_variance);
    return 2.0 + std::sqrt(4.0 * lam * beta_t * t * std::max(0.0, inner));
}

inline double upper_bound(const TheoryParams& p, double beta_t, long horizon, long n, const ResponseTimeFn& response) {
    return upper_bound(p, beta_t, horizon, n, u_norm_sq(p.temporal, response, n));
}

/// Posterior variance ceiling for a steady-state dataset observed at lags
/// R, 2R, ..., nR before the query:
///   lambda (1 - lambda k_S(sqrt d)^2 ||u_n||^2 / (n (lambda + noise)))
inline double steady_state_variance_bound(double lambda, double noise, double ks_sqrt_d, double u_sq, long n) {
    if (n < 1) throw InvalidArgument("n must be at least 1");
    return lambda * (1.0 - lambda * ks_sqrt_d * ks_sqrt_d * u_sq / (static_cast<double>(n) * (lambda + noise)));
}

/// Eigenvalues lambda_0..lambda_{count-1} of the symmetric circulant matrix with
/// first row k(c m) + k(c (n - m)), m = 0..n-1. Real may be a multiprecision type.
template <class Real>
std::vector<Real> circulant_eigs(const KernelFamily& family, const Real& lengthscale, const Real& c, std::size_t n,
                                 std::size_t count) {
    using std::cos;
    if (n < 2) throw InvalidArgument("circulant size must be at least 2");
    if (!(c > 0)) throw InvalidParameter("sampling period must be positive");
    count = std::min(count, n);
    std::vector<Real> k(n + 1);
    for (std::size_t m = 0; m <= n; ++m) k[m] = correlation<Real>(family, lengthscale, c * Real(m));
    std::vector<Real> row(n);
    for (std::size_t m = 0; m < n; ++m) row[m] = k[m] + k[n - m];
    const Real two_pi = 2 * boost::math::constants::pi<Real>();
    std::vector<Real> cosines(n);
    for (std::size_t m = 0; m < n; ++m) cosines[m] = cos(two_pi * Real(m) / Real(n));
    std::vector<Real> eig(count);
    for (std::size_t j = 0; j < count; ++j) {
        Real acc = 0;
        std::size_t idx = 0;
        for (std::size_t m = 0; m < n; ++m) {
            acc += row[m] * cosines[idx];
            idx += j;
            if (idx >= n) idx %= n;
        }
        eig[j] = acc;
    }
    return eig;
}

template <class Real>
std::vector<Real> circulant_eigs(const KernelFamily& family, const Real& lengthscale, const Real& c, std::size_t n) {
    return circulant_eigs<Real>(family, lengthscale, c, n, n);
}

inline std::vector<double> circulant_eigs(const KernelComponent& temporal, double c, std::size_t n) {
    return circulant_eigs<double>(temporal.family, temporal.lengthscale, c, n, n);
}

/// Continuous approximation of lambda_j: (2/c) times the half-line transform
/// of k, i.e. S(j/(n c)) / c with the two-sided density used here.
template <class Real>
Real circulant_eig_approximation(const KernelFamily& family, const Real& lengthscale, const Real& c, std::size_t n,
                                 std::size_t j) {
    return spectral_density<Real>(family, lengthscale, Real(j) / (Real(n) * c)) / c;
}

}  // namespace bolt
