#pragma once

#include <Eigen/Core>
#include <boost/math/constants/constants.hpp>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

#include "error.hpp"
#include "numeric.hpp"

namespace bolt {

enum class KernelKind { Matern12, Matern32, Matern52, RBF, RationalQuadratic };

/// Isotropic stationary correlation family. alpha is only read for
/// RationalQuadratic.
struct KernelFamily {
    KernelKind kind = KernelKind::Matern52;
    double alpha = 1.0;

    static KernelFamily matern12() { return {KernelKind::Matern12}; }
    static KernelFamily matern32() { return {KernelKind::Matern32}; }
    static KernelFamily matern52() { return {KernelKind::Matern52}; }
    static KernelFamily rbf() { return {KernelKind::RBF}; }
    static KernelFamily rational_quadratic(double alpha) {
        if (!(alpha > 0.0) || !std::isfinite(alpha))
            throw InvalidParameter("rational quadratic alpha must be positive and finite");
        return {KernelKind::RationalQuadratic, alpha};
    }

    friend bool operator==(const KernelFamily& a, const KernelFamily& b) {
        return a.kind == b.kind && (a.kind != KernelKind::RationalQuadratic || a.alpha == b.alpha);
    }

    [[nodiscard]] std::string name() const {
        switch (kind) {
            case KernelKind::Matern12: return "matern12";
            case KernelKind::Matern32: return "matern32";
            case KernelKind::Matern52: return "matern52";
            case KernelKind::RBF: return "rbf";
            case KernelKind::RationalQuadratic: return "rq";
        }
        return "unknown";
    }

    /// Accepts "matern12", "matern32", "matern52", "rbf" and "rq" (alpha given separately).
    static KernelFamily parse(std::string_view name, double alpha = 1.0) {
        if (name == "matern12") return matern12();
        if (name == "matern32") return matern32();
        if (name == "matern52") return matern52();
        if (name == "rbf") return rbf();
        if (name == "rq") return rational_quadratic(alpha);
        throw InvalidArgument("unknown kernel family '" + std::string(name) + "'");
    }
};

struct KernelComponent {
    KernelFamily family;
    double lengthscale = 1.0;
};

/// k((x,t),(x',t')) = lambda * k_S(|x - x'|) * k_T(|t - t'|). A missing temporal
/// component means k_T == 1 (a time-agnostic model).
struct KernelSpec {
    KernelComponent spatial{KernelFamily::matern52(), 1.0};
    std::optional<KernelComponent> temporal = KernelComponent{KernelFamily::matern32(), 1.0};
    double signal_variance = 1.0;
    double noise_variance = 0.0;

    void validate() const {
        auto check_component = [](const KernelComponent& c, const char* what) {
            if (!(c.lengthscale > 0.0) || !std::isfinite(c.lengthscale))
                throw InvalidParameter(std::string(what) + " lengthscale must be positive and finite");
            if (c.family.kind == KernelKind::RationalQuadratic && !(c.family.alpha > 0.0))
                throw InvalidParameter(std::string(what) + " rational quadratic alpha must be positive");
        };
        check_component(spatial, "spatial");
        if (temporal) check_component(*temporal, "temporal");
        if (!(signal_variance > 0.0) || !std::isfinite(signal_variance))
            throw InvalidParameter("signal variance must be positive and finite");
        if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance))
            throw InvalidParameter("noise variance must be non-negative and finite");
    }
};

/// A point of the spatio-temporal domain.
struct Point {
    Eigen::VectorXd x;
    double t = 0.0;
};

namespace detail {
inline void check_lengthscale(double l) {
    if (!(l > 0.0)) throw InvalidParameter("lengthscale must be positive");
}
template <class Real>
inline void check_lengthscale(const Real& l) {
    if (!(l > 0)) throw InvalidParameter("lengthscale must be positive");
}
}  // namespace detail

/// Correlation at a non-negative distance. Real may be a multiprecision type.
template <class Real>
Real correlation(const KernelFamily& family, const Real& lengthscale, const Real& distance) {
    using std::exp;
    using std::pow;
    using std::sqrt;
    detail::check_lengthscale(lengthscale);
    if (distance < 0) throw InvalidArgument("distance must be non-negative");
    const Real r = distance / lengthscale;
    switch (family.kind) {
        case KernelKind::Matern12: return exp(-r);
        case KernelKind::Matern32: {
            const Real s = sqrt(Real(3)) * r;
            return (1 + s) * exp(-s);
        }
        case KernelKind::Matern52: {
            const Real s = sqrt(Real(5)) * r;
            return (1 + s + s * s / 3) * exp(-s);
        }
        case KernelKind::RBF: return exp(-r * r / 2);
        case KernelKind::RationalQuadratic: {
            const Real a(family.alpha);
            return pow(1 + r * r / (2 * a), -a);
        }
    }
    return Real(0);
}

inline double correlation(const KernelFamily& family, double lengthscale, double distance) {
    return correlation<double>(family, lengthscale, distance);
}

/// d k / d distance. Zero at distance 0 except for Matern12, whose one-sided
/// derivative -1/l is returned.
inline double correlation_derivative(const KernelFamily& family, double lengthscale, double distance) {
    detail::check_lengthscale(lengthscale);
    const double l = lengthscale;
    const double r = distance / l;
    switch (family.kind) {
        case KernelKind::Matern12: return -std::exp(-r) / l;
        case KernelKind::Matern32: {
            const double s = std::sqrt(3.0) * r;
            return -3.0 * r * std::exp(-s) / l;
        }
        case KernelKind::Matern52: {
            const double s = std::sqrt(5.0) * r;
            return -(5.0 / 3.0) * r * (1.0 + s) * std::exp(-s) / l;
        }
        case KernelKind::RBF: return -r * std::exp(-0.5 * r * r) / l;
        case KernelKind::RationalQuadratic: {
            const double a = family.alpha;
            return -r * std::pow(1.0 + r * r / (2.0 * a), -a - 1.0) / l;
        }
    }
    return 0.0;
}

inline double correlation(const KernelComponent& c, double distance) {
    return correlation(c.family, c.lengthscale, distance);
}

inline double temporal_correlation(const KernelSpec& spec, double lag) {
    return spec.temporal ? correlation(*spec.temporal, std::abs(lag)) : 1.0;
}

inline double spatio_temporal_cov(const KernelSpec& spec, const Point& p, const Point& q) {
    if (p.x.size() != q.x.size())
        throw InvalidArgument("dimension mismatch: " + std::to_string(p.x.size()) + " vs " +
                              std::to_string(q.x.size()));
    const double ds = (p.x - q.x).norm();
    return spec.signal_variance * correlation(spec.spatial, ds) * temporal_correlation(spec, q.t - p.t);
}

// Spectral densities use the two-sided Fourier transform
//   S(f) = integral over R of k(tau) exp(-2 pi i f tau) dtau,
// so that 2 * integral_0^inf S(f) df = k(0) = 1. Frequencies are in Hz.

namespace detail {

// Rational quadratic as a Gamma scale mixture of squared exponentials:
// precision s ~ Gamma(shape alpha, rate alpha l^2).
inline double rq_rate(double alpha, double lengthscale) { return alpha * lengthscale * lengthscale; }

inline double rq_spectral_density(double alpha, double l, double f) {
    const double beta = rq_rate(alpha, l);
    const double nu = alpha - 0.5;
    const double root2pi = std::sqrt(2.0 * std::numbers::pi);
    if (f == 0.0) {
        if (alpha <= 0.5) return std::numeric_limits<double>::infinity();
        return root2pi * std::exp(0.5 * std::log(beta) + std::lgamma(alpha - 0.5) - std::lgamma(alpha));
    }
    const double a = 2.0 * std::numbers::pi * std::numbers::pi * f * f;
    const double arg = 2.0 * std::sqrt(a * beta);
    // exp-scaled Bessel: K_nu(x) = exp(-x) * (K_nu(x) exp(x)); boost has no scaled
    // variant so the log is taken directly, with a fallback once K underflows.
    double log_k;
    const double k = boost::math::cyl_bessel_k(std::abs(nu), arg);
    if (k > 0.0 && std::isfinite(k)) {
        log_k = std::log(k);
    } else {
        // large-argument asymptote sqrt(pi/2x) e^-x (1 + (4nu^2-1)/(8x))
        const double mu = 4.0 * nu * nu;
        log_k = 0.5 * std::log(std::numbers::pi / (2.0 * arg)) - arg + std::log1p((mu - 1.0) / (8.0 * arg));
    }
    const double log_s = std::log(root2pi) + alpha * std::log(beta) - std::lgamma(alpha) + std::log(2.0) +
                         0.5 * nu * (std::log(a) - std::log(beta)) + log_k;
    return std::exp(log_s);
}

// Matern with nu = p - 1/2: S proportional to (a^2 + w^2)^-p. Substituting
// w = a tan(theta) turns the partial mass into an integral of cos^(2p-2).
inline int matern_order(KernelKind kind) {
    switch (kind) {
        case KernelKind::Matern12: return 1;
        case KernelKind::Matern32: return 2;
        case KernelKind::Matern52: return 3;
        default: return 0;
    }
}

inline double matern_rate(KernelKind kind, double l) {
    switch (kind) {
        case KernelKind::Matern12: return 1.0 / l;
        case KernelKind::Matern32: return std::sqrt(3.0) / l;
        case KernelKind::Matern52: return std::sqrt(5.0) / l;
        default: return 0.0;
    }
}

inline double matern_full_integral(int p) {
    switch (p) {
        case 1: return std::numbers::pi / 2.0;
        case 2: return std::numbers::pi / 4.0;
        default: return 3.0 * std::numbers::pi / 16.0;
    }
}

// integral_0^phi sin^(2p-2)
inline double sin_power_integral(int p, double phi) {
    if (p == 1) return phi;
    const int m = 2 * p - 2;
    return gauss_legendre([m](double s) { return std::pow(std::sin(s), m); }, 0.0, phi);
}

// integral_0^theta cos^(2p-2)
inline double cos_power_integral(int p, double theta) {
    if (p == 1) return theta;
    const int m = 2 * p - 2;
    return gauss_legendre([m](double s) { return std::pow(std::cos(s), m); }, 0.0, theta);
}

// (F, 1 - F) for the rational quadratic, averaging the squared exponential
// result over Gamma quantiles.
inline std::pair<double, double> rq_distribution(double alpha, double l, double x) {
    const double beta = rq_rate(alpha, l);
    boost::math::gamma_distribution<double> prec(alpha, 1.0 / beta);
    boost::math::quadrature::tanh_sinh<double> integrator;
    const double c = std::numbers::sqrt2 * std::numbers::pi * x;
    auto body = [&](double p, bool tail) {
        if (p <= 0.0) return tail ? 0.0 : 1.0;
        if (p >= 1.0) return tail ? 1.0 : 0.0;
        const double s = boost::math::quantile(prec, p);
        const double z = c / std::sqrt(s);
        return tail ? std::erfc(z) : std::erf(z);
    };
    const double head = integrator.integrate([&](double p) { return body(p, false); }, 0.0, 1.0);
    const double tail = integrator.integrate([&](double p) { return body(p, true); }, 0.0, 1.0);
    return {std::clamp(head, 0.0, 1.0), std::clamp(tail, 0.0, 1.0)};
}

}  // namespace detail

/// Two-sided spectral density of the unit-variance correlation, in 1/Hz.
template <class Real>
Real spectral_density(const KernelFamily& family, const Real& lengthscale, const Real& frequency) {
    using std::exp;
    using std::sqrt;
    detail::check_lengthscale(lengthscale);
    if (frequency < 0) throw InvalidArgument("frequency must be non-negative");
    const Real pi = boost::math::constants::pi<Real>();
    const Real l = lengthscale;
    const Real w = 2 * pi * frequency;
    switch (family.kind) {
        case KernelKind::Matern12: return 2 * l / (1 + w * w * l * l);
        case KernelKind::Matern32: {
            const Real a = sqrt(Real(3)) / l;
            const Real s = a * a + w * w;
            return 4 * a * a * a / (s * s);
        }
        case KernelKind::Matern52: {
            const Real a = sqrt(Real(5)) / l;
            const Real s = a * a + w * w;
            return Real(16) / 3 * a * a * a * a * a / (s * s * s);
        }
        case KernelKind::RBF: return sqrt(2 * pi) * l * exp(-2 * pi * pi * l * l * frequency * frequency);
        case KernelKind::RationalQuadratic:
            return Real(detail::rq_spectral_density(family.alpha, static_cast<double>(lengthscale),
                                                    static_cast<double>(frequency)));
    }
    return Real(0);
}

inline double spectral_density(const KernelFamily& family, double lengthscale, double frequency) {
    return spectral_density<double>(family, lengthscale, frequency);
}

/// F(x) = 2 * integral_0^x S(f) df, in [0, 1].
inline double power_spectral_distribution(const KernelFamily& family, double lengthscale, double cutoff) {
    detail::check_lengthscale(lengthscale);
    if (cutoff < 0.0) throw InvalidArgument("cutoff must be non-negative");
    if (cutoff == 0.0) return 0.0;
    if (std::isinf(cutoff)) return 1.0;
    switch (family.kind) {
        case KernelKind::RBF: return std::erf(std::numbers::sqrt2 * std::numbers::pi * lengthscale * cutoff);
        case KernelKind::RationalQuadratic: return detail::rq_distribution(family.alpha, lengthscale, cutoff).first;
        default: {
            const int p = detail::matern_order(family.kind);
            const double a = detail::matern_rate(family.kind, lengthscale);
            const double theta = std::atan(2.0 * std::numbers::pi * cutoff / a);
            const double full = detail::matern_full_integral(p);
            if (theta <= std::numbers::pi / 4.0) return detail::cos_power_integral(p, theta) / full;
            const double phi = std::atan(a / (2.0 * std::numbers::pi * cutoff));
            return 1.0 - detail::sin_power_integral(p, phi) / full;
        }
    }
}

/// 1 - F(x), computed without cancellation for large cutoffs.
inline double power_spectral_tail(const KernelFamily& family, double lengthscale, double cutoff) {
    detail::check_lengthscale(lengthscale);
    if (cutoff < 0.0) throw InvalidArgument("cutoff must be non-negative");
    if (cutoff == 0.0) return 1.0;
    if (std::isinf(cutoff)) return 0.0;
    switch (family.kind) {
        case KernelKind::RBF: return std::erfc(std::numbers::sqrt2 * std::numbers::pi * lengthscale * cutoff);
        case KernelKind::RationalQuadratic: return detail::rq_distribution(family.alpha, lengthscale, cutoff).second;
        default: {
            const int p = detail::matern_order(family.kind);
            const double a = detail::matern_rate(family.kind, lengthscale);
            const double phi = std::atan(a / (2.0 * std::numbers::pi * cutoff));
            return detail::sin_power_integral(p, phi) / detail::matern_full_integral(p);
        }
    }
}

}  // namespace bolt
