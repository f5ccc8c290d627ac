#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>
#include <boost/random/uniform_int_distribution.hpp>

namespace bolt {

// boost::random distributions are specified bit-for-bit, unlike the <random>
// ones, which keeps traces identical across standard libraries.
using Rng = boost::random::mt19937_64;

inline double uniform01(Rng& rng) { return boost::random::uniform_01<double>{}(rng); }

inline double standard_normal(Rng& rng) { return boost::random::normal_distribution<double>{}(rng); }

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finalizer
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

/// Upper tail Q(z) = 1 - Phi(z), accurate for large z.
inline double normal_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

/// h(z) = phi(z) / (1 - Phi(z)) - z, the inverse Mills ratio minus its argument.
/// Always positive; behaves like 1/z for large z.
inline double mills_excess(double z) {
    if (std::isnan(z)) return z;
    if (z < 3.0) return normal_pdf(z) / normal_sf(z) - z;
    // Laplace continued fraction Q/phi = 1/(z+1/(z+2/(z+3/...))), so
    // phi/Q - z = 1/(z + 2/(z + 3/(z + ...))). Evaluated from the bottom up.
    constexpr int depth = 400;
    double tail = z;
    for (int k = depth; k >= 2; --k) tail = z + k / tail;
    return 1.0 / tail;
}

/// Integral of g over [a, b] by 30-point Gauss-Legendre. Only for smooth integrands.
template <class F>
double gauss_legendre(F&& g, double a, double b) {
    return boost::math::quadrature::gauss<double, 30>::integrate(std::forward<F>(g), a, b);
}

/// Shortest decimal string that parses back to the same double.
inline std::string format_double(double v) {
    if (v == 0.0) return std::signbit(v) ? "-0" : "0";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::optional<double> parse_double(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

}  // namespace bolt
