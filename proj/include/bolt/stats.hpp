#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "error.hpp"
#include "numeric.hpp"

namespace bolt {

inline double mean(const std::vector<double>& v) {
    if (v.empty()) throw InvalidArgument("mean of an empty sample");
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

/// Sample standard deviation over sqrt(n); 0 for a single value.
inline double standard_error(const std::vector<double>& v) {
    if (v.empty()) throw InvalidArgument("standard error of an empty sample");
    if (v.size() == 1) return 0.0;
    const double m = mean(v);
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    const double n = static_cast<double>(v.size());
    return std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
}

namespace detail {
inline std::vector<double> midranks(const std::vector<double>& pooled, bool& ties) {
    std::vector<std::size_t> order(pooled.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });
    std::vector<double> ranks(pooled.size());
    ties = false;
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && pooled[order[j + 1]] == pooled[order[i]]) ++j;
        if (j > i) ties = true;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}
}  // namespace detail

/// One-sided Wilcoxon rank-sum (Mann-Whitney) test of H1: values in `a` tend
/// to be smaller than values in `b`. Exact null distribution without ties,
/// normal approximation with tie correction otherwise.
inline double wilcoxon_rank_sum_less(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) throw InvalidArgument("rank-sum test needs two non-empty samples");
    std::vector<double> pooled = a;
    pooled.insert(pooled.end(), b.begin(), b.end());
    bool ties = false;
    const auto ranks = detail::midranks(pooled, ties);
    const std::size_t m = a.size();
    const std::size_t n = b.size();
    const std::size_t total = m + n;
    double w = 0.0;
    for (std::size_t i = 0; i < m; ++i) w += ranks[i];

    if (!ties && total <= 60) {
        // count[k][s]: subsets of size k from ranks seen so far with rank sum s
        const std::size_t max_sum = total * (total + 1) / 2;
        std::vector<std::vector<double>> count(m + 1, std::vector<double>(max_sum + 1, 0.0));
        count[0][0] = 1.0;
        for (std::size_t r = 1; r <= total; ++r) {
            for (std::size_t k = std::min(r, m); k >= 1; --k) {
                for (std::size_t s = max_sum; s >= r; --s) count[k][s] += count[k - 1][s - r];
            }
        }
        double all = 0.0, below = 0.0;
        const auto wi = static_cast<std::size_t>(std::llround(w));
        for (std::size_t s = 0; s <= max_sum; ++s) {
            all += count[m][s];
            if (s <= wi) below += count[m][s];
        }
        return below / all;
    }

    const double md = static_cast<double>(m), nd = static_cast<double>(n), N = static_cast<double>(total);
    const double mu = md * (N + 1.0) / 2.0;
    // tie correction
    std::vector<double> sorted = pooled;
    std::sort(sorted.begin(), sorted.end());
    double tie_term = 0.0;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i + 1);
        tie_term += t * t * t - t;
        i = j + 1;
    }
    const double var = md * nd / 12.0 * ((N + 1.0) - tie_term / (N * (N - 1.0)));
    if (!(var > 0.0)) return 1.0;
    const double z = (w - mu + 0.5) / std::sqrt(var);  // continuity correction
    return normal_cdf(z);
}

}  // namespace bolt
