#pragma once

#include <Eigen/Core>
#include <boost/random/sobol.hpp>

#include <cstdint>
#include <vector>

#include "numeric.hpp"

namespace bolt {

/// First `count` points of a Sobol sequence in [0,1)^dim, scrambled by a random
/// digital shift (XOR) drawn from `seed`. Column j is point j.
inline Eigen::MatrixXd sobol_points(int dim, int count, std::uint64_t seed) {
    boost::random::sobol gen(static_cast<std::size_t>(dim));
    Rng rng(seed);
    std::vector<std::uint64_t> shift(static_cast<std::size_t>(dim));
    for (auto& s : shift) s = rng();
    Eigen::MatrixXd pts(dim, count);
    constexpr double scale = 1.0 / 9007199254740992.0;  // 2^-53
    for (int j = 0; j < count; ++j) {
        for (int i = 0; i < dim; ++i) {
            const std::uint64_t v = static_cast<std::uint64_t>(gen()) ^ shift[static_cast<std::size_t>(i)];
            pts(i, j) = (static_cast<double>(v >> 11) + 0.5) * scale;
        }
    }
    return pts;
}

}  // namespace bolt
