#pragma once

#include <Eigen/Core>

#include "numeric.hpp"

namespace bolt {

/// A noisy time-varying function to maximize over [0,1]^dim.
class Objective {
public:
    virtual ~Objective() = default;
    [[nodiscard]] virtual int dim() const = 0;
    /// Seconds consumed by one call.
    [[nodiscard]] virtual double cost() const = 0;
    virtual double evaluate(const Eigen::VectorXd& x, double t, Rng& rng) = 0;
};

}  // namespace bolt
