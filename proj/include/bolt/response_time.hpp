#pragma once

#include <Eigen/Core>
#include <Eigen/QR>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "error.hpp"

namespace bolt {

struct ResponseSample {
    double n = 0.0;
    double seconds = 0.0;
};

/// Cubic least-squares model of the response time R(n), floored at the
/// smallest observed response.
class ResponseTimeModel {
public:
    ResponseTimeModel() = default;

    [[nodiscard]] double operator()(double n) const {
        if (constant_) return std::max(coef_[0], floor_);
        const double s = n / scale_;
        const double v = coef_[0] + s * (coef_[1] + s * (coef_[2] + s * coef_[3]));
        return std::max(v, floor_);
    }

    /// Coefficients a0..a3 of R(n) = a0 + a1 n + a2 n^2 + a3 n^3 in unscaled n.
    [[nodiscard]] std::array<double, 4> coefficients() const {
        if (constant_) return {coef_[0], 0.0, 0.0, 0.0};
        return {coef_[0], coef_[1] / scale_, coef_[2] / (scale_ * scale_), coef_[3] / (scale_ * scale_ * scale_)};
    }

    [[nodiscard]] bool is_constant() const { return constant_; }
    [[nodiscard]] double floor() const { return floor_; }
    [[nodiscard]] std::size_t sample_count() const { return samples_; }

    friend ResponseTimeModel fit_response_model(const std::vector<ResponseSample>& samples);

private:
    std::array<double, 4> coef_{0.0, 0.0, 0.0, 0.0};
    double scale_ = 1.0;
    double floor_ = 0.0;
    bool constant_ = true;
    std::size_t samples_ = 0;
};

/// Fewer than four samples, or fewer than four distinct sizes, give the
/// constant model equal to the mean response.
inline ResponseTimeModel fit_response_model(const std::vector<ResponseSample>& samples) {
    ResponseTimeModel m;
    m.samples_ = samples.size();
    if (samples.empty()) {
        m.floor_ = std::numeric_limits<double>::min();
        m.coef_[0] = m.floor_;
        return m;
    }
    double lo = std::numeric_limits<double>::infinity();
    double mean = 0.0;
    double nmax = 0.0;
    for (const auto& s : samples) {
        if (!std::isfinite(s.seconds) || !(s.seconds > 0.0)) throw InvalidArgument("response samples must be positive");
        lo = std::min(lo, s.seconds);
        mean += s.seconds;
        nmax = std::max(nmax, std::abs(s.n));
    }
    mean /= static_cast<double>(samples.size());
    m.floor_ = lo;
    m.coef_[0] = mean;
    if (samples.size() < 4) return m;
    double hi = 0.0;
    for (const auto& s : samples) hi = std::max(hi, s.seconds);
    if (hi - lo <= 1e-12 * hi) return m;  // flat samples: a constant, not a noisy cubic

    const auto rows = static_cast<Eigen::Index>(samples.size());
    m.scale_ = nmax > 0.0 ? nmax : 1.0;
    Eigen::MatrixXd a(rows, 4);
    Eigen::VectorXd b(rows);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const double s = samples[static_cast<std::size_t>(i)].n / m.scale_;
        a(i, 0) = 1.0;
        a(i, 1) = s;
        a(i, 2) = s * s;
        a(i, 3) = s * s * s;
        b(i) = samples[static_cast<std::size_t>(i)].seconds;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    qr.setThreshold(1e-10);
    if (qr.rank() < 4) {
        m.scale_ = 1.0;
        return m;
    }
    const Eigen::Vector4d c = qr.solve(b);
    if (!c.allFinite()) {
        m.scale_ = 1.0;
        return m;
    }
    for (int i = 0; i < 4; ++i) m.coef_[static_cast<std::size_t>(i)] = c(i);
    m.constant_ = false;
    return m;
}

}  // namespace bolt
