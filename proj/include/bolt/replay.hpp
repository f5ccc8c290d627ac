#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "benchmarks.hpp"
#include "error.hpp"
#include "numeric.hpp"

namespace bolt {

/// Values on a full tensor grid over (x_1, ..., x_d, t), read from CSV with
/// header x1,...,xd,t,y and interpolated multilinearly.
class ReplayGrid {
public:
    static ReplayGrid parse(std::istream& in) {
        std::string line;
        if (!std::getline(in, line)) throw InvalidArgument("replay CSV is empty");
        const auto header = split(line);
        if (header.size() < 3) throw InvalidArgument("replay CSV needs at least x1,t,y columns");
        const int d = static_cast<int>(header.size()) - 2;
        for (int i = 0; i < d; ++i)
            if (header[static_cast<std::size_t>(i)] != "x" + std::to_string(i + 1))
                throw InvalidArgument("replay CSV header must be x1,...,xd,t,y");
        if (header[static_cast<std::size_t>(d)] != "t" || header[static_cast<std::size_t>(d + 1)] != "y")
            throw InvalidArgument("replay CSV header must be x1,...,xd,t,y");

        ReplayGrid g;
        g.d_ = d;
        std::vector<std::vector<double>> rows;
        std::size_t line_no = 1;
        double last_t = -std::numeric_limits<double>::infinity();
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty() || line == "\r") continue;
            const auto cells = split(line);
            if (cells.size() != header.size())
                throw InvalidArgument("replay CSV line " + std::to_string(line_no) + " has the wrong column count");
            std::vector<double> row;
            for (const auto& c : cells) {
                const auto v = parse_double(c);
                if (!v || !std::isfinite(*v))
                    throw InvalidArgument("replay CSV line " + std::to_string(line_no) + ": bad number '" + c + "'");
                row.push_back(*v);
            }
            if (row[static_cast<std::size_t>(d)] < last_t)
                throw InvalidArgument("replay CSV line " + std::to_string(line_no) + ": t is not sorted");
            last_t = row[static_cast<std::size_t>(d)];
            rows.push_back(std::move(row));
        }
        if (rows.empty()) throw InvalidArgument("replay CSV has no data rows");

        g.axes_.resize(static_cast<std::size_t>(d + 1));
        for (int a = 0; a <= d; ++a) {
            auto& ax = g.axes_[static_cast<std::size_t>(a)];
            for (const auto& r : rows) ax.push_back(r[static_cast<std::size_t>(a)]);
            std::sort(ax.begin(), ax.end());
            ax.erase(std::unique(ax.begin(), ax.end()), ax.end());
            if (ax.size() < 2) throw InvalidArgument("replay grid needs two distinct values on every axis");
        }
        std::size_t total = 1;
        for (const auto& ax : g.axes_) total *= ax.size();
        if (total != rows.size()) throw InvalidArgument("replay CSV is not a full tensor grid");
        g.values_.assign(total, std::numeric_limits<double>::quiet_NaN());
        for (const auto& r : rows) {
            std::size_t flat = 0;
            for (int a = 0; a <= d; ++a) {
                const auto& ax = g.axes_[static_cast<std::size_t>(a)];
                const auto pos = static_cast<std::size_t>(
                    std::lower_bound(ax.begin(), ax.end(), r[static_cast<std::size_t>(a)]) - ax.begin());
                flat = flat * ax.size() + pos;
            }
            if (!std::isnan(g.values_[flat])) throw InvalidArgument("replay CSV repeats a grid point");
            g.values_[flat] = r.back();
        }
        return g;
    }

    static ReplayGrid load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open replay file '" + path + "'");
        return parse(in);
    }

    [[nodiscard]] int dim() const { return d_; }
    [[nodiscard]] double lower(int axis) const { return axes_[static_cast<std::size_t>(axis)].front(); }
    [[nodiscard]] double upper(int axis) const { return axes_[static_cast<std::size_t>(axis)].back(); }

    /// Multilinear interpolation at raw coordinates z (d + 1 entries), clamped to the grid.
    [[nodiscard]] double operator()(const Eigen::VectorXd& z) const {
        const int n_axes = d_ + 1;
        std::vector<std::size_t> base(static_cast<std::size_t>(n_axes));
        std::vector<double> frac(static_cast<std::size_t>(n_axes));
        for (int a = 0; a < n_axes; ++a) {
            const auto& ax = axes_[static_cast<std::size_t>(a)];
            const double v = std::clamp(z(a), ax.front(), ax.back());
            auto it = std::upper_bound(ax.begin(), ax.end(), v);
            std::size_t hi = static_cast<std::size_t>(it - ax.begin());
            if (hi >= ax.size()) hi = ax.size() - 1;
            const std::size_t lo = hi - 1;
            base[static_cast<std::size_t>(a)] = lo;
            frac[static_cast<std::size_t>(a)] = (v - ax[lo]) / (ax[hi] - ax[lo]);
        }
        double acc = 0.0;
        for (std::size_t corner = 0; corner < (std::size_t{1} << n_axes); ++corner) {
            double w = 1.0;
            std::size_t flat = 0;
            for (int a = 0; a < n_axes; ++a) {
                const bool up = (corner >> a) & 1U;
                const double f = frac[static_cast<std::size_t>(a)];
                w *= up ? f : 1.0 - f;
                flat = flat * axes_[static_cast<std::size_t>(a)].size() + base[static_cast<std::size_t>(a)] + (up ? 1 : 0);
            }
            if (w != 0.0) acc += w * values_[flat];
        }
        return acc;
    }

private:
    static std::vector<std::string> split(const std::string& line) {
        std::vector<std::string> out;
        std::string cell;
        std::istringstream ss(line);
        while (std::getline(ss, cell, ',')) {
            while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
            while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
            out.push_back(cell);
        }
        return out;
    }

    int d_ = 0;
    std::vector<std::vector<double>> axes_;
    std::vector<double> values_;
};

/// Benchmark over a replay grid: the unit cube maps onto the grid's bounding
/// box and [0, horizon] onto its time range. y is maximized as given.
inline Benchmark make_replay_benchmark(const ReplayGrid& grid, double noise_variance, double cost,
                                       std::string name = "replay") {
    BenchmarkSpec s;
    s.name = std::move(name);
    s.d = grid.dim();
    s.lower.resize(s.d + 1);
    s.upper.resize(s.d + 1);
    for (int a = 0; a <= s.d; ++a) {
        s.lower(a) = grid.lower(a);
        s.upper(a) = grid.upper(a);
    }
    s.horizon = grid.upper(s.d) - grid.lower(s.d);
    s.noise_variance = noise_variance;
    s.cost = cost;
    s.minimize = false;
    s.raw = [grid](const Eigen::VectorXd& z) { return grid(z); };
    return Benchmark(std::move(s));
}

}  // namespace bolt
