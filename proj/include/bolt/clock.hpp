#pragma once

#include <chrono>

#include "error.hpp"

namespace bolt {

class Clock {
public:
    virtual ~Clock() = default;
    /// Current time in seconds.
    virtual double now() = 0;
    /// Records `seconds` spent outside the clock's own measurement (modeled
    /// compute, objective cost). Real clocks ignore it.
    virtual void advance(double seconds) = 0;
};

/// Virtual time. Charges accumulate and are committed on the next read, so
/// consecutive reads differ by exactly fl(sum of charges).
class SimulatedClock final : public Clock {
public:
    explicit SimulatedClock(double start = 0.0) : now_(start) {}

    double now() override {
        if (pending_ != 0.0) {
            now_ = now_ + pending_;
            pending_ = 0.0;
        }
        return now_;
    }

    void advance(double seconds) override {
        if (!(seconds >= 0.0)) throw InvalidArgument("clock cannot move backwards");
        pending_ += seconds;
    }

private:
    double now_;
    double pending_ = 0.0;
};

/// Wall time since construction, for live use.
class WallClock final : public Clock {
public:
    WallClock() : start_(std::chrono::steady_clock::now()) {}

    double now() override {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

    void advance(double) override {}

private:
    std::chrono::steady_clock::time_point start_;
};

}  // namespace bolt
