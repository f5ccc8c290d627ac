#pragma once

#include <functional>
#include <iostream>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bolt {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
    /// Short machine-readable tag, used by the CLI error JSON.
    [[nodiscard]] virtual const char* kind() const noexcept { return "error"; }
};

class InvalidParameter : public Error {
public:
    using Error::Error;
    [[nodiscard]] const char* kind() const noexcept override { return "invalid_parameter"; }
};

class InvalidArgument : public Error {
public:
    using Error::Error;
    [[nodiscard]] const char* kind() const noexcept override { return "invalid_argument"; }
};

class ConditioningError : public Error {
public:
    ConditioningError(const std::string& what, std::size_t size, double condition_estimate)
        : Error(what), size_(size), condition_estimate_(condition_estimate) {}
    [[nodiscard]] const char* kind() const noexcept override { return "numerical_conditioning"; }
    [[nodiscard]] std::size_t size() const noexcept { return size_; }
    [[nodiscard]] double condition_estimate() const noexcept { return condition_estimate_; }

private:
    std::size_t size_;
    double condition_estimate_;
};

class EmptyDataset : public Error {
public:
    using Error::Error;
    [[nodiscard]] const char* kind() const noexcept override { return "empty_dataset"; }
};

class IndexOutOfRange : public Error {
public:
    using Error::Error;
    [[nodiscard]] const char* kind() const noexcept override { return "index_out_of_range"; }
};

class PreconditionError : public Error {
public:
    using Error::Error;
    [[nodiscard]] const char* kind() const noexcept override { return "precondition"; }
};

class ConfigError : public Error {
public:
    using Error::Error;
    [[nodiscard]] const char* kind() const noexcept override { return "config"; }
};

class IoError : public Error {
public:
    using Error::Error;
    [[nodiscard]] const char* kind() const noexcept override { return "io"; }
};

// Warnings (variance clamps, ground-truth misses, degraded fits) go through a
// replaceable sink so tests and the CLI can silence or capture them.
using WarningSink = std::function<void(std::string_view)>;

namespace detail {
inline std::mutex& warning_mutex() {
    static std::mutex m;
    return m;
}
inline WarningSink& warning_sink() {
    static WarningSink sink = [](std::string_view msg) { std::clog << "[bolt] warning: " << msg << '\n'; };
    return sink;
}
}  // namespace detail

inline void set_warning_sink(WarningSink sink) {
    std::lock_guard lock(detail::warning_mutex());
    detail::warning_sink() = std::move(sink);
}

inline void warn(std::string_view message) {
    std::lock_guard lock(detail::warning_mutex());
    if (detail::warning_sink()) detail::warning_sink()(message);
}

}  // namespace bolt
