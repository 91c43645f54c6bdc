#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rodtbc {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid user input: bad parameters, malformed config, parity mismatch.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Parameters fall outside the regime where the series expansions converge.
class RegimeError : public Error {
public:
    using Error::Error;
};

/// The rational-approximation system has no unique solution for the degree set.
class SingularSystem : public Error {
public:
    using Error::Error;
};

/// Time integration produced non-finite values.
class Divergence : public Error {
public:
    Divergence(const std::string& what, std::size_t step)
        : Error(what + " (step " + std::to_string(step) + ")"), step_(step) {}

    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

}  // namespace rodtbc
