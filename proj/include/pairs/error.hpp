#pragma once

#include <stdexcept>
#include <string>

namespace pairs {

// Bad or inconsistent configuration values. CLI exit code 1.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Unreadable or malformed input data. CLI exit code 2.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Statistical routine cannot produce a result for this input
// (rank deficiency, degenerate series, too few observations).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// AR(1) slope outside (0, 1): the spread has no OU representation.
class NonMeanReverting : public NumericError {
public:
    explicit NonMeanReverting(double slope)
        : NumericError("AR(1) slope " + std::to_string(slope) +
                       " outside (0, 1); spread is not mean reverting"),
          slope_(slope) {}

    double slope() const noexcept { return slope_; }

private:
    double slope_;
};

// A pipeline stage could not complete. CLI exit code 3.
class PipelineError : public std::runtime_error {
public:
    PipelineError(std::string stage, const std::string& what)
        : std::runtime_error(stage + ": " + what), stage_(std::move(stage)), reason_(what) {}

    const std::string& stage() const noexcept { return stage_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    std::string stage_;
    std::string reason_;
};

}  // namespace pairs
