#pragma once

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>

namespace forge {

namespace detail {
inline std::string short_double(double v) {
    std::ostringstream out;
    out << v;
    return out.str();
}
} // namespace detail

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid user-supplied configuration (distribution spec, parameter range,
/// malformed input file).  The CLI maps this to exit code 2.
struct ConfigError : Error {
    using Error::Error;
};

/// The two degree distributions have different means, so the balancing step
/// of the sequence sampler would be biased.
struct MeanMismatch : ConfigError {
    MeanMismatch(double in_mean, double out_mean, double tolerance)
        : ConfigError("in-degree mean " + detail::short_double(in_mean) +
                      " and out-degree mean " + detail::short_double(out_mean) +
                      " differ by more than " + detail::short_double(tolerance)),
          in_mean(in_mean), out_mean(out_mean) {}
    double in_mean;
    double out_mean;
};

/// The degree-sequence sampler gave up: no draw passed the sum-difference
/// gate within the configured number of attempts.
struct RetryExhausted : ConfigError {
    explicit RetryExhausted(int attempts)
        : ConfigError("no degree draw passed the balance gate in " +
                      std::to_string(attempts) + " attempts"),
          attempts(attempts) {}
    int attempts;
};

/// The repeated model did not produce a simple graph within its attempt
/// budget.  The CLI maps this to exit code 4.
struct AttemptsExhausted : Error {
    AttemptsExhausted(std::int64_t attempts, bool graphical)
        : Error("no simple pairing found in " + std::to_string(attempts) +
                " attempts (degree sequence is " +
                (graphical ? "realizable as a simple graph, so this is bad "
                             "luck or too small a budget"
                           : "NOT realizable as a simple graph, so no budget "
                             "can succeed") +
                ")"),
          attempts(attempts), graphical(graphical) {}
    std::int64_t attempts;
    bool graphical;
};

/// A brute-force oracle was asked for an instance beyond its size guard.
struct SizeGuard : Error {
    using Error::Error;
};

} // namespace forge
