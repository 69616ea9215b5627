#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "forge/rng.hpp"

namespace forge {

/// A probability distribution on nonnegative integers, used as the law of
/// in- or out-degrees.  Immutable and cheap to copy (copies share state).
///
/// Sampling uses inversion: a lazily extended cumulative table is searched
/// for the drawn uniform.  The table is shared between copies and guarded
/// by a mutex, so concurrent sampling from different Rng streams is safe.
class DegreeDistribution {
public:
    double pmf(std::int64_t k) const;

    /// May be +infinity (e.g. power laws with tail index <= 1).
    double mean() const;

    bool has_finite_second_moment() const;

    /// Throws Error when the second moment is infinite.
    double second_moment() const;

    /// Power-law tail exponent; +infinity for light-tailed families.
    double tail_index() const;

    /// Largest degree with positive probability, if the support is bounded.
    std::optional<std::int64_t> truncation_bound() const;

    std::int64_t sample(Rng& rng) const;

    /// Canonical spec string, e.g. "poisson:2".
    const std::string& spec() const;

private:
    struct State;
    explicit DegreeDistribution(std::shared_ptr<State> state);
    std::shared_ptr<State> state_;

    friend DegreeDistribution make_poisson(double mean);
    friend DegreeDistribution make_zeta(double exponent);
    friend DegreeDistribution make_geometric(double p);
    friend DegreeDistribution make_empirical(std::vector<double> weights);
};

/// Poisson with the given mean (> 0).
DegreeDistribution make_poisson(double mean);

/// Power law on {0, 1, 2, ...}: pmf(k) proportional to (k+1)^-exponent.
/// Requires exponent > 2 so the mean is finite; tail index is exponent - 1
/// and the second moment is finite only for exponent > 3.
DegreeDistribution make_zeta(double exponent);

/// Geometric on {0, 1, 2, ...}: pmf(k) = (1-p) p^k, 0 < p < 1.
DegreeDistribution make_geometric(double p);

/// Finite-support distribution from nonnegative weights (weight[k] is
/// proportional to pmf(k)).  Weights are normalized; the sum must be > 0.
DegreeDistribution make_empirical(std::vector<double> weights);

/// Parse a distribution spec string:
///   poisson:MEAN | zeta:EXPONENT | geometric:P | empirical:@PATH
/// The empirical file holds whitespace-separated weights ('#' starts a
/// comment running to end of line).  Throws ConfigError on bad input.
DegreeDistribution parse_distribution(const std::string& spec);

/// Balance-gate exponent kappa = min{1 - 1/alpha, 1 - 1/beta, 1/2}, where
/// alpha and beta are the tail indices of the in- and out-degree laws
/// (+infinity allowed, contributing 1).  Both must exceed 1.
double kappa(double alpha, double beta);
double kappa(const DegreeDistribution& in_dist, const DegreeDistribution& out_dist);

} // namespace forge
