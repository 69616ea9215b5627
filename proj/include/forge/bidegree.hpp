#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "forge/degree_dist.hpp"
#include "forge/rng.hpp"

namespace forge {

/// A bi-degree sequence: per-node in- and out-degrees with equal sums.
struct BiDegreeSequence {
    std::vector<std::int64_t> in_degrees;
    std::vector<std::int64_t> out_degrees;
    std::int64_t total = 0; // common value of both degree sums

    std::int64_t size() const {
        return static_cast<std::int64_t>(in_degrees.size());
    }
};

enum class IncrementSide { in_side, out_side, none };

struct SamplerDiagnostics {
    std::int64_t raw_in_sum = 0;  // sum of the accepted in-degree draw
    std::int64_t raw_out_sum = 0; // sum of the accepted out-degree draw
    std::int64_t delta = 0;       // raw_in_sum - raw_out_sum
    int resamples_used = 0;       // draws discarded by the balance gate
    std::vector<std::int64_t> incremented_nodes; // sorted, |delta| of them
    IncrementSide incremented_side = IncrementSide::none;
};

struct BiDegreeSample {
    BiDegreeSequence sequence;
    SamplerDiagnostics diagnostics;
};

struct SamplerParams {
    /// Slack exponent of the balance gate; must lie in (0, kappa).
    /// Defaults to kappa / 2.
    std::optional<double> delta0;
    int max_resamples = 1000;
    double mean_tolerance = 1e-9;
};

/// Gate threshold n^(1 - kappa + delta0) for the draw-sum difference.
double delta_threshold(std::int64_t n, double kappa_value, double delta0);

/// k distinct values from {0, ..., n-1}, in the order chosen.
std::vector<std::int64_t> choose_without_replacement(std::int64_t n,
                                                     std::int64_t k,
                                                     Rng& rng);

/// Repair step: given candidate degree draws with in-sum minus out-sum
/// equal to delta, add one unit to the deficient side at |delta| distinct
/// nodes chosen uniformly (out-degrees when delta >= 0, in-degrees when
/// delta < 0), making the sums equal.  |delta| must not exceed n.
BiDegreeSample equalize_sums(std::vector<std::int64_t> in_draw,
                             std::vector<std::int64_t> out_draw,
                             Rng& rng);

/// Sample a bi-degree sequence of length n with in-degree law in_dist and
/// out-degree law out_dist.  Both i.i.d. sequences are redrawn until the
/// sum difference passes the gate |delta| <= n^(1 - kappa + delta0), then
/// the residual imbalance is repaired by equalize_sums.
///
/// Throws MeanMismatch when the two means differ beyond tolerance,
/// ConfigError for out-of-range parameters (including infinite means), and
/// RetryExhausted when no draw passes the gate in max_resamples attempts.
BiDegreeSample sample_bidegree(const DegreeDistribution& in_dist,
                               const DegreeDistribution& out_dist,
                               std::int64_t n,
                               const SamplerParams& params,
                               Rng& rng);

} // namespace forge
