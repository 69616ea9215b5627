#include "forge/bidegree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "forge/errors.hpp"

namespace forge {

double delta_threshold(std::int64_t n, double kappa_value, double delta0) {
    return std::pow(static_cast<double>(n), 1.0 - kappa_value + delta0);
}

std::vector<std::int64_t> choose_without_replacement(std::int64_t n,
                                                     std::int64_t k,
                                                     Rng& rng) {
    if (k < 0 || k > n)
        throw ConfigError("cannot choose " + std::to_string(k) +
                          " distinct items from " + std::to_string(n));
    std::vector<std::int64_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::int64_t{0});
    // Partial Fisher-Yates: after i swaps the first i entries are a uniform
    // ordered sample without replacement.
    for (std::int64_t i = 0; i < k; ++i) {
        const std::int64_t j =
            i + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n - i)));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
}

BiDegreeSample equalize_sums(std::vector<std::int64_t> in_draw,
                             std::vector<std::int64_t> out_draw,
                             Rng& rng) {
    if (in_draw.size() != out_draw.size())
        throw ConfigError("degree draws have different lengths");
    const auto n = static_cast<std::int64_t>(in_draw.size());
    const std::int64_t in_sum =
        std::accumulate(in_draw.begin(), in_draw.end(), std::int64_t{0});
    const std::int64_t out_sum =
        std::accumulate(out_draw.begin(), out_draw.end(), std::int64_t{0});
    const std::int64_t delta = in_sum - out_sum;

    BiDegreeSample result;
    auto& diag = result.diagnostics;
    diag.raw_in_sum = in_sum;
    diag.raw_out_sum = out_sum;
    diag.delta = delta;

    const std::int64_t shortfall = std::llabs(delta);
    if (shortfall > 0) {
        diag.incremented_nodes = choose_without_replacement(n, shortfall, rng);
        std::sort(diag.incremented_nodes.begin(), diag.incremented_nodes.end());
        // The in-degree sum leads by delta, so top up out-degrees, and vice
        // versa.  Each chosen node gains exactly one unit.
        auto& grow = delta >= 0 ? out_draw : in_draw;
        for (const std::int64_t node : diag.incremented_nodes) ++grow[node];
        diag.incremented_side = delta >= 0 ? IncrementSide::out_side : IncrementSide::in_side;
    }

    result.sequence.total = std::max(in_sum, out_sum);
    result.sequence.in_degrees = std::move(in_draw);
    result.sequence.out_degrees = std::move(out_draw);
    return result;
}

BiDegreeSample sample_bidegree(const DegreeDistribution& in_dist,
                               const DegreeDistribution& out_dist,
                               std::int64_t n,
                               const SamplerParams& params,
                               Rng& rng) {
    if (n < 1) throw ConfigError("sequence length must be at least 1");
    if (params.max_resamples < 1)
        throw ConfigError("max_resamples must be at least 1");

    const double in_mean = in_dist.mean();
    const double out_mean = out_dist.mean();
    if (!std::isfinite(in_mean) || !std::isfinite(out_mean))
        throw ConfigError("degree distributions must have finite means");
    if (std::fabs(in_mean - out_mean) > params.mean_tolerance)
        throw MeanMismatch(in_mean, out_mean, params.mean_tolerance);

    const double k = kappa(in_dist, out_dist);
    const double delta0 = params.delta0.value_or(k / 2);
    if (!(delta0 > 0) || !(delta0 < k))
        throw ConfigError("delta0 must lie strictly between 0 and kappa = " +
                          std::to_string(k));
    const double threshold = delta_threshold(n, k, delta0);

    for (int attempt = 0; attempt < params.max_resamples; ++attempt) {
        std::vector<std::int64_t> in_draw(n), out_draw(n);
        std::int64_t in_sum = 0, out_sum = 0;
        for (auto& d : in_draw) in_sum += (d = in_dist.sample(rng));
        for (auto& d : out_draw) out_sum += (d = out_dist.sample(rng));
        if (static_cast<double>(std::llabs(in_sum - out_sum)) > threshold)
            continue; // both sequences are discarded together
        BiDegreeSample sample =
            equalize_sums(std::move(in_draw), std::move(out_draw), rng);
        sample.diagnostics.resamples_used = attempt;
        return sample;
    }
    throw RetryExhausted(params.max_resamples);
}

} // namespace forge
