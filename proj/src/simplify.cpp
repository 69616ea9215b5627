#include "forge/simplify.hpp"

#include <algorithm>
#include <cmath>

#include "forge/errors.hpp"
#include "forge/graphicality.hpp"
#include "forge/stats.hpp"

namespace forge {

std::int64_t default_max_attempts(const BiDegreeSequence& seq) {
    if (seq.total <= 0) return 100; // the empty pairing is simple right away
    const LimitConstants limits = limits_from_sequence(seq);
    const double expected_attempts = std::exp(limits.lambda1 + limits.lambda2);
    const double budget = std::ceil(20.0 * expected_attempts);
    if (budget > 1e6) return 1'000'000;
    return std::max<std::int64_t>(100, static_cast<std::int64_t>(budget));
}

RepeatedResult repeated_model(const BiDegreeSequence& seq, Rng& rng,
                              std::int64_t max_attempts) {
    if (max_attempts < 1) throw ConfigError("max_attempts must be at least 1");
    for (std::int64_t attempt = 1; attempt <= max_attempts; ++attempt) {
        Multigraph g = pair_uniform(seq, rng);
        if (!g.simple()) continue;
        RepeatedResult result;
        result.attempts = attempt;
        result.graph.n = g.n;
        result.graph.provenance = Provenance::repeated;
        result.graph.edges.reserve(g.edges.size());
        for (const auto& e : g.edges) result.graph.edges.emplace_back(e.src, e.dst);
        result.graph.in_degrees = seq.in_degrees;
        result.graph.out_degrees = seq.out_degrees;
        return result;
    }
    throw AttemptsExhausted(max_attempts, is_graphical(seq));
}

ErasedResult erased_model(const BiDegreeSequence& seq, Rng& rng) {
    const Multigraph g = pair_uniform(seq, rng);

    ErasedResult result;
    auto& report = result.report;
    report.removed_in.assign(g.n, 0);
    report.removed_out.assign(g.n, 0);
    report.total_self_loops_removed = g.self_loops;
    report.total_parallel_edges_merged = g.multi_excess;

    auto& graph = result.graph;
    graph.n = g.n;
    graph.provenance = Provenance::erased;
    for (const auto& e : g.edges) {
        if (e.src == e.dst) {
            // Every copy of a loop goes away, costing the node one stub on
            // each side per copy.
            report.removed_out[e.src] += e.multiplicity;
            report.removed_in[e.src] += e.multiplicity;
        } else {
            graph.edges.emplace_back(e.src, e.dst);
            report.removed_out[e.src] += e.multiplicity - 1;
            report.removed_in[e.dst] += e.multiplicity - 1;
        }
    }
    graph.in_degrees.resize(g.n);
    graph.out_degrees.resize(g.n);
    for (std::int64_t v = 0; v < g.n; ++v) {
        graph.in_degrees[v] = seq.in_degrees[v] - report.removed_in[v];
        graph.out_degrees[v] = seq.out_degrees[v] - report.removed_out[v];
    }
    return result;
}

} // namespace forge
