#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "forge/config_model.hpp"

namespace forge {

enum class Provenance { repeated, erased };

/// Simple directed graph: no self-loops, no parallel edges.
struct SimpleDigraph {
    std::int64_t n = 0;
    std::vector<std::pair<std::int64_t, std::int64_t>> edges; // sorted (src, dst)
    std::vector<std::int64_t> in_degrees;
    std::vector<std::int64_t> out_degrees;
    Provenance provenance = Provenance::repeated;
};

struct RepeatedResult {
    SimpleDigraph graph;
    std::int64_t attempts = 0; // pairings performed, including the simple one
};

/// Per-node record of stubs discarded by the erased model.
struct ErasureReport {
    std::vector<std::int64_t> removed_in;  // inbound stubs lost at each node
    std::vector<std::int64_t> removed_out; // outbound stubs lost at each node
    std::int64_t total_self_loops_removed = 0;   // loop copies deleted
    std::int64_t total_parallel_edges_merged = 0;     // surplus copies beyond the first
};

/// Attempt budget heuristic for the repeated model: generous multiple of
/// the expected number of pairings implied by the sequence's plug-in
/// simplicity probability, floored at 100 and capped at one million.
std::int64_t default_max_attempts(const BiDegreeSequence& seq);

/// Redraw uniform pairings until one is simple.  The accepted graph is a
/// uniform draw from the simple graphs with these exact degrees.  Throws
/// AttemptsExhausted when the budget runs out.
RepeatedResult repeated_model(const BiDegreeSequence& seq, Rng& rng,
                              std::int64_t max_attempts);

struct ErasedResult {
    SimpleDigraph graph;
    ErasureReport report;
};

/// Pair once, then delete self-loops and collapse parallel copies to a
/// single edge.  Realized degrees may fall below the requested sequence;
/// the report accounts for every discarded stub.
ErasedResult erased_model(const BiDegreeSequence& seq, Rng& rng);

} // namespace forge
