#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "forge/bidegree.hpp"
#include "forge/rng.hpp"

namespace forge {

/// Directed multigraph on nodes 0..n-1, stored as distinct (src, dst)
/// pairs with multiplicities, sorted by (src, dst).
struct Multigraph {
    struct Edge {
        std::int64_t src = 0;
        std::int64_t dst = 0;
        std::int64_t multiplicity = 0;
    };

    std::int64_t n = 0;
    std::vector<Edge> edges;

    std::int64_t total_edges = 0; // sum of multiplicities
    std::int64_t self_loops = 0;  // loop edges, counted with multiplicity
    // Parallel-edge statistics over distinct non-loop pairs with
    // multiplicity k >= 2: multi_excess counts k - 1 per pair, multi_pairs
    // counts the C(k, 2) unordered clashes.
    std::int64_t multi_excess = 0;
    std::int64_t multi_pairs = 0;

    bool simple() const { return self_loops == 0 && multi_excess == 0; }

    /// Degrees realized by the multigraph (each copy of a loop at v adds
    /// one to both degrees of v).
    std::vector<std::int64_t> in_degrees() const;
    std::vector<std::int64_t> out_degrees() const;
};

/// Uniform stub pairing of a bi-degree sequence.  Every node contributes
/// one inbound stub per unit of in-degree and one outbound stub per unit
/// of out-degree; a uniformly random perfect matching between the two stub
/// sets becomes the edge multiset.
Multigraph pair_uniform(const BiDegreeSequence& seq, Rng& rng);

/// Histogram of edge multiplicities over distinct non-loop pairs:
/// result[k] = number of ordered pairs joined by exactly k copies.
std::map<std::int64_t, std::int64_t> count_multiplicities(const Multigraph& g);

} // namespace forge
