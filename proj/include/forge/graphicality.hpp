#pragma once

#include <cstdint>
#include <vector>

#include "forge/bidegree.hpp"

namespace forge {

/// Whether some simple directed graph (no self-loops, no parallel edges)
/// has exactly these in- and out-degrees.  O(n log n).
bool is_graphical(const std::vector<std::int64_t>& in_degrees,
                  const std::vector<std::int64_t>& out_degrees);
bool is_graphical(const BiDegreeSequence& seq);

/// Same question answered straight from the subset characterization: for
/// every vertex set A, sum over A of in-degrees must not exceed
/// sum over all v of min(out_degree(v), |A minus {v}|).  Exponential;
/// guarded to n <= 22 (throws SizeGuard beyond that).
bool is_graphical_bruteforce(const std::vector<std::int64_t>& in_degrees,
                             const std::vector<std::int64_t>& out_degrees);
bool is_graphical_bruteforce(const BiDegreeSequence& seq);

} // namespace forge
