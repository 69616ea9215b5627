#include "forge/config_model.hpp"

#include <algorithm>

#include "forge/errors.hpp"

namespace forge {

std::vector<std::int64_t> Multigraph::in_degrees() const {
    std::vector<std::int64_t> deg(n, 0);
    for (const auto& e : edges) deg[e.dst] += e.multiplicity;
    return deg;
}

std::vector<std::int64_t> Multigraph::out_degrees() const {
    std::vector<std::int64_t> deg(n, 0);
    for (const auto& e : edges) deg[e.src] += e.multiplicity;
    return deg;
}

Multigraph pair_uniform(const BiDegreeSequence& seq, Rng& rng) {
    const std::int64_t n = seq.size();
    if (seq.in_degrees.size() != seq.out_degrees.size())
        throw ConfigError("degree lists have different lengths");

    std::vector<std::int64_t> out_stubs;
    out_stubs.reserve(static_cast<std::size_t>(seq.total));
    std::int64_t in_total = 0;
    for (std::int64_t v = 0; v < n; ++v) {
        in_total += seq.in_degrees[v];
        for (std::int64_t c = 0; c < seq.out_degrees[v]; ++c) out_stubs.push_back(v);
    }
    if (in_total != static_cast<std::int64_t>(out_stubs.size()))
        throw ConfigError("in- and out-degree sums differ; cannot pair stubs");
    const std::int64_t L = in_total;

    // Shuffling one side against the other's fixed order makes every
    // perfect matching of the L stubs equally likely.
    for (std::int64_t i = L - 1; i > 0; --i) {
        const auto j = static_cast<std::int64_t>(
            rng.below(static_cast<std::uint64_t>(i) + 1));
        std::swap(out_stubs[i], out_stubs[j]);
    }

    // Walk inbound stubs in node order against the shuffled outbound list,
    // encoding each edge as src * n + dst so a plain sort groups copies.
    std::vector<std::int64_t> keys;
    keys.reserve(static_cast<std::size_t>(L));
    std::int64_t pos = 0;
    for (std::int64_t v = 0; v < n; ++v)
        for (std::int64_t c = 0; c < seq.in_degrees[v]; ++c)
            keys.push_back(out_stubs[pos++] * n + v);
    std::sort(keys.begin(), keys.end());

    Multigraph g;
    g.n = n;
    g.total_edges = L;
    for (std::size_t i = 0; i < keys.size();) {
        std::size_t j = i;
        while (j < keys.size() && keys[j] == keys[i]) ++j;
        const auto mult = static_cast<std::int64_t>(j - i);
        const std::int64_t src = keys[i] / n;
        const std::int64_t dst = keys[i] % n;
        g.edges.push_back({src, dst, mult});
        if (src == dst) {
            g.self_loops += mult;
        } else if (mult >= 2) {
            g.multi_excess += mult - 1;
            g.multi_pairs += mult * (mult - 1) / 2;
        }
        i = j;
    }
    return g;
}

std::map<std::int64_t, std::int64_t> count_multiplicities(const Multigraph& g) {
    std::map<std::int64_t, std::int64_t> hist;
    for (const auto& e : g.edges)
        if (e.src != e.dst) ++hist[e.multiplicity];
    return hist;
}

} // namespace forge
