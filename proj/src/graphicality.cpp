#include "forge/graphicality.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

#include "forge/errors.hpp"

namespace forge {

namespace {

/// Fenwick tree over degree values, queried by prefix.
class Fenwick {
public:
    explicit Fenwick(std::size_t size) : tree_(size + 1, 0) {}

    void add(std::int64_t value, std::int64_t amount) {
        for (std::size_t i = static_cast<std::size_t>(value) + 1; i < tree_.size(); i += i & (0 - i))
            tree_[i] += amount;
    }

    // Sum of amounts over values <= value (negative value gives 0).
    std::int64_t prefix(std::int64_t value) const {
        std::int64_t total = 0;
        if (value < 0) return 0;
        std::size_t i = std::min(static_cast<std::size_t>(value) + 1, tree_.size() - 1);
        for (; i > 0; i -= i & (0 - i)) total += tree_[i];
        return total;
    }

private:
    std::vector<std::int64_t> tree_;
};

void check_shape(const std::vector<std::int64_t>& in_degrees,
                 const std::vector<std::int64_t>& out_degrees) {
    if (in_degrees.size() != out_degrees.size())
        throw ConfigError("in- and out-degree lists have different lengths");
    for (std::size_t i = 0; i < in_degrees.size(); ++i)
        if (in_degrees[i] < 0 || out_degrees[i] < 0)
            throw ConfigError("degrees must be nonnegative");
}

} // namespace

bool is_graphical(const std::vector<std::int64_t>& in_degrees,
                  const std::vector<std::int64_t>& out_degrees) {
    check_shape(in_degrees, out_degrees);
    const auto n = static_cast<std::int64_t>(in_degrees.size());
    if (n == 0) return true;
    const std::int64_t in_sum =
        std::accumulate(in_degrees.begin(), in_degrees.end(), std::int64_t{0});
    const std::int64_t out_sum =
        std::accumulate(out_degrees.begin(), out_degrees.end(), std::int64_t{0});
    if (in_sum != out_sum) return false;

    // Sorted-prefix criterion: order pairs by in-degree (descending), and
    // for every prefix length k require
    //   sum of first k in-degrees
    //     <= sum over prefix of min(out, k-1) + sum over rest of min(out, k).
    // Out-degrees above n never matter (every min-cap is <= n), so clamp
    // them there to keep value-indexed trees small.
    std::vector<std::pair<std::int64_t, std::int64_t>> pairs(n);
    for (std::int64_t i = 0; i < n; ++i)
        pairs[i] = {in_degrees[i], std::min(out_degrees[i], n)};
    std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second > b.second;
    });

    // Static prefix tables over all clamped out-degrees, plus Fenwick trees
    // holding the prefix set as it grows; the rest-of-list terms are the
    // difference.  O(log n) per k.
    std::vector<std::int64_t> count_all(n + 2, 0);
    for (const auto& p : pairs) ++count_all[p.second];
    std::vector<std::int64_t> cum_count(n + 2, 0), cum_sum(n + 2, 0);
    for (std::int64_t v = 0; v <= n; ++v) {
        cum_count[v + 1] = cum_count[v] + count_all[v];
        cum_sum[v + 1] = cum_sum[v] + count_all[v] * v;
    }
    Fenwick head_count(static_cast<std::size_t>(n) + 1);
    Fenwick head_sum(static_cast<std::size_t>(n) + 1);
    std::int64_t head_in = 0;
    for (std::int64_t k = 1; k <= n; ++k) {
        const auto [m, d] = pairs[k - 1];
        head_in += m;
        head_count.add(d, 1);
        head_sum.add(d, d);
        const std::int64_t ph = head_sum.prefix(k - 2) +
                                (k - 1) * (k - head_count.prefix(k - 2));
        const std::int64_t rest_sum_below = cum_sum[k] - head_sum.prefix(k - 1);
        const std::int64_t rest_count_below = cum_count[k] - head_count.prefix(k - 1);
        const std::int64_t pr = rest_sum_below + k * ((n - k) - rest_count_below);
        if (head_in > ph + pr) return false;
    }
    return true;
}

bool is_graphical(const BiDegreeSequence& seq) {
    return is_graphical(seq.in_degrees, seq.out_degrees);
}

bool is_graphical_bruteforce(const std::vector<std::int64_t>& in_degrees,
                             const std::vector<std::int64_t>& out_degrees) {
    check_shape(in_degrees, out_degrees);
    const auto n = static_cast<int>(in_degrees.size());
    if (n > 22)
        throw SizeGuard("subset check is exponential; refusing n = " +
                        std::to_string(n));
    if (n == 0) return true;
    const std::int64_t in_sum =
        std::accumulate(in_degrees.begin(), in_degrees.end(), std::int64_t{0});
    const std::int64_t out_sum =
        std::accumulate(out_degrees.begin(), out_degrees.end(), std::int64_t{0});
    if (in_sum != out_sum) return false;

    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        const std::int64_t s = std::popcount(mask);
        std::int64_t capacity = 0, demand = 0;
        for (int i = 0; i < n; ++i) {
            if (mask & (1u << i)) {
                demand += in_degrees[i];
                capacity += std::min(out_degrees[i], s - 1);
            } else {
                capacity += std::min(out_degrees[i], s);
            }
        }
        if (capacity < demand) return false;
    }
    return true;
}

bool is_graphical_bruteforce(const BiDegreeSequence& seq) {
    return is_graphical_bruteforce(seq.in_degrees, seq.out_degrees);
}

} // namespace forge
