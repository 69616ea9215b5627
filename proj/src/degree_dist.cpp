#include "forge/degree_dist.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <sstream>

#include "forge/errors.hpp"

namespace forge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

} // namespace

struct DegreeDistribution::State {
    std::function<double(std::int64_t)> pmf;
    double mean = 0;
    std::optional<double> second_moment; // nullopt means infinite
    double tail_index = kInf;
    std::optional<std::int64_t> bound;
    std::string spec;

    // Cumulative table for inversion sampling, extended on demand.  The
    // accumulator keeps extra precision so that a million tiny tail terms
    // do not lose mass to rounding.
    mutable std::mutex lock;
    mutable std::vector<double> cum;
    mutable long double acc = 0.0L;
    static constexpr std::size_t kMaxTable = std::size_t{1} << 20;
};

DegreeDistribution::DegreeDistribution(std::shared_ptr<State> state)
    : state_(std::move(state)) {}

double DegreeDistribution::pmf(std::int64_t k) const {
    if (k < 0) return 0.0;
    if (state_->bound && k > *state_->bound) return 0.0;
    return state_->pmf(k);
}

double DegreeDistribution::mean() const { return state_->mean; }

bool DegreeDistribution::has_finite_second_moment() const {
    return state_->second_moment.has_value();
}

double DegreeDistribution::second_moment() const {
    if (!state_->second_moment)
        throw Error("second moment of " + state_->spec + " is infinite");
    return *state_->second_moment;
}

double DegreeDistribution::tail_index() const { return state_->tail_index; }

std::optional<std::int64_t> DegreeDistribution::truncation_bound() const {
    return state_->bound;
}

const std::string& DegreeDistribution::spec() const { return state_->spec; }

std::int64_t DegreeDistribution::sample(Rng& rng) const {
    const double u = rng.uniform01();
    const State& s = *state_;
    std::lock_guard<std::mutex> hold(s.lock);
    while (s.cum.empty() || s.cum.back() < u) {
        const std::int64_t k = static_cast<std::int64_t>(s.cum.size());
        if (s.bound && k > *s.bound) break;
        if (s.cum.size() >= State::kMaxTable) break;
        s.acc += static_cast<long double>(s.pmf(k));
        s.cum.push_back(static_cast<double>(std::min(s.acc, 1.0L)));
    }
    // The search stays under the lock: another thread may reallocate the
    // table while extending it.
    auto it = std::lower_bound(s.cum.begin(), s.cum.end(), u);
    if (it == s.cum.end()) --it; // beyond the table: clamp to its last entry
    return static_cast<std::int64_t>(it - s.cum.begin());
}

DegreeDistribution make_poisson(double mean) {
    if (!(mean > 0) || !std::isfinite(mean))
        throw ConfigError("poisson mean must be positive and finite, got " +
                          fmt_double(mean));
    auto s = std::make_shared<DegreeDistribution::State>();
    // Log-space product rather than lgamma: glibc's lgamma writes the
    // process-wide signgam, which is a data race when two distributions
    // extend their tables from different threads.
    s->pmf = [mean](std::int64_t k) {
        double log_p = -mean + static_cast<double>(k) * std::log(mean);
        for (std::int64_t i = 2; i <= k; ++i)
            log_p -= std::log(static_cast<double>(i));
        return std::exp(log_p);
    };
    s->mean = mean;
    s->second_moment = mean + mean * mean;
    s->tail_index = kInf;
    s->spec = "poisson:" + fmt_double(mean);
    return DegreeDistribution(std::move(s));
}

DegreeDistribution make_zeta(double exponent) {
    if (!(exponent > 2) || !std::isfinite(exponent))
        throw ConfigError("zeta exponent must be > 2 so the mean is finite, got " +
                          fmt_double(exponent));
    const double z = std::riemann_zeta(exponent);
    auto s = std::make_shared<DegreeDistribution::State>();
    s->pmf = [exponent, z](std::int64_t k) {
        return std::pow(static_cast<double>(k) + 1.0, -exponent) / z;
    };
    // mean = (zeta(a-1) - zeta(a)) / zeta(a) via E[X+1] - 1; riemann_zeta
    // below 1 would be the analytic continuation, not the series, hence the
    // finiteness cutoffs above (a > 2) and below (a > 3).
    s->mean = (std::riemann_zeta(exponent - 1) - z) / z;
    if (exponent > 3) {
        s->second_moment =
            (std::riemann_zeta(exponent - 2) - 2 * std::riemann_zeta(exponent - 1) + z) / z;
    }
    s->tail_index = exponent - 1;
    s->spec = "zeta:" + fmt_double(exponent);
    return DegreeDistribution(std::move(s));
}

DegreeDistribution make_geometric(double p) {
    if (!(p > 0) || !(p < 1))
        throw ConfigError("geometric parameter must be in (0, 1), got " + fmt_double(p));
    auto s = std::make_shared<DegreeDistribution::State>();
    s->pmf = [p](std::int64_t k) {
        return (1.0 - p) * std::pow(p, static_cast<double>(k));
    };
    const double q = 1.0 - p;
    s->mean = p / q;
    s->second_moment = p * (1.0 + p) / (q * q);
    s->tail_index = kInf;
    s->spec = "geometric:" + fmt_double(p);
    return DegreeDistribution(std::move(s));
}

DegreeDistribution make_empirical(std::vector<double> weights) {
    while (!weights.empty() && weights.back() == 0.0) weights.pop_back();
    if (weights.empty())
        throw ConfigError("empirical distribution needs at least one positive weight");
    long double total = 0.0L;
    for (double w : weights) {
        if (!(w >= 0) || !std::isfinite(w))
            throw ConfigError("empirical weights must be finite and nonnegative");
        total += w;
    }
    if (!(total > 0))
        throw ConfigError("empirical weights sum to zero");

    auto probs = std::make_shared<std::vector<double>>(weights.size());
    long double m1 = 0.0L, m2 = 0.0L;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        const double pk = static_cast<double>(weights[k] / total);
        (*probs)[k] = pk;
        m1 += static_cast<long double>(k) * pk;
        m2 += static_cast<long double>(k) * static_cast<long double>(k) * pk;
    }

    auto s = std::make_shared<DegreeDistribution::State>();
    s->pmf = [probs](std::int64_t k) {
        return k < static_cast<std::int64_t>(probs->size()) ? (*probs)[k] : 0.0;
    };
    s->mean = static_cast<double>(m1);
    s->second_moment = static_cast<double>(m2);
    s->tail_index = kInf;
    s->bound = static_cast<std::int64_t>(weights.size()) - 1;
    if (weights.size() <= 16) {
        std::string joined;
        for (std::size_t k = 0; k < weights.size(); ++k) {
            if (k) joined += ',';
            joined += fmt_double(weights[k]);
        }
        s->spec = "empirical:" + joined;
    } else {
        s->spec = "empirical:(" + std::to_string(weights.size()) + " weights)";
    }
    return DegreeDistribution(std::move(s));
}

namespace {

double parse_number(const std::string& text, const std::string& what) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("cannot parse " + what + " value '" + text + "'");
    }
}

std::vector<double> read_weight_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open weight file '" + path + "'");
    std::vector<double> weights;
    std::string line;
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        std::istringstream fields(line);
        std::string token;
        while (fields >> token)
            weights.push_back(parse_number(token, "weight"));
    }
    return weights;
}

} // namespace

DegreeDistribution parse_distribution(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw ConfigError("distribution spec '" + spec +
                          "' has no ':' (expected family:parameter)");
    const std::string family = spec.substr(0, colon);
    const std::string arg = spec.substr(colon + 1);
    if (family == "poisson") return make_poisson(parse_number(arg, "poisson mean"));
    if (family == "zeta") return make_zeta(parse_number(arg, "zeta exponent"));
    if (family == "geometric") return make_geometric(parse_number(arg, "geometric parameter"));
    if (family == "empirical") {
        if (arg.empty() || arg[0] != '@')
            throw ConfigError("empirical spec must be empirical:@PATH, got '" + spec + "'");
        return make_empirical(read_weight_file(arg.substr(1)));
    }
    throw ConfigError("unknown distribution family '" + family + "'");
}

double kappa(double alpha, double beta) {
    if (!(alpha > 1) || !(beta > 1))
        throw ConfigError("tail indices must exceed 1 to define kappa");
    return std::min({1.0 - 1.0 / alpha, 1.0 - 1.0 / beta, 0.5});
}

double kappa(const DegreeDistribution& in_dist, const DegreeDistribution& out_dist) {
    return kappa(in_dist.tail_index(), out_dist.tail_index());
}

} // namespace forge
