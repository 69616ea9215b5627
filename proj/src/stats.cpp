#include "forge/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "forge/errors.hpp"
#include "forge/config_model.hpp"

namespace forge {

LimitConstants limits_from_distributions(const DegreeDistribution& in_dist,
                                         const DegreeDistribution& out_dist,
                                         double mean_tolerance) {
    const double in_mean = in_dist.mean();
    const double out_mean = out_dist.mean();
    if (!std::isfinite(in_mean) || !std::isfinite(out_mean))
        throw ConfigError("limit constants need finite degree means");
    if (std::fabs(in_mean - out_mean) > mean_tolerance)
        throw MeanMismatch(in_mean, out_mean, mean_tolerance);
    if (!in_dist.has_finite_second_moment())
        throw ConfigError("infinite second moment (" + in_dist.spec() +
                          "): the simplicity limit constants are undefined");
    if (!out_dist.has_finite_second_moment())
        throw ConfigError("infinite second moment (" + out_dist.spec() +
                          "): the simplicity limit constants are undefined");
    const double mu = 0.5 * (in_mean + out_mean);

    LimitConstants lim;
    lim.source = LimitSource::from_distributions;
    if (mu <= 0) return lim; // no stubs, every pairing is (vacuously) simple
    lim.lambda1 = in_mean * out_mean / mu;
    const double fm_in = in_dist.second_moment() - in_mean;    // E[N(N-1)]
    const double fm_out = out_dist.second_moment() - out_mean; // E[D(D-1)]
    lim.lambda2 = fm_in * fm_out / (2 * mu * mu);
    lim.p_simple = std::exp(-lim.lambda1 - lim.lambda2);
    return lim;
}

LimitConstants limits_from_sequence(const BiDegreeSequence& seq) {
    const std::int64_t n = seq.size();
    if (n == 0 || seq.total <= 0)
        throw ConfigError("zero total degree: plug-in limit constants are "
                          "undefined for an empty or all-zero sequence");
    LimitConstants lim;
    lim.source = LimitSource::from_sequence;
    long double sum_nd = 0, sum_nn = 0, sum_dd = 0;
    for (std::int64_t i = 0; i < n; ++i) {
        const auto N = static_cast<long double>(seq.in_degrees[i]);
        const auto D = static_cast<long double>(seq.out_degrees[i]);
        sum_nd += N * D;
        sum_nn += N * (N - 1);
        sum_dd += D * (D - 1);
    }
    const long double mu = static_cast<long double>(seq.total) / n;
    lim.lambda1 = static_cast<double>((sum_nd / n) / mu);
    lim.lambda2 = static_cast<double>((sum_nn / n) * (sum_dd / n) / (2 * mu * mu));
    lim.p_simple = std::exp(-lim.lambda1 - lim.lambda2);
    return lim;
}

EmpiricalDegreeLaw empirical_law(const std::vector<std::int64_t>& in_degrees,
                                 const std::vector<std::int64_t>& out_degrees) {
    if (in_degrees.size() != out_degrees.size())
        throw ConfigError("degree lists have different lengths");
    if (in_degrees.empty())
        throw ConfigError("empirical law needs at least one node");
    EmpiricalDegreeLaw law;
    law.n = static_cast<std::int64_t>(in_degrees.size());
    const double unit = 1.0 / static_cast<double>(law.n);
    for (std::size_t i = 0; i < in_degrees.size(); ++i) {
        law.marginal_in[in_degrees[i]] += unit;
        law.marginal_out[out_degrees[i]] += unit;
        law.joint[{in_degrees[i], out_degrees[i]}] += unit;
    }
    return law;
}

std::map<std::int64_t, double> degree_frequencies(
    const std::vector<std::int64_t>& degrees) {
    std::map<std::int64_t, double> freq;
    if (degrees.empty()) return freq;
    const double unit = 1.0 / static_cast<double>(degrees.size());
    for (const auto d : degrees) freq[d] += unit;
    return freq;
}

double tv_distance(const std::map<std::int64_t, double>& p,
                   const std::map<std::int64_t, double>& q) {
    for (const auto* dist : {&p, &q}) {
        long double mass = 0;
        for (const auto& [value, prob] : *dist) mass += prob;
        if (std::fabs(static_cast<double>(mass) - 1.0) > 1e-9)
            throw ConfigError("probability map is not normalized (mass " +
                              std::to_string(static_cast<double>(mass)) + ")");
    }
    double total = 0;
    auto it_p = p.begin();
    auto it_q = q.begin();
    while (it_p != p.end() || it_q != q.end()) {
        if (it_q == q.end() || (it_p != p.end() && it_p->first < it_q->first)) {
            total += std::fabs(it_p->second);
            ++it_p;
        } else if (it_p == p.end() || it_q->first < it_p->first) {
            total += std::fabs(it_q->second);
            ++it_q;
        } else {
            total += std::fabs(it_p->second - it_q->second);
            ++it_p;
            ++it_q;
        }
    }
    return 0.5 * total;
}

double tv_against(const std::map<std::int64_t, double>& frequencies,
                  const DegreeDistribution& dist) {
    constexpr double kTailCut = 1e-9;
    constexpr std::int64_t kScanCap = std::int64_t{1} << 21;

    const std::int64_t k_obs =
        frequencies.empty() ? -1 : frequencies.rbegin()->first;
    double total = 0;
    long double model_mass = 0;
    for (std::int64_t k = 0; k <= k_obs || 1.0L - model_mass > kTailCut; ++k) {
        if (k >= kScanCap) break;
        if (dist.truncation_bound() && k > *dist.truncation_bound() && k > k_obs)
            break;
        const double pk = dist.pmf(k);
        model_mass += static_cast<long double>(pk);
        const auto it = frequencies.find(k);
        const double fk = it == frequencies.end() ? 0.0 : it->second;
        total += std::fabs(fk - pk);
    }
    // Unscanned model tail: all of it counts, the observation there is 0.
    const double leftover = static_cast<double>(std::max(0.0L, 1.0L - model_mass));
    return 0.5 * (total + leftover);
}

double reg_gamma_p(double a, double x) {
    return 1.0 - reg_gamma_q(a, x);
}

double reg_gamma_q(double a, double x) {
    if (!(a > 0) || !(x >= 0))
        throw ConfigError("regularized gamma needs a > 0 and x >= 0");
    if (x == 0) return 1.0;

    const double log_prefix = a * std::log(x) - x - std::lgamma(a);

    if (x < a + 1) {
        // P by its power series, Q as the complement.
        double term = 1.0 / a;
        double sum = term;
        for (int i = 1; i < 100000; ++i) {
            term *= x / (a + i);
            sum += term;
            if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
        }
        return 1.0 - sum * std::exp(log_prefix);
    }

    // Q by the modified Lentz continued fraction.
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 100000; ++i) {
        const double an = -static_cast<double>(i) * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) break;
    }
    return std::exp(log_prefix) * h;
}

double chi_square_p_value(double statistic, std::int64_t dof) {
    if (dof < 1) throw ConfigError("chi-square needs at least 1 degree of freedom");
    if (statistic <= 0) return 1.0;
    return reg_gamma_q(0.5 * static_cast<double>(dof), 0.5 * statistic);
}

GoodnessOfFit poisson_fit(const std::vector<std::int64_t>& samples,
                          double lambda, double min_expected) {
    GoodnessOfFit result;
    const auto N = static_cast<double>(samples.size());
    if (samples.size() < 200)
        throw ConfigError("insufficient samples: the reference fit needs at "
                          "least 200, got " + std::to_string(samples.size()));
    if (!(lambda > 0) || !std::isfinite(lambda)) {
        result.skipped = true;
        result.skip_reason = "reference rate is zero or not finite";
        return result;
    }

    // Keep single-value bins 0..K while their expected counts stay above
    // the floor, then pool everything past K into one tail bin, shrinking
    // K if the tail itself starts too thin.
    std::vector<double> probs;
    double p = std::exp(-lambda);
    long double covered = 0;
    while (N * p >= min_expected) {
        probs.push_back(p);
        covered += p;
        p *= lambda / static_cast<double>(probs.size());
    }
    double tail = static_cast<double>(1.0L - covered);
    while (!probs.empty() && N * tail < min_expected) {
        tail += probs.back();
        probs.pop_back();
    }
    if (probs.empty()) {
        result.skipped = true;
        result.skip_reason = "too few samples to form two bins";
        return result;
    }
    const auto K = static_cast<std::int64_t>(probs.size()) - 1;

    std::vector<std::int64_t> observed(probs.size() + 1, 0);
    for (const auto s : samples) {
        if (s < 0) throw ConfigError("count samples must be nonnegative");
        ++observed[static_cast<std::size_t>(std::min(s, K + 1))];
    }

    double stat = 0;
    for (std::size_t b = 0; b < probs.size(); ++b) {
        const double expect = N * probs[b];
        const double diff = static_cast<double>(observed[b]) - expect;
        stat += diff * diff / expect;
    }
    const double tail_expect = N * tail;
    const double tail_diff = static_cast<double>(observed.back()) - tail_expect;
    stat += tail_diff * tail_diff / tail_expect;

    result.statistic = stat;
    result.dof = static_cast<std::int64_t>(probs.size()); // bins - 1
    result.p_value = chi_square_p_value(stat, result.dof);
    return result;
}

namespace {

/// Contiguous pooling of one margin: returns each value's bin index via a
/// list of bin upper bounds.  Runs accumulate until they reach the target
/// count; a short trailing run joins the previous bin.
std::vector<std::int64_t> margin_bounds(const std::map<std::int64_t, std::int64_t>& counts,
                                        std::int64_t target) {
    std::vector<std::int64_t> bounds;
    std::int64_t acc = 0;
    for (const auto& [value, count] : counts) {
        acc += count;
        if (acc >= target) {
            bounds.push_back(value);
            acc = 0;
        }
    }
    if (acc > 0 && !bounds.empty())
        bounds.back() = counts.rbegin()->first;
    if (acc > 0 && bounds.empty())
        bounds.push_back(counts.rbegin()->first);
    return bounds;
}

std::size_t bin_of(const std::vector<std::int64_t>& bounds, std::int64_t value) {
    return static_cast<std::size_t>(
        std::lower_bound(bounds.begin(), bounds.end(), value) - bounds.begin());
}

} // namespace

GoodnessOfFit independence_check(const std::vector<std::int64_t>& first,
                                 const std::vector<std::int64_t>& second,
                                 double min_expected) {
    if (first.size() != second.size())
        throw ConfigError("paired samples have different lengths");
    if (first.size() < 1000)
        throw ConfigError("insufficient samples: the independence check needs "
                          "at least 1000 pairs, got " +
                          std::to_string(first.size()));
    GoodnessOfFit result;
    const auto N = static_cast<std::int64_t>(first.size());

    const auto target = static_cast<std::int64_t>(
        std::ceil(std::sqrt(min_expected * static_cast<double>(N))));
    std::map<std::int64_t, std::int64_t> first_counts, second_counts;
    for (std::int64_t i = 0; i < N; ++i) {
        ++first_counts[first[i]];
        ++second_counts[second[i]];
    }
    const auto row_bounds = margin_bounds(first_counts, target);
    const auto col_bounds = margin_bounds(second_counts, target);
    const auto rows = row_bounds.size();
    const auto cols = col_bounds.size();
    if (rows < 2 || cols < 2) {
        result.skipped = true;
        result.skip_reason = "degenerate table: a margin pools into a single bin";
        return result;
    }

    std::vector<std::int64_t> table(rows * cols, 0);
    std::vector<std::int64_t> row_sum(rows, 0), col_sum(cols, 0);
    for (std::int64_t i = 0; i < N; ++i) {
        const auto r = bin_of(row_bounds, first[i]);
        const auto c = bin_of(col_bounds, second[i]);
        ++table[r * cols + c];
        ++row_sum[r];
        ++col_sum[c];
    }

    double stat = 0;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            const double expect = static_cast<double>(row_sum[r]) *
                                  static_cast<double>(col_sum[c]) /
                                  static_cast<double>(N);
            const double diff = static_cast<double>(table[r * cols + c]) - expect;
            stat += diff * diff / expect;
        }
    }
    result.statistic = stat;
    result.dof = static_cast<std::int64_t>((rows - 1) * (cols - 1));
    result.p_value = chi_square_p_value(stat, result.dof);
    return result;
}

ExperimentReport simple_probability_experiment(
    const DegreeDistribution& in_dist, const DegreeDistribution& out_dist,
    std::int64_t n, std::int64_t reps, const SamplerParams& params,
    std::uint64_t master_seed, int jobs, const ExperimentThresholds& thresholds) {
    if (n < 1) throw ConfigError("n must be at least 1");
    if (reps < 1000)
        throw ConfigError("reps too small: the simplicity experiment needs at "
                          "least 1000 replicates for its acceptance bands, got " +
                          std::to_string(reps));

    const LimitConstants theory =
        limits_from_distributions(in_dist, out_dist, params.mean_tolerance);

    ExperimentReport report;
    report.in_spec = in_dist.spec();
    report.out_spec = out_dist.spec();
    report.n = n;
    report.reps = reps;
    report.seed = master_seed;
    report.theory_p_simple = theory.p_simple;
    report.lambda1_theory = theory.lambda1;
    report.lambda2_theory = theory.lambda2;

    report.s_samples.assign(reps, 0);
    report.m_samples.assign(reps, 0);
    std::vector<double> l1(reps, 0), l2(reps, 0);
    std::vector<std::uint8_t> simple(reps, 0);

    // Replicate r is a pure function of (master_seed, r); threads only
    // decide who computes it, so any jobs value gives identical results.
    auto run_block = [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t r = lo; r < hi; ++r) {
            Rng rng = Rng::stream(master_seed, static_cast<std::uint64_t>(r));
            const BiDegreeSample draw =
                sample_bidegree(in_dist, out_dist, n, params, rng);
            const Multigraph g = pair_uniform(draw.sequence, rng);
            report.s_samples[r] = g.self_loops;
            report.m_samples[r] = g.multi_excess;
            simple[r] = g.simple() ? 1 : 0;
            if (draw.sequence.total > 0) {
                const LimitConstants plug_in = limits_from_sequence(draw.sequence);
                l1[r] = plug_in.lambda1;
                l2[r] = plug_in.lambda2;
            }
        }
    };

    const int threads = static_cast<int>(
        std::clamp<std::int64_t>(jobs, 1, std::min<std::int64_t>(reps, 64)));
    if (threads == 1) {
        run_block(0, reps);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(threads);
        for (int t = 0; t < threads; ++t) {
            const std::int64_t lo = reps * t / threads;
            const std::int64_t hi = reps * (t + 1) / threads;
            pool.emplace_back([&, t, lo, hi] {
                try {
                    run_block(lo, hi);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (const auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    // Reductions run in replicate order on one thread, for bit-stable sums.
    std::int64_t simple_count = 0, s_total = 0, m_total = 0;
    long double l1_total = 0, l2_total = 0;
    for (std::int64_t r = 0; r < reps; ++r) {
        simple_count += simple[r];
        s_total += report.s_samples[r];
        m_total += report.m_samples[r];
        l1_total += l1[r];
        l2_total += l2[r];
    }
    const auto dreps = static_cast<double>(reps);
    report.empirical_p_simple = static_cast<double>(simple_count) / dreps;
    report.s_mean = static_cast<double>(s_total) / dreps;
    report.m_mean = static_cast<double>(m_total) / dreps;
    report.lambda1_hat = static_cast<double>(l1_total / reps);
    report.lambda2_hat = static_cast<double>(l2_total / reps);

    {
        // 95% Wilson score interval for the simplicity probability.
        const double z = 1.959963984540054;
        const double phat = report.empirical_p_simple;
        const double z2n = z * z / dreps;
        const double denom = 1.0 + z2n;
        const double center = phat + z2n / 2.0;
        const double half =
            z * std::sqrt(phat * (1.0 - phat) / dreps + z2n / (4.0 * dreps));
        report.ci_low = std::max(0.0, (center - half) / denom);
        report.ci_high = std::min(1.0, (center + half) / denom);
    }

    report.s_fit = poisson_fit(report.s_samples, theory.lambda1);
    report.m_fit = poisson_fit(report.m_samples, theory.lambda2);
    report.independence = independence_check(report.s_samples, report.m_samples);

    auto fail = [&](const std::string& msg) { report.failures.push_back(msg); };
    const double p_th = theory.p_simple;
    const double band =
        thresholds.p_band_se * std::sqrt(p_th * (1.0 - p_th) / dreps);
    if (std::fabs(report.empirical_p_simple - p_th) > band)
        fail("empirical simplicity probability " +
             std::to_string(report.empirical_p_simple) + " misses " +
             std::to_string(p_th) + " by more than " + std::to_string(band));
    if (theory.lambda1 > 0) {
        if (std::fabs(report.s_mean - theory.lambda1) >
            thresholds.s_mean_rel * theory.lambda1)
            fail("mean self-loop count " + std::to_string(report.s_mean) +
                 " is off " + std::to_string(theory.lambda1) + " by more than " +
                 std::to_string(100 * thresholds.s_mean_rel) + "%");
    } else if (report.s_mean != 0) {
        fail("self-loops observed although the limit rate is zero");
    }
    if (std::isfinite(theory.lambda2)) {
        if (theory.lambda2 > 0) {
            if (std::fabs(report.m_mean - theory.lambda2) >
                thresholds.m_mean_rel * theory.lambda2)
                fail("mean parallel excess " + std::to_string(report.m_mean) +
                     " is off " + std::to_string(theory.lambda2) +
                     " by more than " +
                     std::to_string(100 * thresholds.m_mean_rel) + "%");
        } else if (report.m_mean != 0) {
            fail("parallel edges observed although the limit rate is zero");
        }
    }
    if (!report.s_fit.skipped && report.s_fit.p_value <= thresholds.fit_p_min)
        fail("self-loop counts reject their limit law (p = " +
             std::to_string(report.s_fit.p_value) + ")");
    if (!report.m_fit.skipped && report.m_fit.p_value <= thresholds.fit_p_min)
        fail("parallel-excess counts reject their limit law (p = " +
             std::to_string(report.m_fit.p_value) + ")");
    if (!report.independence.skipped &&
        report.independence.p_value <= thresholds.fit_p_min)
        fail("self-loop and parallel counts look dependent (p = " +
             std::to_string(report.independence.p_value) + ")");
    report.passed = report.failures.empty();
    return report;
}

} // namespace forge
