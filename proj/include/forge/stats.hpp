#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "forge/bidegree.hpp"
#include "forge/degree_dist.hpp"

namespace forge {

enum class LimitSource { from_distributions, from_sequence };

/// Limit constants of the sparse regime.
///
/// lambda1 governs self-loops, lambda2 parallel edges; the probability
/// that a uniform pairing is simple tends to exp(-lambda1 - lambda2).
struct LimitConstants {
    double lambda1 = 0;
    double lambda2 = 0;
    double p_simple = 1;
    LimitSource source = LimitSource::from_distributions;
};

/// Theoretical constants for independent in- and out-degree laws with a
/// common mean mu: lambda1 = mu and lambda2 = E[N(N-1)] E[D(D-1)] / (2 mu^2).
/// Throws MeanMismatch if the means differ beyond tolerance and ConfigError
/// when a second moment is infinite.
LimitConstants limits_from_distributions(const DegreeDistribution& in_dist,
                                         const DegreeDistribution& out_dist,
                                         double mean_tolerance = 1e-9);

/// Plug-in estimates from one realized sequence:
///   mu_hat      = L / n
///   lambda1_hat = (1/n) sum N_i D_i / mu_hat
///   lambda2_hat = [(1/n) sum N_i(N_i-1)] [(1/n) sum D_i(D_i-1)] / (2 mu_hat^2)
/// Throws ConfigError when the sequence is empty or its total degree is 0.
LimitConstants limits_from_sequence(const BiDegreeSequence& seq);

/// Empirical degree law of one graph: marginal and joint frequencies of
/// the per-node (in, out) pairs.
struct EmpiricalDegreeLaw {
    std::map<std::int64_t, double> marginal_in;
    std::map<std::int64_t, double> marginal_out;
    std::map<std::pair<std::int64_t, std::int64_t>, double> joint;
    std::int64_t n = 0;
};

/// Build the empirical law from paired degree lists (equal length >= 1).
EmpiricalDegreeLaw empirical_law(const std::vector<std::int64_t>& in_degrees,
                                 const std::vector<std::int64_t>& out_degrees);

/// Relative frequency of each value (counts divided by the sample size).
std::map<std::int64_t, double> degree_frequencies(
    const std::vector<std::int64_t>& degrees);

/// Total variation distance between two finitely supported laws given as
/// value -> probability maps: half the sum of absolute differences.  Both
/// maps must sum to 1 within 1e-9.
double tv_distance(const std::map<std::int64_t, double>& p,
                   const std::map<std::int64_t, double>& q);

/// Total variation distance between an observed frequency map and a model
/// distribution, truncating the model tail once its mass beyond the
/// scanned range is below 1e-9 (the remainder is added back in full).
double tv_against(const std::map<std::int64_t, double>& frequencies,
                  const DegreeDistribution& dist);

/// Lower and upper regularized incomplete gamma functions P(a, x), Q(a, x),
/// a > 0, x >= 0.  Series expansion below the a+1 crossover, Lentz
/// continued fraction above; absolute accuracy around 1e-14.
double reg_gamma_p(double a, double x);
double reg_gamma_q(double a, double x);

/// Upper tail of the chi-square law: P(X >= statistic) with dof degrees
/// of freedom.
double chi_square_p_value(double statistic, std::int64_t dof);

struct GoodnessOfFit {
    bool skipped = false;     // not enough data or degenerate binning
    std::string skip_reason;
    double statistic = 0;
    std::int64_t dof = 0;
    double p_value = 1;
};

/// Pearson chi-square test of the samples against Poisson(lambda).  Bins
/// are the single values 0..K plus a pooled right tail, with K the largest
/// cutoff keeping every bin's expected count at or above min_expected.
/// Needs at least 200 samples (throws ConfigError below that).
GoodnessOfFit poisson_fit(const std::vector<std::int64_t>& samples,
                          double lambda, double min_expected = 5.0);

/// Pearson chi-square independence test of two paired integer samples.
/// Each margin is pooled into contiguous runs of values whose observed
/// count reaches ceil(sqrt(min_expected * N)); a trailing short run is
/// merged into its neighbor.  Needs at least 1000 pairs (throws
/// ConfigError below that); a margin concentrated on a single bin makes
/// the result skipped with a "degenerate table" reason.
GoodnessOfFit independence_check(const std::vector<std::int64_t>& first,
                                 const std::vector<std::int64_t>& second,
                                 double min_expected = 5.0);

struct ExperimentThresholds {
    double p_band_se = 3.0;   // allowed |empirical - theory| in SE units
    double s_mean_rel = 0.05; // relative error allowed on mean self-loops
    double m_mean_rel = 0.07; // relative error allowed on mean excess
    double fit_p_min = 1e-3;  // chi-square p-values must exceed this
};

struct ExperimentReport {
    std::string in_spec;
    std::string out_spec;
    std::int64_t n = 0;
    std::int64_t reps = 0;
    std::uint64_t seed = 0;

    double empirical_p_simple = 0;
    double ci_low = 0;  // 95% Wilson interval for the simplicity probability
    double ci_high = 0;
    double theory_p_simple = 0;

    double lambda1_hat = 0; // plug-in estimates averaged over replicates
    double lambda2_hat = 0;
    double lambda1_theory = 0;
    double lambda2_theory = 0;

    double s_mean = 0; // mean self-loop count per replicate
    double m_mean = 0; // mean parallel-excess count per replicate

    GoodnessOfFit s_fit;
    GoodnessOfFit m_fit;
    GoodnessOfFit independence;

    bool passed = false;
    std::vector<std::string> failures;
    double runtime_seconds = 0; // filled by the CLI only when asked

    // Per-replicate counters, in replicate order (not serialized).
    std::vector<std::int64_t> s_samples;
    std::vector<std::int64_t> m_samples;
};

/// Monte Carlo check of the simplicity limit: generate `reps` sequences and
/// one uniform pairing each, then compare self-loop/parallel-edge behavior
/// with the theoretical constants.  Replicate r always draws from
/// Rng::stream(master_seed, r), so the report is identical for every value
/// of jobs.  reps must be at least 1000.
ExperimentReport simple_probability_experiment(
    const DegreeDistribution& in_dist, const DegreeDistribution& out_dist,
    std::int64_t n, std::int64_t reps, const SamplerParams& params,
    std::uint64_t master_seed, int jobs = 1,
    const ExperimentThresholds& thresholds = {});

} // namespace forge
