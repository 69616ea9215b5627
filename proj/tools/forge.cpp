#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "forge/bidegree.hpp"
#include "forge/config_model.hpp"
#include "forge/degree_dist.hpp"
#include "forge/errors.hpp"
#include "forge/graphicality.hpp"
#include "forge/io.hpp"
#include "forge/rng.hpp"
#include "forge/simplify.hpp"
#include "forge/stats.hpp"

namespace {

using nlohmann::json;

/// Flat key=value config files, merged under the command-line flags: a key
/// only takes effect when the matching flag was not given.  CLI11 2.x never
/// processes set_config on a subcommand (a child app skips
/// _process_config_file), so the merge is done by hand.
class ConfigMerge {
  public:
    void add(const std::string& key, const CLI::Option* flag,
             std::function<void(const std::string&)> set) {
        entries_[key] = Entry{flag, std::move(set)};
    }

    void apply(const std::string& path) const {
        std::ifstream in(path);
        if (!in)
            throw forge::ConfigError("cannot open config file '" + path + "'");
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (const auto hash = line.find('#'); hash != std::string::npos)
                line.erase(hash);
            const auto trim = [](std::string s) {
                const auto a = s.find_first_not_of(" \t\r");
                if (a == std::string::npos) return std::string();
                const auto b = s.find_last_not_of(" \t\r");
                return s.substr(a, b - a + 1);
            };
            if (trim(line).empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw forge::ConfigError(path + ":" + std::to_string(line_no) +
                                         ": expected key=value");
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            const auto it = entries_.find(key);
            if (it == entries_.end())
                throw forge::ConfigError(path + ":" + std::to_string(line_no) +
                                         ": unknown key '" + key + "'");
            if (it->second.flag != nullptr && it->second.flag->count() > 0)
                continue; // command line wins
            try {
                it->second.set(value);
            } catch (const forge::ConfigError&) {
                throw;
            } catch (const std::exception&) {
                throw forge::ConfigError(path + ":" + std::to_string(line_no) +
                                         ": bad value '" + value +
                                         "' for key '" + key + "'");
            }
        }
    }

  private:
    struct Entry {
        const CLI::Option* flag = nullptr;
        std::function<void(const std::string&)> set;
    };
    std::map<std::string, Entry> entries_;
};

std::int64_t to_i64(const std::string& text) {
    std::size_t pos = 0;
    const std::int64_t v = std::stoll(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
}

std::uint64_t to_u64(const std::string& text) {
    if (text.empty() || text.find('-') != std::string::npos)
        throw std::invalid_argument(text);
    std::size_t pos = 0;
    const auto v = std::stoull(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return static_cast<std::uint64_t>(v);
}

double to_double(const std::string& text) {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
}

bool to_bool(const std::string& text) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw std::invalid_argument(text);
}

struct SampleOpts {
    std::string fin;
    std::string fout;
    std::int64_t n = 0;
    double delta0 = 0;
    bool delta0_set = false;
    int max_resamples = 1000;
    double mean_tolerance = 1e-9;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string output;
    std::string config_path;
    ConfigMerge merge;
};

struct GenerateOpts : SampleOpts {
    std::string model = "repeated";
    std::int64_t max_attempts = 0; // 0 picks the budget heuristic
    bool resample_degrees = false;
};

struct ExperimentOpts : SampleOpts {
    std::int64_t reps = 0;
    int jobs = 1;
    bool timing = false;
};

std::uint64_t env_seed_fallback() {
    const char* raw = std::getenv("FORGE_SEED");
    if (raw == nullptr) return 0;
    try {
        return to_u64(raw);
    } catch (const std::exception&) {
        throw forge::ConfigError("FORGE_SEED is not an unsigned integer: '" +
                                 std::string(raw) + "'");
    }
}

void add_sampler_flags(CLI::App* cmd, SampleOpts& o) {
    auto* fin = cmd->add_option("--fin", o.fin,
                                "In-degree distribution spec (poisson:M, "
                                "zeta:A, geometric:P, empirical:@FILE)");
    auto* fout =
        cmd->add_option("--fout", o.fout, "Out-degree distribution spec");
    auto* n = cmd->add_option("-n,--nodes", o.n, "Number of nodes")
                  ->check(CLI::PositiveNumber);
    auto* delta0 = cmd->add_option(
        "--delta0", o.delta0,
        "Sum-gate exponent slack, in (0, kappa); default kappa/2");
    auto* max_resamples =
        cmd->add_option("--max-resamples", o.max_resamples,
                        "Degree redraws before the sum gate gives up")
            ->capture_default_str();
    auto* mean_tolerance =
        cmd->add_option("--mean-tolerance", o.mean_tolerance,
                        "Allowed |E[in] - E[out]| mismatch")
            ->capture_default_str();
    auto* seed = cmd->add_option(
        "--seed", o.seed, "RNG seed; falls back to FORGE_SEED, then 0");
    auto* output = cmd->add_option(
        "-o,--output", o.output,
        "Artifact path (a .json sidecar is written next to it); stdout and "
        "no sidecar when omitted");
    cmd->add_option("--config", o.config_path,
                    "Flat key=value file mirroring the long flag names; "
                    "flags given on the command line win");

    o.merge.add("fin", fin, [&o](const std::string& v) { o.fin = v; });
    o.merge.add("fout", fout, [&o](const std::string& v) { o.fout = v; });
    o.merge.add("nodes", n, [&o](const std::string& v) {
        o.n = to_i64(v);
        if (o.n < 1) throw forge::ConfigError("nodes must be positive");
    });
    o.merge.add("n", n, [&o](const std::string& v) {
        o.n = to_i64(v);
        if (o.n < 1) throw forge::ConfigError("n must be positive");
    });
    o.merge.add("delta0", delta0, [&o](const std::string& v) {
        o.delta0 = to_double(v);
        o.delta0_set = true;
    });
    o.merge.add("max-resamples", max_resamples, [&o](const std::string& v) {
        o.max_resamples = static_cast<int>(to_i64(v));
    });
    o.merge.add("mean-tolerance", mean_tolerance,
                [&o](const std::string& v) { o.mean_tolerance = to_double(v); });
    o.merge.add("seed", seed, [&o](const std::string& v) {
        o.seed = to_u64(v);
        o.seed_set = true;
    });
    o.merge.add("output", output,
                [&o](const std::string& v) { o.output = v; });

    // Flag presence on the command line implies the value is already set.
    cmd->parse_complete_callback([&o, delta0, seed] {
        if (delta0->count() > 0) o.delta0_set = true;
        if (seed->count() > 0) o.seed_set = true;
    });
}

void finish_opts(SampleOpts& o) {
    if (!o.config_path.empty()) o.merge.apply(o.config_path);
    if (!o.seed_set) o.seed = env_seed_fallback();
    if (o.fin.empty())
        throw forge::ConfigError("--fin is required (flag or config key)");
    if (o.fout.empty())
        throw forge::ConfigError("--fout is required (flag or config key)");
    if (o.n < 1)
        throw forge::ConfigError("-n is required (flag or config key)");
}

forge::SamplerParams sampler_params(const SampleOpts& o) {
    forge::SamplerParams params;
    if (o.delta0_set) params.delta0 = o.delta0;
    params.max_resamples = o.max_resamples;
    params.mean_tolerance = o.mean_tolerance;
    return params;
}

json config_echo(const SampleOpts& o, double delta0_used) {
    return {
        {"fin", o.fin},
        {"fout", o.fout},
        {"n", o.n},
        {"delta0", delta0_used},
        {"max_resamples", o.max_resamples},
        {"mean_tolerance", o.mean_tolerance},
        {"seed", o.seed},
    };
}

int cmd_degrees(SampleOpts& o) {
    finish_opts(o);
    const auto fin = forge::parse_distribution(o.fin);
    const auto fout = forge::parse_distribution(o.fout);
    const auto params = sampler_params(o);
    forge::Rng rng(o.seed);
    const auto sample = forge::sample_bidegree(fin, fout, o.n, params, rng);
    if (o.output.empty()) {
        forge::write_degree_rows(std::cout, sample.sequence.in_degrees,
                                 sample.sequence.out_degrees);
        return 0;
    }
    forge::write_degree_file(o.output, sample.sequence.in_degrees,
                             sample.sequence.out_degrees);
    const double kap = forge::kappa(fin, fout);
    const double delta0_used = params.delta0 ? *params.delta0 : kap / 2;
    const json side = {
        {"config", config_echo(o, delta0_used)},
        {"kappa", kap},
        {"delta_threshold", forge::delta_threshold(o.n, kap, delta0_used)},
        {"diagnostics", forge::json_from_diagnostics(sample.diagnostics)},
    };
    forge::write_json_file(o.output + ".json", side);
    return 0;
}

int cmd_check(const std::string& degrees_path) {
    if (degrees_path.empty())
        throw forge::ConfigError("--degrees is required (flag or config key)");
    const auto raw = forge::load_degree_file(degrees_path);
    const bool ok = forge::is_graphical(raw.in_degrees, raw.out_degrees);
    std::cout << "graphical: " << (ok ? "true" : "false") << '\n';
    return ok ? 0 : 3;
}

/// Repeated model that redraws the whole bi-degree-sequence after every
/// failed pairing instead of keeping it fixed.
forge::RepeatedResult resampling_repeated(const forge::DegreeDistribution& fin,
                                          const forge::DegreeDistribution& fout,
                                          std::int64_t n,
                                          const forge::SamplerParams& params,
                                          forge::Rng& rng,
                                          std::int64_t max_attempts,
                                          forge::BiDegreeSample& sample) {
    for (std::int64_t attempt = 1; attempt <= max_attempts; ++attempt) {
        if (attempt > 1)
            sample = forge::sample_bidegree(fin, fout, n, params, rng);
        const auto g = forge::pair_uniform(sample.sequence, rng);
        if (!g.simple()) continue;
        forge::SimpleDigraph graph;
        graph.n = g.n;
        graph.edges.reserve(g.edges.size());
        for (const auto& e : g.edges) graph.edges.emplace_back(e.src, e.dst);
        graph.in_degrees = sample.sequence.in_degrees;
        graph.out_degrees = sample.sequence.out_degrees;
        graph.provenance = forge::Provenance::repeated;
        return {std::move(graph), attempt};
    }
    throw forge::AttemptsExhausted(max_attempts,
                                   forge::is_graphical(sample.sequence));
}

int cmd_generate(GenerateOpts& o) {
    finish_opts(o);
    if (o.resample_degrees && o.model != "repeated")
        throw forge::ConfigError(
            "--resample-degrees only applies to --model repeated");
    const auto fin = forge::parse_distribution(o.fin);
    const auto fout = forge::parse_distribution(o.fout);
    if (o.model == "repeated" && (!fin.has_finite_second_moment() ||
                                  !fout.has_finite_second_moment()))
        std::cerr << "warning: a degree distribution with infinite second "
                     "moment makes the repeated model retry (almost) "
                     "forever; consider --model erased\n";
    const auto params = sampler_params(o);
    const double kap = forge::kappa(fin, fout);
    const double delta0_used = params.delta0 ? *params.delta0 : kap / 2;
    forge::Rng rng(o.seed);
    auto sample = forge::sample_bidegree(fin, fout, o.n, params, rng);

    json config = config_echo(o, delta0_used);
    config["model"] = o.model;
    json side = {
        {"model", o.model},
        {"kappa", kap},
        {"delta_threshold", forge::delta_threshold(o.n, kap, delta0_used)},
    };

    std::vector<std::int64_t> realized_in;
    std::vector<std::int64_t> realized_out;
    forge::Multigraph multi;
    forge::SimpleDigraph graph;
    if (o.model == "multigraph") {
        multi = forge::pair_uniform(sample.sequence, rng);
        realized_in = multi.in_degrees();
        realized_out = multi.out_degrees();
        side["total_edges"] = multi.total_edges;
        side["self_loops"] = multi.self_loops;
        side["multi_excess"] = multi.multi_excess;
        side["multi_pairs"] = multi.multi_pairs;
    } else if (o.model == "repeated") {
        const std::int64_t budget =
            o.max_attempts > 0 ? o.max_attempts
                               : forge::default_max_attempts(sample.sequence);
        config["max_attempts"] = budget;
        config["resample_degrees"] = o.resample_degrees;
        forge::RepeatedResult result =
            o.resample_degrees
                ? resampling_repeated(fin, fout, o.n, params, rng, budget,
                                      sample)
                : forge::repeated_model(sample.sequence, rng, budget);
        graph = std::move(result.graph);
        realized_in = graph.in_degrees;
        realized_out = graph.out_degrees;
        side["attempts"] = result.attempts;
    } else {
        auto result = forge::erased_model(sample.sequence, rng);
        graph = std::move(result.graph);
        realized_in = graph.in_degrees;
        realized_out = graph.out_degrees;
        std::int64_t touched = 0;
        for (std::int64_t i = 0; i < o.n; ++i)
            if (result.report.removed_in[i] > 0 ||
                result.report.removed_out[i] > 0)
                ++touched;
        side["erasure_report"] = {
            {"total_self_loops_removed",
             result.report.total_self_loops_removed},
            {"total_parallel_edges_merged",
             result.report.total_parallel_edges_merged},
            {"nodes_touched", touched},
            {"touched_fraction",
             static_cast<double>(touched) / static_cast<double>(o.n)},
        };
    }

    side["config"] = std::move(config);
    side["diagnostics"] = forge::json_from_diagnostics(sample.diagnostics);
    if (sample.sequence.total > 0) {
        const auto hat = forge::limits_from_sequence(sample.sequence);
        side["lambda1_hat"] = hat.lambda1;
        side["lambda2_hat"] = hat.lambda2;
    } else {
        side["lambda1_hat"] = nullptr;
        side["lambda2_hat"] = nullptr;
    }
    side["realized_in_histogram"] = forge::json_degree_histogram(realized_in);
    side["realized_out_histogram"] = forge::json_degree_histogram(realized_out);
    side["tv_in"] =
        forge::tv_against(forge::degree_frequencies(realized_in), fin);
    side["tv_out"] =
        forge::tv_against(forge::degree_frequencies(realized_out), fout);

    if (o.output.empty()) {
        if (o.model == "multigraph")
            forge::write_multigraph_rows(std::cout, multi);
        else
            forge::write_edge_rows(std::cout, graph);
        return 0;
    }
    if (o.model == "multigraph")
        forge::write_multigraph_file(o.output, multi);
    else
        forge::write_edge_file(o.output, graph);
    forge::write_json_file(o.output + ".json", side);
    return 0;
}

int cmd_experiment(ExperimentOpts& o) {
    finish_opts(o);
    if (o.reps < 1)
        throw forge::ConfigError("--reps is required (flag or config key)");
    const auto fin = forge::parse_distribution(o.fin);
    const auto fout = forge::parse_distribution(o.fout);
    const auto params = sampler_params(o);
    const auto start = std::chrono::steady_clock::now();
    auto report = forge::simple_probability_experiment(
        fin, fout, o.n, o.reps, params, o.seed, o.jobs);
    if (o.timing)
        report.runtime_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          start)
                .count();
    const json doc = forge::json_from_report(report);
    if (o.output.empty())
        std::cout << doc.dump(2) << '\n';
    else
        forge::write_json_file(o.output, doc);
    if (!report.passed) {
        for (const auto& f : report.failures)
            std::cerr << "threshold failed: " << f << '\n';
        return 5;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "forge: directed random graphs with prescribed in/out degree "
        "distributions"};
    app.require_subcommand(1);
    int rc = 0;

    SampleOpts degrees_opts;
    auto* degrees = app.add_subcommand(
        "degrees", "Sample a matched bi-degree-sequence and write it out");
    add_sampler_flags(degrees, degrees_opts);
    degrees->callback([&] { rc = cmd_degrees(degrees_opts); });

    std::string check_path;
    std::string check_config;
    ConfigMerge check_merge;
    auto* check = app.add_subcommand(
        "check", "Decide whether a degree file is realizable as a simple "
                 "directed graph");
    auto* check_degrees_opt =
        check->add_option("--degrees", check_path, "Degree file to test");
    check->add_option("--config", check_config,
                      "Flat key=value file mirroring the long flag names");
    check_merge.add("degrees", check_degrees_opt,
                    [&](const std::string& v) { check_path = v; });
    check->callback([&] {
        if (!check_config.empty()) check_merge.apply(check_config);
        rc = cmd_check(check_path);
    });

    GenerateOpts generate_opts;
    auto* generate = app.add_subcommand(
        "generate", "Sample degrees and realize them as a graph");
    add_sampler_flags(generate, generate_opts);
    auto* model_opt =
        generate
            ->add_option("--model", generate_opts.model,
                         "repeated (uniform simple), erased (one pairing, "
                         "cleaned), or multigraph (raw pairing)")
            ->check(CLI::IsMember({"repeated", "erased", "multigraph"}))
            ->capture_default_str();
    auto* max_attempts_opt =
        generate
            ->add_option("--max-attempts", generate_opts.max_attempts,
                         "Pairing budget for the repeated model; 0 = automatic")
            ->check(CLI::NonNegativeNumber)
            ->capture_default_str();
    auto* resample_opt = generate->add_flag(
        "--resample-degrees", generate_opts.resample_degrees,
        "Redraw the degree sequence after every failed pairing (repeated "
        "model only)");
    generate_opts.merge.add("model", model_opt, [&](const std::string& v) {
        if (v != "repeated" && v != "erased" && v != "multigraph")
            throw forge::ConfigError(
                "model must be repeated, erased or multigraph");
        generate_opts.model = v;
    });
    generate_opts.merge.add(
        "max-attempts", max_attempts_opt, [&](const std::string& v) {
            generate_opts.max_attempts = to_i64(v);
            if (generate_opts.max_attempts < 0)
                throw forge::ConfigError("max-attempts must be nonnegative");
        });
    generate_opts.merge.add("resample-degrees", resample_opt,
                            [&](const std::string& v) {
                                generate_opts.resample_degrees = to_bool(v);
                            });
    generate->callback([&] { rc = cmd_generate(generate_opts); });

    ExperimentOpts experiment_opts;
    auto* experiment = app.add_subcommand(
        "experiment",
        "Monte Carlo validation of the simplicity probability limit");
    add_sampler_flags(experiment, experiment_opts);
    auto* reps_opt = experiment
                         ->add_option("--reps", experiment_opts.reps,
                                      "Number of replications (at least 1000)")
                         ->check(CLI::PositiveNumber);
    auto* jobs_opt =
        experiment
            ->add_option("--jobs", experiment_opts.jobs,
                         "Worker threads; results do not depend on this")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
    auto* timing_opt = experiment->add_flag(
        "--timing", experiment_opts.timing,
        "Record wall-clock runtime_seconds in the report (breaks "
        "byte-for-byte reproducibility of the artifact)");
    experiment_opts.merge.add("reps", reps_opt, [&](const std::string& v) {
        experiment_opts.reps = to_i64(v);
        if (experiment_opts.reps < 1)
            throw forge::ConfigError("reps must be positive");
    });
    experiment_opts.merge.add("jobs", jobs_opt, [&](const std::string& v) {
        experiment_opts.jobs = static_cast<int>(to_i64(v));
        if (experiment_opts.jobs < 1)
            throw forge::ConfigError("jobs must be positive");
    });
    experiment_opts.merge.add("timing", timing_opt,
                              [&](const std::string& v) {
                                  experiment_opts.timing = to_bool(v);
                              });
    experiment->callback([&] { rc = cmd_experiment(experiment_opts); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const forge::AttemptsExhausted& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const forge::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return rc;
}
