#include "forge/io.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

#include "forge/errors.hpp"

namespace forge {

namespace {

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "' for reading");
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open '" + path + "' for writing");
    return out;
}

void finish_output(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw ConfigError("failed writing '" + path + "'");
}

/// Strips comments, returns whitespace-split fields.
std::vector<std::string> data_fields(std::string line) {
    if (const auto hash = line.find('#'); hash != std::string::npos)
        line.erase(hash);
    std::istringstream split(line);
    std::vector<std::string> fields;
    std::string f;
    while (split >> f) fields.push_back(std::move(f));
    return fields;
}

std::int64_t parse_int(const std::string& text, const std::string& path,
                       std::size_t line_no) {
    try {
        std::size_t pos = 0;
        const std::int64_t v = std::stoll(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(path + ":" + std::to_string(line_no) +
                          ": expected an integer, got '" + text + "'");
    }
}

} // namespace

RawBiDegree load_degree_file(const std::string& path) {
    auto in = open_input(path);
    RawBiDegree raw;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto fields = data_fields(line);
        if (fields.empty()) continue;
        if (fields.size() != 2)
            throw ConfigError(path + ":" + std::to_string(line_no) +
                              ": expected two columns (in out), got " +
                              std::to_string(fields.size()));
        const std::int64_t d_in = parse_int(fields[0], path, line_no);
        const std::int64_t d_out = parse_int(fields[1], path, line_no);
        if (d_in < 0 || d_out < 0)
            throw ConfigError(path + ":" + std::to_string(line_no) +
                              ": degrees must be nonnegative");
        raw.in_degrees.push_back(d_in);
        raw.out_degrees.push_back(d_out);
    }
    return raw;
}

void write_degree_rows(std::ostream& out,
                       const std::vector<std::int64_t>& in_degrees,
                       const std::vector<std::int64_t>& out_degrees) {
    if (in_degrees.size() != out_degrees.size())
        throw ConfigError("degree lists have different lengths");
    out << "# in_degree\tout_degree\n";
    for (std::size_t i = 0; i < in_degrees.size(); ++i)
        out << in_degrees[i] << '\t' << out_degrees[i] << '\n';
}

void write_degree_file(const std::string& path,
                       const std::vector<std::int64_t>& in_degrees,
                       const std::vector<std::int64_t>& out_degrees) {
    auto out = open_output(path);
    write_degree_rows(out, in_degrees, out_degrees);
    finish_output(out, path);
}

BiDegreeSequence to_sequence(const RawBiDegree& raw) {
    if (raw.in_degrees.size() != raw.out_degrees.size())
        throw ConfigError("degree lists have different lengths");
    std::int64_t in_sum = 0, out_sum = 0;
    for (const auto d : raw.in_degrees) in_sum += d;
    for (const auto d : raw.out_degrees) out_sum += d;
    if (in_sum != out_sum)
        throw ConfigError("degree sums differ (in " + std::to_string(in_sum) +
                          ", out " + std::to_string(out_sum) + ")");
    return BiDegreeSequence{raw.in_degrees, raw.out_degrees, in_sum};
}

void write_multigraph_rows(std::ostream& out, const Multigraph& g) {
    out << "# nodes " << g.n << '\n';
    out << "# src\tdst\tmultiplicity\n";
    for (const auto& e : g.edges)
        out << e.src << '\t' << e.dst << '\t' << e.multiplicity << '\n';
}

void write_multigraph_file(const std::string& path, const Multigraph& g) {
    auto out = open_output(path);
    write_multigraph_rows(out, g);
    finish_output(out, path);
}

Multigraph load_multigraph_file(const std::string& path) {
    auto in = open_input(path);
    std::string line;
    std::size_t line_no = 0;
    std::int64_t declared_n = -1;
    std::vector<Multigraph::Edge> edges;
    while (std::getline(in, line)) {
        ++line_no;
        // The node-count header is a comment so that plain TSV consumers can
        // ignore it, but the loader wants it back.
        if (line.rfind("# nodes ", 0) == 0)
            declared_n = parse_int(line.substr(8), path, line_no);
        const auto fields = data_fields(line);
        if (fields.empty()) continue;
        if (fields.size() != 3)
            throw ConfigError(path + ":" + std::to_string(line_no) +
                              ": expected src dst multiplicity");
        Multigraph::Edge e;
        e.src = parse_int(fields[0], path, line_no);
        e.dst = parse_int(fields[1], path, line_no);
        e.multiplicity = parse_int(fields[2], path, line_no);
        if (e.src < 0 || e.dst < 0)
            throw ConfigError(path + ":" + std::to_string(line_no) +
                              ": node ids must be nonnegative");
        if (e.multiplicity < 1)
            throw ConfigError(path + ":" + std::to_string(line_no) +
                              ": multiplicity must be positive");
        edges.push_back(e);
    }

    std::sort(edges.begin(), edges.end(), [](const auto& a, const auto& b) {
        return std::tie(a.src, a.dst) < std::tie(b.src, b.dst);
    });
    Multigraph g;
    for (const auto& e : edges) {
        g.n = std::max({g.n, e.src + 1, e.dst + 1});
        g.total_edges += e.multiplicity;
        if (!g.edges.empty() && g.edges.back().src == e.src &&
            g.edges.back().dst == e.dst) {
            g.edges.back().multiplicity += e.multiplicity;
        } else {
            g.edges.push_back(e);
        }
    }
    if (declared_n >= 0) {
        if (declared_n < g.n)
            throw ConfigError(path + ": node count header " +
                              std::to_string(declared_n) +
                              " is smaller than the largest node id");
        g.n = declared_n;
    }
    for (const auto& e : g.edges) {
        if (e.src == e.dst) {
            g.self_loops += e.multiplicity;
        } else if (e.multiplicity >= 2) {
            g.multi_excess += e.multiplicity - 1;
            g.multi_pairs += e.multiplicity * (e.multiplicity - 1) / 2;
        }
    }
    return g;
}

void write_edge_rows(std::ostream& out, const SimpleDigraph& g) {
    out << "# nodes " << g.n << '\n';
    out << "# src\tdst\n";
    for (const auto& [src, dst] : g.edges) out << src << '\t' << dst << '\n';
}

void write_edge_file(const std::string& path, const SimpleDigraph& g) {
    auto out = open_output(path);
    write_edge_rows(out, g);
    finish_output(out, path);
}

nlohmann::json json_from_fit(const GoodnessOfFit& fit) {
    return {
        {"dof", fit.dof},
        {"p_value", fit.p_value},
        {"skip_reason", fit.skip_reason},
        {"skipped", fit.skipped},
        {"statistic", fit.statistic},
    };
}

nlohmann::json json_from_diagnostics(const SamplerDiagnostics& diag) {
    const char* side = "none";
    if (diag.incremented_side == IncrementSide::in_side) side = "in";
    if (diag.incremented_side == IncrementSide::out_side) side = "out";
    return {
        {"delta", diag.delta},
        {"incremented_nodes", diag.incremented_nodes},
        {"incremented_side", side},
        {"raw_in_sum", diag.raw_in_sum},
        {"raw_out_sum", diag.raw_out_sum},
        {"resamples_used", diag.resamples_used},
    };
}

nlohmann::json json_from_report(const ExperimentReport& report) {
    return {
        {"config",
         {
             {"in", report.in_spec},
             {"out", report.out_spec},
             {"seed", report.seed},
         }},
        {"n", report.n},
        {"reps", report.reps},
        {"empirical_p_simple", report.empirical_p_simple},
        {"ci_low", report.ci_low},
        {"ci_high", report.ci_high},
        {"theory_p_simple", report.theory_p_simple},
        {"lambda1_hat", report.lambda1_hat},
        {"lambda2_hat", report.lambda2_hat},
        {"lambda1_theory", report.lambda1_theory},
        {"lambda2_theory", report.lambda2_theory},
        {"s_mean", report.s_mean},
        {"m_mean", report.m_mean},
        {"s_fit", json_from_fit(report.s_fit)},
        {"m_fit", json_from_fit(report.m_fit)},
        {"independence", json_from_fit(report.independence)},
        {"passed", report.passed},
        {"failures", report.failures},
        {"runtime_seconds", report.runtime_seconds},
    };
}

nlohmann::json json_degree_histogram(const std::vector<std::int64_t>& degrees) {
    std::map<std::int64_t, std::int64_t> counts;
    for (const auto d : degrees) ++counts[d];
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& [value, count] : counts)
        rows.push_back({value, count});
    return rows;
}

void write_json_file(const std::string& path, const nlohmann::json& doc) {
    auto out = open_output(path);
    out << doc.dump(2) << '\n';
    finish_output(out, path);
}

} // namespace forge
