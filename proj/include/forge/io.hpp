#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "forge/bidegree.hpp"
#include "forge/config_model.hpp"
#include "forge/simplify.hpp"
#include "forge/stats.hpp"

namespace forge {

/// Degree lists as read from disk, before any consistency requirements.
struct RawBiDegree {
    std::vector<std::int64_t> in_degrees;
    std::vector<std::int64_t> out_degrees;
};

/// Degree file: one "in<TAB>out" pair per line, 0-indexed by row.  Blank
/// lines are skipped and '#' starts a comment anywhere on a line.
RawBiDegree load_degree_file(const std::string& path);
void write_degree_file(const std::string& path,
                       const std::vector<std::int64_t>& in_degrees,
                       const std::vector<std::int64_t>& out_degrees);

/// Stream variants used when the artifact goes to stdout instead of a
/// file.  The path writers above emit exactly these bytes.
void write_degree_rows(std::ostream& out,
                       const std::vector<std::int64_t>& in_degrees,
                       const std::vector<std::int64_t>& out_degrees);
void write_multigraph_rows(std::ostream& out, const Multigraph& g);
void write_edge_rows(std::ostream& out, const SimpleDigraph& g);

/// Checked promotion: the two sums must agree.
BiDegreeSequence to_sequence(const RawBiDegree& raw);

/// Multigraph file: "src<TAB>dst<TAB>multiplicity" rows, sorted by
/// (src, dst), plus '#' comments.  The loader accepts unsorted rows and
/// repeated pairs (multiplicities add up) and recomputes all counters.
void write_multigraph_file(const std::string& path, const Multigraph& g);
Multigraph load_multigraph_file(const std::string& path);

/// Simple-graph edge file: "src<TAB>dst" rows, sorted.
void write_edge_file(const std::string& path, const SimpleDigraph& g);

/// JSON building blocks for sidecar metadata.  Non-finite numbers come
/// out as JSON null.
nlohmann::json json_from_fit(const GoodnessOfFit& fit);
nlohmann::json json_from_diagnostics(const SamplerDiagnostics& diag);
nlohmann::json json_from_report(const ExperimentReport& report);
nlohmann::json json_degree_histogram(const std::vector<std::int64_t>& degrees);

/// Serialize with sorted keys, two-space indent and a trailing newline;
/// byte-identical output for equal documents.
void write_json_file(const std::string& path, const nlohmann::json& doc);

} // namespace forge
