#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "forge/config_model.hpp"
#include "forge/errors.hpp"
#include "forge/io.hpp"
#include "forge/simplify.hpp"

namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "forge_io_tests";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void spit(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out.good());
    out << content;
}

forge::Multigraph sample_multigraph() {
    forge::Multigraph g;
    g.n = 3;
    g.edges = {{0, 0, 2}, {0, 1, 3}, {2, 1, 1}};
    g.total_edges = 6;
    g.self_loops = 2;
    g.multi_excess = 2;
    g.multi_pairs = 3;
    return g;
}

} // namespace

TEST_CASE("degree file round trip and exact bytes") {
    const auto path = temp_file("degrees.tsv");
    forge::write_degree_file(path.string(), {1, 0}, {2, 3});
    CHECK(slurp(path) == "# in_degree\tout_degree\n1\t2\n0\t3\n");

    const auto raw = forge::load_degree_file(path.string());
    CHECK(raw.in_degrees == std::vector<std::int64_t>{1, 0});
    CHECK(raw.out_degrees == std::vector<std::int64_t>{2, 3});

    std::ostringstream stream;
    forge::write_degree_rows(stream, {1, 0}, {2, 3});
    CHECK(stream.str() == slurp(path));

    CHECK_THROWS_AS(forge::write_degree_file(path.string(), {1}, {1, 2}),
                    forge::ConfigError);
}

TEST_CASE("degree loader skips comments and flags bad rows") {
    const auto path = temp_file("degrees_comments.tsv");
    spit(path, "# header\n\n1\t2  # trailing note\n   \n0 0\n");
    const auto raw = forge::load_degree_file(path.string());
    CHECK(raw.in_degrees == std::vector<std::int64_t>{1, 0});
    CHECK(raw.out_degrees == std::vector<std::int64_t>{2, 0});

    spit(path, "1\t2\n3\n");
    try {
        forge::load_degree_file(path.string());
        FAIL("expected ConfigError");
    } catch (const forge::ConfigError& e) {
        const std::string message = e.what();
        CHECK(message.find(":2") != std::string::npos);
        CHECK(message.find("two columns") != std::string::npos);
    }

    spit(path, "1\t-2\n");
    CHECK_THROWS_AS(forge::load_degree_file(path.string()),
                    forge::ConfigError);
    spit(path, "1\ttwo\n");
    CHECK_THROWS_AS(forge::load_degree_file(path.string()),
                    forge::ConfigError);
    CHECK_THROWS_AS(forge::load_degree_file("/nonexistent/degrees.tsv"),
                    forge::ConfigError);
}

TEST_CASE("raw degrees promote only when the sums agree") {
    forge::RawBiDegree raw;
    raw.in_degrees = {2, 1};
    raw.out_degrees = {0, 3};
    const auto seq = forge::to_sequence(raw);
    CHECK(seq.total == 3);
    CHECK(seq.in_degrees == raw.in_degrees);

    raw.out_degrees = {0, 2};
    try {
        forge::to_sequence(raw);
        FAIL("expected ConfigError");
    } catch (const forge::ConfigError& e) {
        CHECK(std::string(e.what()).find("degree sums differ") !=
              std::string::npos);
    }

    raw.out_degrees = {3};
    CHECK_THROWS_AS(forge::to_sequence(raw), forge::ConfigError);
}

TEST_CASE("multigraph file round trip recomputes every counter") {
    const auto g = sample_multigraph();
    const auto path = temp_file("multigraph.tsv");
    forge::write_multigraph_file(path.string(), g);
    CHECK(slurp(path) ==
          "# nodes 3\n# src\tdst\tmultiplicity\n0\t0\t2\n0\t1\t3\n2\t1\t1\n");

    std::ostringstream stream;
    forge::write_multigraph_rows(stream, g);
    CHECK(stream.str() == slurp(path));

    const auto loaded = forge::load_multigraph_file(path.string());
    CHECK(loaded.n == 3);
    CHECK(loaded.total_edges == 6);
    CHECK(loaded.self_loops == 2);
    CHECK(loaded.multi_excess == 2);
    CHECK(loaded.multi_pairs == 3);
    REQUIRE(loaded.edges.size() == 3);
    CHECK(loaded.edges[1].src == 0);
    CHECK(loaded.edges[1].dst == 1);
    CHECK(loaded.edges[1].multiplicity == 3);
}

TEST_CASE("multigraph loader sorts, merges and validates") {
    const auto path = temp_file("multigraph_messy.tsv");
    spit(path, "1 0 1\n0 1 2\n# a comment\n0 1 1\n");
    const auto g = forge::load_multigraph_file(path.string());
    CHECK(g.n == 2); // no header: largest node id decides
    REQUIRE(g.edges.size() == 2);
    CHECK(g.edges[0].src == 0);
    CHECK(g.edges[0].multiplicity == 3);
    CHECK(g.edges[1].src == 1);
    CHECK(g.total_edges == 4);
    CHECK(g.multi_excess == 2);
    CHECK(g.multi_pairs == 3);

    spit(path, "# nodes 5\n0\t1\t1\n");
    CHECK(forge::load_multigraph_file(path.string()).n == 5);

    spit(path, "# nodes 1\n0\t1\t1\n");
    CHECK_THROWS_AS(forge::load_multigraph_file(path.string()),
                    forge::ConfigError);
    spit(path, "0\t1\t0\n");
    CHECK_THROWS_AS(forge::load_multigraph_file(path.string()),
                    forge::ConfigError);
    spit(path, "0\t1\n");
    CHECK_THROWS_AS(forge::load_multigraph_file(path.string()),
                    forge::ConfigError);
    spit(path, "-1\t1\t1\n");
    CHECK_THROWS_AS(forge::load_multigraph_file(path.string()),
                    forge::ConfigError);
}

TEST_CASE("edge file bytes for a small simple graph") {
    forge::SimpleDigraph g;
    g.n = 2;
    g.edges = {{0, 1}, {1, 0}};
    g.in_degrees = {1, 1};
    g.out_degrees = {1, 1};
    const auto path = temp_file("edges.tsv");
    forge::write_edge_file(path.string(), g);
    CHECK(slurp(path) == "# nodes 2\n# src\tdst\n0\t1\n1\t0\n");

    std::ostringstream stream;
    forge::write_edge_rows(stream, g);
    CHECK(stream.str() == slurp(path));
}

TEST_CASE("fit serialization carries all fields") {
    forge::GoodnessOfFit fit;
    fit.statistic = 3.5;
    fit.dof = 4;
    fit.p_value = 0.25;
    const auto doc = forge::json_from_fit(fit);
    CHECK(doc["statistic"] == 3.5);
    CHECK(doc["dof"] == 4);
    CHECK(doc["p_value"] == 0.25);
    CHECK(doc["skipped"] == false);
    CHECK(doc["skip_reason"] == "");
}

TEST_CASE("diagnostics serialization names the incremented side") {
    forge::SamplerDiagnostics diag;
    diag.raw_in_sum = 10;
    diag.raw_out_sum = 8;
    diag.delta = 2;
    diag.resamples_used = 1;
    diag.incremented_nodes = {0, 4};
    diag.incremented_side = forge::IncrementSide::out_side;
    const auto doc = forge::json_from_diagnostics(diag);
    CHECK(doc["incremented_side"] == "out");
    CHECK(doc["incremented_nodes"] == nlohmann::json({0, 4}));
    CHECK(doc["delta"] == 2);
    CHECK(doc["resamples_used"] == 1);

    diag.incremented_side = forge::IncrementSide::none;
    CHECK(forge::json_from_diagnostics(diag)["incremented_side"] == "none");
}

TEST_CASE("experiment report serialization") {
    forge::ExperimentReport report;
    report.in_spec = "poisson:2";
    report.out_spec = "poisson:2";
    report.n = 100;
    report.reps = 1000;
    report.seed = 7;
    report.empirical_p_simple = 0.02;
    report.theory_p_simple = 0.0183;
    report.passed = true;
    const auto doc = forge::json_from_report(report);
    CHECK(doc["config"]["in"] == "poisson:2");
    CHECK(doc["config"]["seed"] == 7);
    CHECK(doc["n"] == 100);
    CHECK(doc["empirical_p_simple"] == 0.02);
    CHECK(doc["passed"] == true);
    CHECK(doc["failures"] == nlohmann::json::array());
    CHECK(doc["s_fit"].contains("p_value"));
    // per-replicate sample vectors stay out of the serialized report
    CHECK(!doc.contains("s_samples"));

    report.lambda1_hat = std::numeric_limits<double>::quiet_NaN();
    const auto with_nan = forge::json_from_report(report).dump();
    CHECK(with_nan.find("\"lambda1_hat\":null") != std::string::npos);
}

TEST_CASE("degree histogram is sorted value count pairs") {
    const auto doc = forge::json_degree_histogram({2, 0, 2, 5});
    REQUIRE(doc.is_array());
    REQUIRE(doc.size() == 3);
    CHECK(doc[0] == nlohmann::json({0, 1}));
    CHECK(doc[1] == nlohmann::json({2, 2}));
    CHECK(doc[2] == nlohmann::json({5, 1}));
    CHECK(forge::json_degree_histogram({}) == nlohmann::json::array());
}

TEST_CASE("json files are stable and end with a newline") {
    const nlohmann::json doc = {{"b", 1}, {"a", {{"nested", true}}}};
    const auto path1 = temp_file("doc1.json");
    const auto path2 = temp_file("doc2.json");
    forge::write_json_file(path1.string(), doc);
    forge::write_json_file(path2.string(), doc);
    const auto bytes = slurp(path1);
    CHECK(bytes == slurp(path2));
    CHECK(!bytes.empty());
    CHECK(bytes.back() == '\n');
    CHECK(nlohmann::json::parse(bytes) == doc);

    CHECK_THROWS_AS(forge::write_json_file("/nonexistent/dir/doc.json", doc),
                    forge::ConfigError);
}
