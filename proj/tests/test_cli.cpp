#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <string>

#include "hintgen/audit.hpp"
#include "hintgen/detail/jsonl.hpp"
#include "hintgen/example_store.hpp"
#include "hintgen/pipeline.hpp"

#include "support/fixtures.hpp"

// Drives the installed binary end to end through every subcommand, checking
// outputs and the documented exit codes (0 ok, 2 usage/io, 3 backend).

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output; // stdout and stderr interleaved
};

RunResult run_cli(const std::string& args) {
    std::string cmd = std::string(HINTGEN_CLI) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult result;
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0)
        result.output.append(buf, n);
    int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::string q(const fixtures::fs::path& p) { return "\"" + p.string() + "\""; }

size_t count_lines(const std::string& text) {
    size_t lines = 0;
    for (char c : text)
        if (c == '\n')
            ++lines;
    return lines;
}

} // namespace

TEST_CASE("cli: no subcommand or bad flags exit with usage code") {
    REQUIRE(run_cli("").exit_code == 2);
    REQUIRE(run_cli("--bogus").exit_code == 2);
    REQUIRE(run_cli("audit").exit_code == 2);             // --corpus is required
    REQUIRE(run_cli("audit --corpus a --format pdf").exit_code == 2);
    REQUIRE(run_cli("--help").exit_code == 0);
    REQUIRE(run_cli("generate --help").exit_code == 0);
}

TEST_CASE("cli: audit prints the text report") {
    fixtures::TempDir tmp("cli-audit");
    fixtures::AuditFixture fx = fixtures::write_audit_fixture(tmp.path(), 8, 5);
    RunResult r = run_cli("audit --corpus " + q(fx.corpus_dir) + " --categories " +
                          q(fx.category_path));
    REQUIRE(r.exit_code == 0);
    REQUIRE_THAT(r.output, Catch::Matchers::ContainsSubstring(
                               "apps scanned: 8 (8 with text inputs)"));
    REQUIRE_THAT(r.output, Catch::Matchers::ContainsSubstring(
                               "apps missing at least one hint: 5 (62.5%)"));
    REQUIRE_THAT(r.output, Catch::Matchers::ContainsSubstring("finance"));
}

TEST_CASE("cli: audit writes a structured report that loads back") {
    fixtures::TempDir tmp("cli-audit-json");
    fixtures::AuditFixture fx = fixtures::write_audit_fixture(tmp.path(), 8, 5);
    fixtures::fs::path out = tmp.path() / "report.json";
    RunResult r = run_cli("audit --corpus " + q(fx.corpus_dir) + " --format structured" +
                          " --output " + q(out));
    REQUIRE(r.exit_code == 0);
    hintgen::audit::AuditReport report =
        hintgen::audit::load_report(fixtures::read_file(out));
    REQUIRE(report.apps_with_inputs == 8);
    REQUIRE(report.apps_with_any_missing == 5);
}

TEST_CASE("cli: audit on a missing corpus is an io error") {
    REQUIRE(run_cli("audit --corpus /no/such/dir").exit_code == 2);
}

TEST_CASE("cli: mine builds a store and stays idempotent") {
    fixtures::TempDir tmp("cli-mine");
    fixtures::MiningFixture fx = fixtures::write_mining_fixture(tmp.path());
    fixtures::fs::path store_path = tmp.path() / "store.jsonl";

    RunResult first = run_cli("mine --corpus " + q(fx.corpus_dir) + " --store " + q(store_path));
    REQUIRE(first.exit_code == 0);
    REQUIRE_THAT(first.output, Catch::Matchers::ContainsSubstring("mined 17 new records"));

    hintgen::ExampleStore store = hintgen::ExampleStore::load_file(store_path.string());
    REQUIRE(store.size() == fx.hinted);

    RunResult second = run_cli("mine --corpus " + q(fx.corpus_dir) + " --store " + q(store_path));
    REQUIRE(second.exit_code == 0);
    REQUIRE_THAT(second.output, Catch::Matchers::ContainsSubstring("mined 0 new records"));
}

TEST_CASE("cli: generate against the simulator passes every page") {
    fixtures::TempDir tmp("cli-gen");
    fixtures::GenerateFixture fx = fixtures::write_generate_fixture(tmp.path());
    fixtures::fs::path vectors = fixtures::write_toy_embeddings(tmp.path());
    fixtures::fs::path store_path = tmp.path() / "store.jsonl";
    fixtures::fs::path out_dir = tmp.path() / "out";

    RunResult r = run_cli("generate --corpus " + q(fx.corpus_dir) + " --store " + q(store_path) +
                          " --embeddings " + q(vectors) + " --mock " + q(fx.mock_path) +
                          " --sim " + q(fx.sim_path) + " --out " + q(out_dir));
    INFO(r.output);
    REQUIRE(r.exit_code == 0);
    REQUIRE_THAT(r.output, Catch::Matchers::ContainsSubstring("pages: 20"));
    REQUIRE_THAT(r.output, Catch::Matchers::ContainsSubstring("patches: 20"));
    REQUIRE_THAT(r.output,
                 Catch::Matchers::ContainsSubstring("pass: 20 fail: 0 unvalidated: 0"));

    std::ifstream patches_in(out_dir / "patches.jsonl");
    std::vector<hintgen::HintPatch> patches = hintgen::load_patches(patches_in);
    REQUIRE(patches.size() == 20);
    for (const hintgen::HintPatch& p : patches)
        REQUIRE(p.verdict == hintgen::Verdict::Pass);

    // Twenty validated hints feed back into the store.
    hintgen::ExampleStore store = hintgen::ExampleStore::load_file(store_path.string());
    REQUIRE(store.size() == 20);
    for (const hintgen::ExampleRecord& rec : store.records())
        REQUIRE(rec.origin == hintgen::ExampleOrigin::Runtime);

    REQUIRE(count_lines(fixtures::read_file(out_dir / "transcript.jsonl")) == 20);
}

TEST_CASE("cli: dry run marks patches unvalidated and needs no sim") {
    fixtures::TempDir tmp("cli-dry");
    fixtures::GenerateFixture fx = fixtures::write_generate_fixture(tmp.path());
    fixtures::fs::path vectors = fixtures::write_toy_embeddings(tmp.path());
    fixtures::fs::path out_dir = tmp.path() / "out";

    RunResult r = run_cli("generate --corpus " + q(fx.corpus_dir) + " --store " +
                          q(tmp.path() / "store.jsonl") + " --embeddings " + q(vectors) +
                          " --mock " + q(fx.mock_path) + " --dry-run --out " + q(out_dir));
    INFO(r.output);
    REQUIRE(r.exit_code == 0);
    REQUIRE_THAT(r.output,
                 Catch::Matchers::ContainsSubstring("pass: 0 fail: 0 unvalidated: 20"));

    std::ifstream patches_in(out_dir / "patches.jsonl");
    for (const hintgen::HintPatch& p : hintgen::load_patches(patches_in))
        REQUIRE(p.verdict == hintgen::Verdict::Unvalidated);
}

TEST_CASE("cli: generate flag pairs are mutually exclusive") {
    fixtures::TempDir tmp("cli-flags");
    fixtures::GenerateFixture fx = fixtures::write_generate_fixture(tmp.path());
    fixtures::fs::path vectors = fixtures::write_toy_embeddings(tmp.path());
    std::string base = "generate --corpus " + q(fx.corpus_dir) + " --store " +
                       q(tmp.path() / "s.jsonl") + " --embeddings " + q(vectors) + " --out " +
                       q(tmp.path() / "out");

    // Neither --mock nor --endpoint, then both.
    REQUIRE(run_cli(base + " --dry-run").exit_code == 2);
    REQUIRE(run_cli(base + " --dry-run --mock " + q(fx.mock_path) +
                    " --endpoint http://x/v1")
                .exit_code == 2);
    // Neither --sim nor --dry-run, then both.
    REQUIRE(run_cli(base + " --mock " + q(fx.mock_path)).exit_code == 2);
    REQUIRE(run_cli(base + " --mock " + q(fx.mock_path) + " --sim " + q(fx.sim_path) +
                    " --dry-run")
                .exit_code == 2);
}

TEST_CASE("cli: a prompt the mock cannot answer is a backend failure") {
    fixtures::TempDir tmp("cli-miss");
    fixtures::GenerateFixture fx = fixtures::write_generate_fixture(tmp.path());
    fixtures::fs::path vectors = fixtures::write_toy_embeddings(tmp.path());
    fixtures::fs::path bad_mock = tmp.path() / "bad_mock.jsonl";
    fixtures::write_file(bad_mock,
                         "{\"contains\":\"never in any prompt\",\"response\":\"x\"}\n");

    RunResult r = run_cli("generate --corpus " + q(fx.corpus_dir) + " --store " +
                          q(tmp.path() / "s.jsonl") + " --embeddings " + q(vectors) +
                          " --mock " + q(bad_mock) + " --dry-run --out " + q(tmp.path() / "out"));
    REQUIRE(r.exit_code == 3);
    REQUIRE_THAT(r.output, Catch::Matchers::ContainsSubstring("backend error"));
}

TEST_CASE("cli: evaluate scores line-aligned files") {
    fixtures::TempDir tmp("cli-eval");
    fixtures::write_file(tmp.path() / "cand.txt", "enter the city name\nenter your age\n");
    fixtures::write_file(tmp.path() / "ref.txt", "enter the city name\nenter your email\n");

    RunResult r = run_cli("evaluate --candidates " + q(tmp.path() / "cand.txt") +
                          " --references " + q(tmp.path() / "ref.txt"));
    REQUIRE(r.exit_code == 0);
    REQUIRE_THAT(r.output, Catch::Matchers::ContainsSubstring("pairs: 2"));
    REQUIRE_THAT(r.output, Catch::Matchers::ContainsSubstring("exact_match: 0.500000"));

    RunResult js = run_cli("evaluate --candidates " + q(tmp.path() / "cand.txt") +
                           " --references " + q(tmp.path() / "ref.txt") + " --json");
    REQUIRE(js.exit_code == 0);
    auto j = nlohmann::json::parse(js.output);
    REQUIRE(j["pairs"] == 2);
    REQUIRE(j["exact_match"] == 0.5);
}

TEST_CASE("cli: evaluate accepts jsonl pairs and rejects bad usage") {
    fixtures::TempDir tmp("cli-pairs");
    fixtures::write_file(tmp.path() / "pairs.jsonl",
                         "{\"candidate\":\"enter the city\",\"reference\":\"enter the city\"}\n");
    RunResult r = run_cli("evaluate --pairs " + q(tmp.path() / "pairs.jsonl"));
    REQUIRE(r.exit_code == 0);
    REQUIRE_THAT(r.output, Catch::Matchers::ContainsSubstring("exact_match: 1.000000"));

    // Mismatched line counts and missing inputs are usage errors.
    fixtures::write_file(tmp.path() / "one.txt", "a\n");
    fixtures::write_file(tmp.path() / "two.txt", "a\nb\n");
    REQUIRE(run_cli("evaluate --candidates " + q(tmp.path() / "one.txt") + " --references " +
                    q(tmp.path() / "two.txt"))
                .exit_code == 2);
    REQUIRE(run_cli("evaluate").exit_code == 2);
    REQUIRE(run_cli("evaluate --pairs " + q(tmp.path() / "pairs.jsonl") + " --candidates " +
                    q(tmp.path() / "one.txt") + " --references " + q(tmp.path() / "one.txt"))
                .exit_code == 2);
}

TEST_CASE("cli: simulate replays a trace and prints the final fingerprint") {
    fixtures::TempDir tmp("cli-sim");
    fixtures::FailingFirstFixture fx = fixtures::write_failing_first_fixture(tmp.path());
    fixtures::write_file(tmp.path() / "trace.jsonl",
                         "{\"field\":\"city_field\",\"text\":\"train\"}\n"
                         "{\"field\":\"city_field\",\"text\":\"Beijing\"}\n");

    RunResult r = run_cli("simulate --sim " + q(fx.sim_path) + " --trace " +
                          q(tmp.path() / "trace.jsonl"));
    REQUIRE(r.exit_code == 0);
    REQUIRE_THAT(r.output, Catch::Matchers::ContainsSubstring(
                               "step 1: city_field <- \"train\" -> fail"));
    REQUIRE_THAT(r.output, Catch::Matchers::ContainsSubstring(
                               "step 2: city_field <- \"Beijing\" -> pass"));
    REQUIRE_THAT(r.output, Catch::Matchers::ContainsSubstring("final fingerprint: "));

    fixtures::write_file(tmp.path() / "bad.jsonl", "{\"field\":\"nope\",\"text\":\"x\"}\n");
    RunResult bad = run_cli("simulate --sim " + q(fx.sim_path) + " --trace " +
                            q(tmp.path() / "bad.jsonl"));
    REQUIRE(bad.exit_code == 2);
    REQUIRE_THAT(bad.output, Catch::Matchers::ContainsSubstring("step 1"));
}

TEST_CASE("cli: parallel jobs produce the same patches as a single worker") {
    fixtures::TempDir tmp("cli-jobs");
    fixtures::GenerateFixture fx = fixtures::write_generate_fixture(tmp.path());
    fixtures::fs::path vectors = fixtures::write_toy_embeddings(tmp.path());

    auto run_with = [&](const std::string& tag, const std::string& jobs) {
        fixtures::fs::path out_dir = tmp.path() / tag;
        std::string store = q(tmp.path() / (tag + "-store.jsonl"));
        RunResult r = run_cli("generate --corpus " + q(fx.corpus_dir) + " --store " + store +
                              " --embeddings " + q(vectors) + " --mock " + q(fx.mock_path) +
                              " --sim " + q(fx.sim_path) + " --jobs " + jobs + " --out " +
                              q(out_dir));
        REQUIRE(r.exit_code == 0);
        return fixtures::read_file(out_dir / "patches.jsonl");
    };

    std::string serial = run_with("serial", "1");
    std::string parallel = run_with("parallel", "8");
    REQUIRE(serial == parallel);
    REQUIRE(count_lines(serial) == 20);
}
