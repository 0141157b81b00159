// Command-line front end: audit a corpus, mine a store, generate hints
// against the simulator (or dry-run), score results, and replay sim traces.
// Exit codes: 0 success, 2 usage or IO problem, 3 backend failure.

#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "hintgen/audit.hpp"
#include "hintgen/corpus.hpp"
#include "hintgen/metrics.hpp"
#include "hintgen/pipeline.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitBackend = 3;

void emit(const std::string& text, const std::string& output_path) {
    if (output_path.empty()) {
        std::cout << text;
        return;
    }
    auto out = hintgen::detail::open_for_write(output_path);
    out << text;
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const std::string& w : warnings)
        std::cerr << "warning: " << w << "\n";
}

struct AuditArgs {
    std::string corpus;
    std::string categories;
    std::string format = "text";
    std::string output;
};

int cmd_audit(const AuditArgs& args) {
    std::map<std::string, std::string> categories;
    if (!args.categories.empty())
        categories = hintgen::audit::load_category_map_file(args.categories);
    hintgen::audit::AuditReport report = hintgen::audit::scan_corpus(args.corpus, categories);
    auto format = args.format == "structured" ? hintgen::audit::ReportFormat::Structured
                                              : hintgen::audit::ReportFormat::Text;
    emit(hintgen::audit::render_report(report, format), args.output);
    return kExitOk;
}

struct MineArgs {
    std::string corpus;
    std::string store;
};

int cmd_mine(const MineArgs& args) {
    std::vector<std::string> warnings;
    hintgen::ExampleStore store;
    if (fs::exists(args.store))
        store = hintgen::ExampleStore::load_file(args.store, &warnings);

    std::vector<hintgen::CorpusPage> corpus = hintgen::load_corpus(args.corpus, &warnings);
    size_t added = 0;
    for (hintgen::ExampleRecord& record : hintgen::mine_examples(corpus))
        if (store.add(std::move(record)))
            ++added;
    store.save_file(args.store);
    print_warnings(warnings);
    std::cout << "mined " << added << " new records, store size " << store.size() << "\n";
    return kExitOk;
}

struct GenerateArgs {
    std::string corpus;
    std::string store;
    std::string embeddings;
    std::string mock;
    std::string endpoint;
    std::string model;
    std::string sim;
    std::string out_dir;
    std::string llm_trace;
    bool dry_run = false;
    bool no_feedback = false;
    int k = 6;
    int max_rounds = 3;
    unsigned jobs = 0; // 0: hardware concurrency
};

void write_transcripts(std::ostream& out, const std::vector<hintgen::RepairResult>& results) {
    for (const hintgen::RepairResult& page : results) {
        for (size_t i = 0; i < page.outcomes.size(); ++i) {
            const hintgen::HintOutcome& outcome = page.outcomes[i];
            const hintgen::HintPatch& patch = page.patches[i];
            for (const hintgen::RoundRecord& round : outcome.transcript) {
                hintgen::detail::ojson j;
                j["source"] = patch.source_path;
                j["node_path"] = patch.node_path;
                j["input_label"] = outcome.bundle.input.input_label;
                j["round"] = round.feedback.round;
                j["verdict"] = hintgen::to_string(round.feedback.verdict);
                j["failed_input"] = round.feedback.failed_input;
                if (round.feedback.error_message)
                    j["error_message"] = *round.feedback.error_message;
                j["prompt"] = round.prompt;
                j["response"] = round.raw_response;
                out << j.dump() << '\n';
            }
        }
    }
}

int cmd_generate(const GenerateArgs& args) {
    if (args.mock.empty() == args.endpoint.empty())
        throw hintgen::Error("exactly one of --mock or --endpoint is required");
    if (args.sim.empty() == !args.dry_run)
        throw hintgen::Error("exactly one of --sim or --dry-run is required");
    if (args.k < 0)
        throw hintgen::Error("--k must be >= 0");

    std::vector<std::string> warnings;
    hintgen::EmbeddingTable table = hintgen::EmbeddingTable::load_file(
        args.embeddings, hintgen::EmbeddingTable::kAutoDimension, &warnings);

    hintgen::ExampleStore master_store;
    if (fs::exists(args.store))
        master_store = hintgen::ExampleStore::load_file(args.store, &warnings);
    else
        warnings.push_back("store file missing, starting empty: " + args.store);

    hintgen::MockScript mock;
    hintgen::BackendConfig backend;
    if (!args.mock.empty()) {
        backend.kind = hintgen::BackendKind::ScriptedMock;
        mock = hintgen::MockScript::load_file(args.mock, &warnings);
    } else {
        backend.kind = hintgen::BackendKind::HttpChat;
        backend.endpoint = args.endpoint;
    }
    backend.model_name = args.model;
    backend.trace_path = args.llm_trace;
    hintgen::LlmGateway gateway(backend, std::move(mock));

    hintgen::sim::SimAppSpec sim_spec;
    if (!args.sim.empty())
        sim_spec = hintgen::sim::load_sim_app_file(args.sim);

    std::vector<hintgen::CorpusPage> pages = hintgen::load_corpus(args.corpus, &warnings);

    hintgen::GenerateOptions opts;
    opts.max_rounds = args.max_rounds;
    opts.use_icl = args.k > 0;
    opts.use_feedback = !args.no_feedback;
    if (args.k > 0)
        opts.retrieval.k = args.k;

    // Pages run in parallel. Every worker retrieves against the same store
    // snapshot and works on its own copy, so page order and job count cannot
    // change what any single page sees; runtime examples are merged in page
    // order afterwards.
    unsigned jobs = args.jobs ? args.jobs : std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min<unsigned>(jobs, pages.empty() ? 1 : static_cast<unsigned>(pages.size()));

    std::vector<hintgen::RepairResult> results(pages.size());
    std::vector<std::vector<std::string>> page_warnings(pages.size());
    std::atomic<size_t> next{0};
    std::mutex failure_mutex;
    std::exception_ptr failure;

    auto worker = [&]() {
        while (true) {
            size_t i = next.fetch_add(1);
            if (i >= pages.size())
                return;
            try {
                hintgen::ExampleStore local_store = master_store;
                std::unique_ptr<hintgen::sim::SimDeviceDriver> device;
                if (!args.sim.empty())
                    device = std::make_unique<hintgen::sim::SimDeviceDriver>(sim_spec);
                results[i] = hintgen::repair_page(pages[i].vh, pages[i].manifest, local_store,
                                                  table, gateway, device.get(), opts,
                                                  &page_warnings[i]);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> threads;
    for (unsigned t = 0; t < jobs; ++t)
        threads.emplace_back(worker);
    for (std::thread& t : threads)
        t.join();
    if (failure)
        std::rethrow_exception(failure);

    size_t pass = 0, fail = 0, unvalidated = 0;
    std::vector<hintgen::HintPatch> patches;
    for (size_t i = 0; i < results.size(); ++i) {
        for (const std::string& w : page_warnings[i])
            warnings.push_back(w);
        for (const hintgen::HintOutcome& outcome : results[i].outcomes) {
            switch (outcome.verdict.verdict) {
            case hintgen::Verdict::Pass:
                ++pass;
                master_store.add(hintgen::runtime_example_from(outcome));
                break;
            case hintgen::Verdict::FailNoTransition: ++fail; break;
            case hintgen::Verdict::Unvalidated: ++unvalidated; break;
            }
        }
        for (const hintgen::HintPatch& p : results[i].patches)
            patches.push_back(p);
    }

    fs::create_directories(args.out_dir);
    {
        auto out = hintgen::detail::open_for_write((fs::path(args.out_dir) / "patches.jsonl").string());
        hintgen::write_patches(out, patches);
    }
    {
        auto out =
            hintgen::detail::open_for_write((fs::path(args.out_dir) / "transcript.jsonl").string());
        write_transcripts(out, results);
    }
    master_store.save_file(args.store);

    print_warnings(warnings);
    std::cout << "pages: " << pages.size() << "\n"
              << "patches: " << patches.size() << "\n"
              << "pass: " << pass << " fail: " << fail << " unvalidated: " << unvalidated << "\n";
    return kExitOk;
}

struct EvaluateArgs {
    std::string pairs;
    std::string candidates;
    std::string references;
    std::string output;
    bool json = false;
};

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw hintgen::Error("cannot open file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

int cmd_evaluate(const EvaluateArgs& args) {
    bool has_pairs = !args.pairs.empty();
    bool has_split = !args.candidates.empty() && !args.references.empty();
    if (has_pairs == has_split)
        throw hintgen::Error("provide either --pairs or both --candidates and --references");

    std::vector<std::string> candidates, references;
    if (has_pairs) {
        std::ifstream in(args.pairs, std::ios::binary);
        if (!in)
            throw hintgen::Error("cannot open pairs file: " + args.pairs);
        hintgen::detail::for_each_jsonl(in, [&](size_t line_no, const hintgen::detail::ojson& j) {
            if (!j.contains("candidate") || !j.contains("reference"))
                throw hintgen::Error("pairs line " + std::to_string(line_no) +
                                     ": needs candidate and reference");
            candidates.push_back(j.at("candidate").get<std::string>());
            references.push_back(j.at("reference").get<std::string>());
        });
    } else {
        candidates = read_lines(args.candidates);
        references = read_lines(args.references);
    }

    hintgen::metrics::MetricReport report = hintgen::metrics::evaluate_corpus(candidates, references);

    std::string text;
    if (args.json) {
        hintgen::detail::ojson j;
        j["pairs"] = report.pair_count();
        j["exact_match"] = report.exact_match;
        j["bleu1"] = report.bleu[0];
        j["bleu2"] = report.bleu[1];
        j["bleu3"] = report.bleu[2];
        j["bleu4"] = report.bleu[3];
        j["meteor"] = report.meteor;
        j["rouge_l"] = report.rouge_l;
        j["cider"] = report.cider;
        text = j.dump(2) + "\n";
    } else {
        char buf[512];
        std::snprintf(buf, sizeof(buf),
                      "pairs: %zu\nexact_match: %.6f\nbleu1: %.6f\nbleu2: %.6f\nbleu3: %.6f\n"
                      "bleu4: %.6f\nmeteor: %.6f\nrouge_l: %.6f\ncider: %.6f\n",
                      report.pair_count(), report.exact_match, report.bleu[0], report.bleu[1],
                      report.bleu[2], report.bleu[3], report.meteor, report.rouge_l, report.cider);
        text = buf;
    }
    emit(text, args.output);
    return kExitOk;
}

struct SimulateArgs {
    std::string sim;
    std::string trace;
};

int cmd_simulate(const SimulateArgs& args) {
    hintgen::sim::SimAppSpec spec = hintgen::sim::load_sim_app_file(args.sim);
    hintgen::sim::SimDevice device(spec);

    struct Step {
        std::string field;
        std::string text;
    };
    std::vector<Step> steps;
    {
        std::ifstream in(args.trace, std::ios::binary);
        if (!in)
            throw hintgen::Error("cannot open trace: " + args.trace);
        hintgen::detail::for_each_jsonl(in, [&](size_t line_no, const hintgen::detail::ojson& j) {
            if (!j.contains("field") || !j.contains("text"))
                throw hintgen::Error("trace line " + std::to_string(line_no) +
                                     ": needs field and text");
            steps.push_back({j.at("field").get<std::string>(), j.at("text").get<std::string>()});
        });
    }

    for (size_t i = 0; i < steps.size(); ++i) {
        bool accepted;
        try {
            accepted = device.inject_and_submit(steps[i].field, steps[i].text);
        } catch (const hintgen::UnknownField& e) {
            std::cerr << "step " << (i + 1) << ": " << e.what() << "\n";
            return kExitUsage;
        }
        std::cout << "step " << (i + 1) << ": " << steps[i].field << " <- \"" << steps[i].text
                  << "\" -> " << (accepted ? "pass" : "fail") << "\n";
    }
    std::cout << "final fingerprint: " << hintgen::fingerprint(device.render()) << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hint-text tooling: audit, mine, generate, evaluate, simulate"};
    app.require_subcommand(1);

    AuditArgs audit_args;
    CLI::App* audit = app.add_subcommand("audit", "scan a dump corpus for missing hint text");
    audit->add_option("--corpus", audit_args.corpus, "corpus root directory")->required();
    audit->add_option("--categories", audit_args.categories, "two-column app-to-category file");
    audit->add_option("--format", audit_args.format, "text or structured")
        ->check(CLI::IsMember({"text", "structured"}));
    audit->add_option("--output", audit_args.output, "write report here instead of stdout");

    MineArgs mine_args;
    CLI::App* mine = app.add_subcommand("mine", "harvest hinted inputs into an example store");
    mine->add_option("--corpus", mine_args.corpus, "corpus root directory")->required();
    mine->add_option("--store", mine_args.store, "example store file (extended if present)")
        ->required();

    GenerateArgs gen_args;
    CLI::App* gen = app.add_subcommand("generate", "generate hints for hint-missing inputs");
    gen->add_option("--corpus", gen_args.corpus, "corpus root directory")->required();
    gen->add_option("--store", gen_args.store, "example store file")->required();
    gen->add_option("--embeddings", gen_args.embeddings, "word embedding table")->required();
    gen->add_option("--mock", gen_args.mock, "scripted mock backend (JSONL rules)");
    gen->add_option("--endpoint", gen_args.endpoint, "chat-completions endpoint URL");
    gen->add_option("--model", gen_args.model, "model name sent to the endpoint");
    gen->add_option("--sim", gen_args.sim, "sim app spec used to validate inputs");
    gen->add_flag("--dry-run", gen_args.dry_run, "skip validation, mark patches unvalidated");
    gen->add_flag("--no-feedback", gen_args.no_feedback, "stop after round 1 on failure");
    gen->add_option("--k", gen_args.k, "in-context examples per prompt, 0 disables");
    gen->add_option("--max-rounds", gen_args.max_rounds, "feedback round budget");
    gen->add_option("--jobs", gen_args.jobs, "parallel page workers, default all cores");
    gen->add_option("--out", gen_args.out_dir, "output directory for patches and transcript")
        ->required();
    gen->add_option("--llm-trace", gen_args.llm_trace, "JSONL log of backend traffic");

    EvaluateArgs eval_args;
    CLI::App* eval = app.add_subcommand("evaluate", "score candidate hints against references");
    eval->add_option("--pairs", eval_args.pairs, "JSONL lines with candidate and reference");
    eval->add_option("--candidates", eval_args.candidates, "text file, one candidate per line");
    eval->add_option("--references", eval_args.references, "text file, one reference per line");
    eval->add_flag("--json", eval_args.json, "emit the report as JSON");
    eval->add_option("--output", eval_args.output, "write report here instead of stdout");

    SimulateArgs sim_args;
    CLI::App* sim = app.add_subcommand("simulate", "replay an input trace against a sim app");
    sim->add_option("--sim", sim_args.sim, "sim app spec")->required();
    sim->add_option("--trace", sim_args.trace, "JSONL trace of field/text steps")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (audit->parsed())
            return cmd_audit(audit_args);
        if (mine->parsed())
            return cmd_mine(mine_args);
        if (gen->parsed())
            return cmd_generate(gen_args);
        if (eval->parsed())
            return cmd_evaluate(eval_args);
        if (sim->parsed())
            return cmd_simulate(sim_args);
    } catch (const hintgen::BackendFailure& e) {
        std::cerr << "backend error: " << e.what() << "\n";
        return kExitBackend;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
