#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "hintgen/detail/jsonl.hpp"
#include "hintgen/entities.hpp"
#include "hintgen/example_store.hpp"
#include "hintgen/feedback.hpp"
#include "hintgen/llm.hpp"
#include "hintgen/prompt.hpp"
#include "hintgen/sim.hpp"
#include "hintgen/vh.hpp"

// The per-input generation loop: prompt, complete, inject the produced
// input content, judge the page reaction, and either stop or feed the error
// back for another round. Rounds are capped, and the whole loop spends at
// most max_rounds + 1 backend calls (the +1 is the single format reminder).

namespace hintgen {

struct GenerateOptions {
    int max_rounds = 3;
    bool use_icl = true;      // select in-context examples for round 1
    bool use_feedback = true; // re-query with error feedback after a failure
    RetrievalConfig retrieval{};
    std::chrono::milliseconds settle_timeout{2000};
};

struct RoundRecord {
    std::string prompt;
    std::string raw_response;
    FeedbackRecord feedback;
};

struct HintOutcome {
    GuiEntityBundle bundle;
    HintResult result;          // from the final round
    FeedbackRecord verdict;     // final round's judgement
    int rounds_used = 0;
    std::vector<RoundRecord> transcript; // one entry per round used
};

// The runtime example a Pass contributes back to the store.
inline ExampleRecord runtime_example_from(const HintOutcome& outcome) {
    ExampleRecord r;
    r.input_label = outcome.bundle.input.input_label;
    r.nearby_labels = outcome.bundle.input.nearby_labels;
    r.activity_name = outcome.bundle.page.activity_name;
    r.app_name = outcome.bundle.app.app_name;
    r.hint_text = outcome.result.hint_text;
    r.origin = ExampleOrigin::Runtime;
    r.record_id = make_record_id(r);
    return r;
}

// Finds the device field whose rendered label matches the bundle's input;
// the field id is the resource id's short form.
inline std::string resolve_device_field(const ViewHierarchy& page,
                                        const std::string& input_label) {
    for (const NodePath& path : find_text_inputs(page)) {
        const UiNode* node = resolve_path(page, path);
        if (node && display_label(*node) == input_label) {
            size_t slash = node->resource_id.rfind('/');
            return slash == std::string::npos ? node->resource_id
                                              : node->resource_id.substr(slash + 1);
        }
    }
    throw UnknownField("device page has no text input labelled '" + input_label + "'");
}

// One hint for one input. With a device attached each round is validated by
// injecting the generated input content and watching for a transition; a
// null device yields a single Unvalidated round. On Pass the outcome is
// recorded into the store as a runtime example.
inline HintOutcome generate_hint(const GuiEntityBundle& bundle, ExampleStore& store,
                                 const EmbeddingTable& table, LlmGateway& gateway,
                                 sim::DeviceDriver* device, const GenerateOptions& opts = {},
                                 std::vector<std::string>* warnings = nullptr) {
    if (opts.max_rounds < 1)
        throw Error("max_rounds must be >= 1");

    std::vector<ExampleRecord> examples;
    if (opts.use_icl)
        examples = select_examples(bundle, store, table, opts.retrieval, warnings);

    HintOutcome outcome;
    outcome.bundle = bundle;

    PromptDocument doc = make_generation_document(bundle, examples);
    bool reminder_spent = false;

    for (int round = 1; round <= opts.max_rounds; ++round) {
        std::string prompt = render(doc);
        bool reminder_used = false;
        HintResult result = gateway.request_hint(prompt, !reminder_spent, &reminder_used);
        reminder_spent = reminder_spent || reminder_used;

        FeedbackRecord fb;
        fb.round = round;

        if (!device) {
            fb.verdict = Verdict::Unvalidated;
            outcome.result = result;
            outcome.verdict = fb;
            outcome.rounds_used = round;
            outcome.transcript.push_back({std::move(prompt), result.raw_response, fb});
            return outcome;
        }

        ViewHierarchy before = device->current_page();
        std::string field_id = resolve_device_field(before, bundle.input.input_label);
        device->inject_and_submit(field_id, result.input_content, opts.settle_timeout);
        ViewHierarchy after = device->current_page();

        if (sim::detect_transition(before, after)) {
            fb.verdict = Verdict::Pass;
            outcome.result = result;
            outcome.verdict = fb;
            outcome.rounds_used = round;
            outcome.transcript.push_back({std::move(prompt), result.raw_response, fb});
            store.add(runtime_example_from(outcome)); // false on content dup is fine
            return outcome;
        }

        fb.verdict = Verdict::FailNoTransition;
        fb.failed_input = result.input_content;
        fb.error_message = sim::diff_error_message(before, after);
        outcome.result = result;
        outcome.verdict = fb;
        outcome.rounds_used = round;
        outcome.transcript.push_back({std::move(prompt), result.raw_response, fb});

        if (!opts.use_feedback || round == opts.max_rounds)
            return outcome; // flagged Fail, but the last hint is still worth emitting

        doc = make_feedback_document(bundle, fb);
    }
    return outcome; // unreachable; the loop always returns
}

struct HintPatch {
    std::string source_path; // the dump the page came from
    NodePath node_path;
    std::string hint_text;
    Verdict verdict = Verdict::Unvalidated;

    bool operator==(const HintPatch&) const = default;
};

struct RepairResult {
    std::vector<HintPatch> patches;    // one per hint-missing input, page order
    std::vector<HintOutcome> outcomes; // parallel to patches
};

// Runs the loop over every hint-missing input of a page. Inputs that
// already carry a hint are left alone. With a device, each input starts
// from a fresh reset to the page's activity so an earlier Pass cannot strand
// the device on a later screen.
inline RepairResult repair_page(const ViewHierarchy& vh, const AppManifest& manifest,
                                ExampleStore& store, const EmbeddingTable& table,
                                LlmGateway& gateway, sim::DeviceDriver* device,
                                const GenerateOptions& opts = {},
                                std::vector<std::string>* warnings = nullptr) {
    RepairResult result;
    AppInfo app = app_info_from(manifest);
    PageInfo page = extract_page_info(vh);

    for (const NodePath& path : find_text_inputs(vh)) {
        const UiNode* node = resolve_path(vh, path);
        if (!node || has_hint(*node))
            continue;
        GuiEntityBundle b = bundle(app, page, extract_input_info(vh, path));
        if (warnings)
            for (const std::string& w : b.warnings)
                warnings->push_back(w);
        if (device)
            device->reset_to(vh.activity_name);
        HintOutcome outcome = generate_hint(b, store, table, gateway, device, opts, warnings);
        result.patches.push_back(
            {vh.source_path, path, outcome.result.hint_text, outcome.verdict.verdict});
        result.outcomes.push_back(std::move(outcome));
    }
    return result;
}

// Patch files are JSONL so downstream tooling can stream them.
inline void write_patches(std::ostream& out, const std::vector<HintPatch>& patches) {
    for (const HintPatch& p : patches) {
        detail::ojson j;
        j["source"] = p.source_path;
        j["node_path"] = p.node_path;
        j["hint"] = p.hint_text;
        j["verdict"] = to_string(p.verdict);
        out << j.dump() << '\n';
    }
}

inline std::vector<HintPatch> load_patches(std::istream& in,
                                           std::vector<std::string>* warnings = nullptr) {
    std::vector<HintPatch> patches;
    detail::for_each_jsonl(
        in,
        [&](size_t line_no, const detail::ojson& j) {
            try {
                HintPatch p;
                p.source_path = j.at("source").get<std::string>();
                p.node_path = j.at("node_path").get<NodePath>();
                p.hint_text = j.at("hint").get<std::string>();
                std::string v = j.at("verdict").get<std::string>();
                p.verdict = v == "pass" ? Verdict::Pass
                            : v == "fail" ? Verdict::FailNoTransition
                                          : Verdict::Unvalidated;
                patches.push_back(std::move(p));
            } catch (const std::exception& e) {
                if (warnings)
                    warnings->push_back("line " + std::to_string(line_no) + ": " + e.what() +
                                        ", skipped");
            }
        },
        warnings);
    return patches;
}

} // namespace hintgen
