#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "hintgen/detail/jsonl.hpp"
#include "hintgen/detail/text.hpp"
#include "hintgen/embedding.hpp"
#include "hintgen/entities.hpp"
#include "hintgen/errors.hpp"

// Retrievable (GUI-info, hint-text) example records and the top-K selection
// used to build in-context prompts. Lookup is an exhaustive cosine scan,
// which is plenty at desk scale. Reads may run concurrently; anything that
// mutates a store needs exclusive access from the caller.

namespace hintgen {

enum class ExampleOrigin { Mined, Runtime };

inline const char* to_string(ExampleOrigin origin) {
    return origin == ExampleOrigin::Mined ? "mined" : "runtime";
}

struct ExampleRecord {
    std::string record_id;
    std::string input_label;
    std::vector<std::string> nearby_labels;
    std::string activity_name;
    std::string app_name;
    std::string hint_text; // non-empty
    ExampleOrigin origin = ExampleOrigin::Mined;

    bool operator==(const ExampleRecord&) const = default;
};

struct RetrievalConfig {
    int k = 6; // tie-break is fixed: score descending, then record_id ascending
};

// The text that gets embedded, for queries and records alike: the input's
// own label followed by its nearby labels.
inline std::string example_query_text(const std::string& input_label,
                                      const std::vector<std::string>& nearby_labels) {
    std::string out = input_label;
    for (const std::string& label : nearby_labels) {
        if (!out.empty())
            out.push_back(' ');
        out += label;
    }
    return out;
}

namespace detail {

inline std::string record_content_key(const ExampleRecord& r) {
    std::string key = r.input_label;
    for (const std::string& label : r.nearby_labels) {
        key.push_back('\x1f');
        key += label;
    }
    key.push_back('\x1e');
    key += r.hint_text;
    return key;
}

} // namespace detail

class ExampleStore {
public:
    size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }
    const std::vector<ExampleRecord>& records() const { return records_; }

    // Appends unless a record with identical (input_label, nearby_labels,
    // hint_text) already exists; returns false on such a content duplicate.
    // Same id with different content is an error. Never removes or mutates
    // existing records.
    bool add(ExampleRecord record) {
        if (hintgen::detail::trim_view(record.hint_text).empty())
            throw Error("example record '" + record.record_id + "' has empty hint text");
        std::string content_key = detail::record_content_key(record);
        if (content_keys_.count(content_key))
            return false;
        if (ids_.count(record.record_id))
            throw DuplicateId("record id already in store: " + record.record_id);
        ids_.insert(record.record_id);
        content_keys_.insert(std::move(content_key));
        records_.push_back(std::move(record));
        return true;
    }

    // One record per line, stable field order; load(save(s)) == s. Corrupt
    // lines are reported with their line number and skipped.
    void save(std::ostream& out) const {
        for (const ExampleRecord& r : records_) {
            hintgen::detail::ojson j;
            j["id"] = r.record_id;
            j["input"] = r.input_label;
            j["nearby"] = r.nearby_labels;
            j["activity"] = r.activity_name;
            j["app"] = r.app_name;
            j["hint"] = r.hint_text;
            j["origin"] = to_string(r.origin);
            out << j.dump() << '\n';
        }
    }

    void save_file(const std::string& path) const {
        auto out = hintgen::detail::open_for_write(path);
        save(out);
    }

    static ExampleStore load(std::istream& in, std::vector<std::string>* warnings = nullptr) {
        ExampleStore store;
        hintgen::detail::for_each_jsonl(
            in,
            [&](size_t line_no, const hintgen::detail::ojson& j) {
                try {
                    ExampleRecord r;
                    r.record_id = j.at("id").get<std::string>();
                    r.input_label = j.at("input").get<std::string>();
                    r.nearby_labels = j.at("nearby").get<std::vector<std::string>>();
                    r.activity_name = j.at("activity").get<std::string>();
                    r.app_name = j.at("app").get<std::string>();
                    r.hint_text = j.at("hint").get<std::string>();
                    r.origin = j.at("origin").get<std::string>() == "runtime"
                                   ? ExampleOrigin::Runtime
                                   : ExampleOrigin::Mined;
                    store.add(std::move(r));
                } catch (const std::exception& e) {
                    if (warnings)
                        warnings->push_back("line " + std::to_string(line_no) + ": " + e.what() +
                                            ", skipped");
                }
            },
            warnings);
        return store;
    }

    static ExampleStore load_file(const std::string& path,
                                  std::vector<std::string>* warnings = nullptr) {
        std::ifstream in(path);
        if (!in)
            throw Error("cannot open store file: " + path);
        return load(in, warnings);
    }

private:
    std::vector<ExampleRecord> records_;
    std::unordered_set<std::string> ids_;
    std::unordered_set<std::string> content_keys_;
};

// Content-addressed ids make re-mining the same corpus a no-op.
inline std::string make_record_id(const ExampleRecord& r) {
    uint64_t h = detail::fnv1a(r.app_name);
    h = detail::fnv1a("\x1f", h);
    h = detail::fnv1a(r.activity_name, h);
    h = detail::fnv1a("\x1f", h);
    h = detail::fnv1a(detail::record_content_key(r), h);
    return std::string(r.origin == ExampleOrigin::Runtime ? "r" : "m") + detail::to_hex(h);
}

// Ranks the whole store by cosine similarity between the query bundle's
// context text and each record's, score descending then record_id ascending,
// and returns the first k. An empty store yields an empty list plus a
// warning, not a failure.
inline std::vector<ExampleRecord> select_examples(const GuiEntityBundle& query,
                                                  const ExampleStore& store,
                                                  const EmbeddingTable& table,
                                                  const RetrievalConfig& cfg,
                                                  std::vector<std::string>* warnings = nullptr) {
    if (cfg.k < 1)
        throw Error("retrieval k must be >= 1");
    if (store.empty()) {
        if (warnings)
            warnings->push_back("example store is empty; no in-context examples selected");
        return {};
    }
    std::vector<double> query_vec =
        embed_sentence(example_query_text(query.input.input_label, query.input.nearby_labels), table);

    const std::vector<ExampleRecord>& records = store.records();
    struct Scored {
        double score;
        size_t index;
    };
    std::vector<Scored> scored;
    scored.reserve(records.size());
    for (size_t i = 0; i < records.size(); ++i) {
        const ExampleRecord& r = records[i];
        double score = cosine(
            query_vec, embed_sentence(example_query_text(r.input_label, r.nearby_labels), table));
        scored.push_back({score, i});
    }

    auto better = [&](const Scored& a, const Scored& b) {
        if (a.score != b.score)
            return a.score > b.score;
        return records[a.index].record_id < records[b.index].record_id;
    };
    size_t k = std::min(static_cast<size_t>(cfg.k), scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<ptrdiff_t>(k), scored.end(),
                      better);

    std::vector<ExampleRecord> out;
    out.reserve(k);
    for (size_t i = 0; i < k; ++i)
        out.push_back(records[scored[i].index]);
    return out;
}

struct CorpusPage {
    ViewHierarchy vh;
    AppManifest manifest; // may be default-constructed when no manifest exists
};

// One record per hinted text input in the corpus; origin Mined.
inline std::vector<ExampleRecord> mine_examples(const std::vector<CorpusPage>& corpus) {
    std::vector<ExampleRecord> out;
    std::unordered_set<std::string> seen;
    for (const CorpusPage& page : corpus) {
        for (const NodePath& path : find_text_inputs(page.vh)) {
            const UiNode* node = resolve_path(page.vh, path);
            if (!node || !has_hint(*node))
                continue;
            InputComponentInfo info = extract_input_info(page.vh, path);
            ExampleRecord r;
            r.input_label = info.input_label;
            r.nearby_labels = info.nearby_labels;
            r.activity_name = page.vh.activity_name;
            r.app_name = page.manifest.app_name;
            r.hint_text = hintgen::detail::trim(node->hint);
            r.origin = ExampleOrigin::Mined;
            r.record_id = make_record_id(r);
            if (seen.insert(detail::record_content_key(r)).second)
                out.push_back(std::move(r));
        }
    }
    return out;
}

} // namespace hintgen
