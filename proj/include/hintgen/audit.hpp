#pragma once

#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "hintgen/corpus.hpp"
#include "hintgen/errors.hpp"
#include "hintgen/vh.hpp"

// Corpus-wide statistics on missing hint text. Counting rules: pages dedup
// by fingerprint within an app; a page counts only if it has at least one
// text input; an app "has missing" when any counted input lacks a hint. The
// missing predicate is the same has_hint the repair loop uses to skip
// already-hinted inputs, so the audit and the fixer always agree.

namespace hintgen::audit {

struct AppAudit {
    std::string app_id;
    std::string category = "uncategorized";
    size_t pages = 0;  // deduped pages with at least one text input
    size_t inputs = 0; // text inputs on counted pages
    size_t inputs_missing_hint = 0;

    bool has_inputs() const { return inputs > 0; }
    bool has_missing() const { return inputs_missing_hint > 0; }

    bool operator==(const AppAudit&) const = default;
};

struct CategoryStat {
    size_t apps_with_inputs = 0;
    size_t apps_with_any_missing = 0;

    double missing_rate() const {
        return apps_with_inputs == 0
                   ? 0.0
                   : static_cast<double>(apps_with_any_missing) /
                         static_cast<double>(apps_with_inputs);
    }

    bool operator==(const CategoryStat&) const = default;
};

struct AuditReport {
    std::vector<AppAudit> apps; // sorted by app_id
    std::map<std::string, CategoryStat> categories;
    size_t apps_with_inputs = 0;
    size_t apps_with_any_missing = 0;
    size_t files_skipped = 0;
    std::vector<std::string> warnings;

    double overall_missing_rate() const {
        return apps_with_inputs == 0
                   ? 0.0
                   : static_cast<double>(apps_with_any_missing) /
                         static_cast<double>(apps_with_inputs);
    }

    bool operator==(const AuditReport&) const = default;
};

// Two whitespace-separated columns per line: app id, category. Blank lines
// and #-comments allowed.
inline std::map<std::string, std::string> load_category_map(std::istream& in) {
    std::map<std::string, std::string> map;
    std::string line;
    while (std::getline(in, line)) {
        std::string_view v = hintgen::detail::trim_view(line);
        if (v.empty() || v.front() == '#')
            continue;
        size_t split = v.find_first_of(" \t");
        if (split == std::string_view::npos)
            throw Error("category map line needs two columns: " + line);
        std::string app(hintgen::detail::trim_view(v.substr(0, split)));
        std::string category(hintgen::detail::trim_view(v.substr(split)));
        map[app] = category;
    }
    return map;
}

inline std::map<std::string, std::string> load_category_map_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open category map: " + path);
    return load_category_map(in);
}

inline AuditReport scan_corpus(const std::filesystem::path& corpus_root,
                               const std::map<std::string, std::string>& category_map = {}) {
    AuditReport report;
    std::vector<CorpusAppFiles> apps = discover_corpus(corpus_root);
    if (apps.empty())
        report.warnings.push_back("corpus has no app directories: " + corpus_root.string());

    for (const CorpusAppFiles& files : apps) {
        AppAudit app;
        app.app_id = files.app_id;
        if (auto it = category_map.find(files.app_id); it != category_map.end())
            app.category = it->second;

        std::set<std::string> seen_fingerprints;
        for (const std::filesystem::path& page_path : files.pages) {
            ViewHierarchy vh;
            try {
                vh = load_page_file(page_path);
            } catch (const Error& e) {
                ++report.files_skipped;
                report.warnings.push_back(page_path.string() + ": " + e.what() + ", skipped");
                continue;
            }
            if (!seen_fingerprints.insert(layout_fingerprint(vh)).second)
                continue; // duplicate capture of the same page under another name
            std::vector<NodePath> inputs = find_text_inputs(vh);
            if (inputs.empty())
                continue;
            ++app.pages;
            app.inputs += inputs.size();
            for (const NodePath& path : inputs) {
                const UiNode* node = resolve_path(vh, path);
                if (node && !has_hint(*node))
                    ++app.inputs_missing_hint;
            }
        }

        if (app.has_inputs()) {
            ++report.apps_with_inputs;
            ++report.categories[app.category].apps_with_inputs;
            if (app.has_missing()) {
                ++report.apps_with_any_missing;
                ++report.categories[app.category].apps_with_any_missing;
            }
        }
        report.apps.push_back(std::move(app));
    }
    return report;
}

enum class ReportFormat { Text, Structured };

namespace detail {

inline std::string percent(double rate) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f%%", rate * 100.0);
    return buf;
}

} // namespace detail

inline std::string render_report(const AuditReport& report, ReportFormat format) {
    if (format == ReportFormat::Structured) {
        nlohmann::ordered_json j;
        j["apps"] = nlohmann::ordered_json::array();
        for (const AppAudit& app : report.apps) {
            nlohmann::ordered_json ja;
            ja["id"] = app.app_id;
            ja["category"] = app.category;
            ja["pages"] = app.pages;
            ja["inputs"] = app.inputs;
            ja["missing"] = app.inputs_missing_hint;
            j["apps"].push_back(std::move(ja));
        }
        j["categories"] = nlohmann::ordered_json::object();
        for (const auto& [name, stat] : report.categories) {
            j["categories"][name] = {{"apps_with_inputs", stat.apps_with_inputs},
                                     {"apps_with_any_missing", stat.apps_with_any_missing}};
        }
        j["apps_with_inputs"] = report.apps_with_inputs;
        j["apps_with_any_missing"] = report.apps_with_any_missing;
        j["overall_missing_rate"] = report.overall_missing_rate();
        j["files_skipped"] = report.files_skipped;
        j["warnings"] = report.warnings;
        return j.dump(2) + "\n";
    }

    std::string out;
    out += "apps scanned: " + std::to_string(report.apps.size()) + " (" +
           std::to_string(report.apps_with_inputs) + " with text inputs)\n";
    out += "apps missing at least one hint: " + std::to_string(report.apps_with_any_missing) +
           " (" + detail::percent(report.overall_missing_rate()) + ")\n";
    out += "files skipped: " + std::to_string(report.files_skipped) + "\n";
    out += "\ncategory                      apps  missing    rate\n";
    for (const auto& [name, stat] : report.categories) { // std::map: already sorted
        char buf[128];
        std::snprintf(buf, sizeof(buf), "%-28s %5zu %8zu  %6s\n", name.c_str(),
                      stat.apps_with_inputs, stat.apps_with_any_missing,
                      detail::percent(stat.missing_rate()).c_str());
        out += buf;
    }
    for (const std::string& w : report.warnings)
        out += "warning: " + w + "\n";
    return out;
}

// Inverse of the structured rendering; text reports are for eyes only.
inline AuditReport load_report(const std::string& structured_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(structured_text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("not a structured audit report: ") + e.what());
    }
    AuditReport report;
    for (const auto& ja : j.at("apps")) {
        AppAudit app;
        app.app_id = ja.at("id").get<std::string>();
        app.category = ja.at("category").get<std::string>();
        app.pages = ja.at("pages").get<size_t>();
        app.inputs = ja.at("inputs").get<size_t>();
        app.inputs_missing_hint = ja.at("missing").get<size_t>();
        report.apps.push_back(std::move(app));
    }
    for (const auto& [name, stat] : j.at("categories").items()) {
        CategoryStat s;
        s.apps_with_inputs = stat.at("apps_with_inputs").get<size_t>();
        s.apps_with_any_missing = stat.at("apps_with_any_missing").get<size_t>();
        report.categories[name] = s;
    }
    report.apps_with_inputs = j.at("apps_with_inputs").get<size_t>();
    report.apps_with_any_missing = j.at("apps_with_any_missing").get<size_t>();
    report.files_skipped = j.at("files_skipped").get<size_t>();
    for (const auto& w : j.at("warnings"))
        report.warnings.push_back(w.get<std::string>());
    return report;
}

} // namespace hintgen::audit
