#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "hintgen/errors.hpp"
#include "hintgen/example_store.hpp"
#include "hintgen/vh.hpp"

// On-disk corpus layout, shared by every command that reads dumps:
// <root>/<app-id>/<page>.xml with an optional <root>/<app-id>/manifest.xml.
// A page's activity name is its file stem; the dump format has no field for
// it, so the capture tooling is expected to name files accordingly.

namespace hintgen {

struct CorpusAppFiles {
    std::string app_id; // directory name
    std::filesystem::path manifest; // empty when the app has none
    std::vector<std::filesystem::path> pages; // sorted by filename
};

// Apps sorted by id, pages sorted by name, so every traversal of the same
// tree sees the same order regardless of directory enumeration quirks.
inline std::vector<CorpusAppFiles> discover_corpus(const std::filesystem::path& root) {
    if (!std::filesystem::is_directory(root))
        throw Error("corpus root is not a directory: " + root.string());
    std::vector<CorpusAppFiles> apps;
    for (const auto& entry : std::filesystem::directory_iterator(root)) {
        if (!entry.is_directory())
            continue;
        CorpusAppFiles app;
        app.app_id = entry.path().filename().string();
        for (const auto& file : std::filesystem::directory_iterator(entry.path())) {
            if (!file.is_regular_file() || file.path().extension() != ".xml")
                continue;
            if (file.path().filename() == "manifest.xml")
                app.manifest = file.path();
            else
                app.pages.push_back(file.path());
        }
        std::sort(app.pages.begin(), app.pages.end());
        apps.push_back(std::move(app));
    }
    std::sort(apps.begin(), apps.end(),
              [](const CorpusAppFiles& a, const CorpusAppFiles& b) { return a.app_id < b.app_id; });
    return apps;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open file: " + path.string());
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

inline ViewHierarchy load_page_file(const std::filesystem::path& path) {
    return parse_hierarchy(read_file(path), path.stem().string(), path.string());
}

inline AppManifest load_manifest_file(const std::filesystem::path& path) {
    return parse_manifest(read_file(path));
}

// Every parseable page paired with its app's manifest; unreadable or
// malformed files are reported and skipped rather than sinking the run.
inline std::vector<CorpusPage> load_corpus(const std::filesystem::path& root,
                                           std::vector<std::string>* warnings = nullptr) {
    std::vector<CorpusPage> out;
    for (const CorpusAppFiles& app : discover_corpus(root)) {
        AppManifest manifest;
        if (!app.manifest.empty()) {
            try {
                manifest = load_manifest_file(app.manifest);
            } catch (const Error& e) {
                if (warnings)
                    warnings->push_back(app.manifest.string() + ": " + e.what() + ", skipped");
            }
        }
        for (const std::filesystem::path& page : app.pages) {
            try {
                out.push_back({load_page_file(page), manifest});
            } catch (const Error& e) {
                if (warnings)
                    warnings->push_back(page.string() + ": " + e.what() + ", skipped");
            }
        }
    }
    return out;
}

} // namespace hintgen
