#pragma once

#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hintgen/detail/text.hpp"
#include "hintgen/errors.hpp"

// Line-delimited JSON plumbing shared by the store, patch, trace and report
// writers. ordered_json keeps field order stable so output files are
// byte-deterministic.

namespace hintgen::detail {

using ojson = nlohmann::ordered_json;

// Calls fn(line_no, parsed) per non-blank line; unparseable lines are
// reported to `warnings` and skipped.
inline void for_each_jsonl(std::istream& in,
                           const std::function<void(size_t, const ojson&)>& fn,
                           std::vector<std::string>* warnings = nullptr) {
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim_view(line).empty())
            continue;
        ojson parsed = ojson::parse(line, nullptr, false);
        if (parsed.is_discarded()) {
            if (warnings)
                warnings->push_back("line " + std::to_string(line_no) + ": not valid JSON, skipped");
            continue;
        }
        fn(line_no, parsed);
    }
}

inline void for_each_jsonl_file(const std::string& path,
                                const std::function<void(size_t, const ojson&)>& fn,
                                std::vector<std::string>* warnings = nullptr) {
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open file: " + path);
    for_each_jsonl(in, fn, warnings);
}

inline std::ofstream open_for_write(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error("cannot write file: " + path);
    return out;
}

} // namespace hintgen::detail
