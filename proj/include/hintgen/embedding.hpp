#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hintgen/detail/text.hpp"
#include "hintgen/errors.hpp"

// Word-vector table and the sentence-embedding / cosine kernels used for
// retrieval. Pooling is the arithmetic mean of in-vocabulary token vectors.

namespace hintgen {

// Splits on non-alphanumerics, then on camelCase boundaries, and lowercases.
// Resource-ids (depart_city, AppCompatEditText) are the main fallback labels,
// so the embedding tokenizer has to take them apart.
inline std::vector<std::string> embedding_tokens(std::string_view text) {
    auto is_upper = [](char c) { return c >= 'A' && c <= 'Z'; };
    auto is_lower_or_digit = [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
    };
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&]() {
        if (!cur.empty()) {
            out.push_back(detail::to_lower(cur));
            cur.clear();
        }
    };
    for (size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (!detail::is_alnum(c)) {
            flush();
            continue;
        }
        if (!cur.empty() && is_upper(c)) {
            char prev = cur.back();
            bool case_boundary = is_lower_or_digit(prev);
            // "HTTPServer" -> "http" + "server": break before the last
            // capital of an upper run when a lowercase letter follows.
            bool acronym_end = is_upper(prev) && i + 1 < text.size() &&
                               text[i + 1] >= 'a' && text[i + 1] <= 'z';
            if (case_boundary || acronym_end)
                flush();
        }
        cur.push_back(c);
    }
    flush();
    return out;
}

class EmbeddingTable {
public:
    static constexpr int kDefaultDimension = 300;
    static constexpr int kAutoDimension = 0; // load: infer from the first line

    explicit EmbeddingTable(int dimension = kDefaultDimension) : dimension_(dimension) {}

    int dimension() const { return dimension_; }
    size_t size() const { return entries_.size(); }

    void add(std::string_view token, std::vector<double> vec) {
        if (static_cast<int>(vec.size()) != dimension_)
            throw DimensionMismatch("vector for '" + std::string(token) + "' has " +
                                    std::to_string(vec.size()) + " components, expected " +
                                    std::to_string(dimension_));
        entries_[detail::to_lower(token)] = std::move(vec);
    }

    const std::vector<double>* lookup(std::string_view lowercase_token) const {
        auto it = entries_.find(std::string(lowercase_token));
        return it == entries_.end() ? nullptr : &it->second;
    }

    // One token per line followed by the vector's decimal components. With
    // kAutoDimension the first well-formed line fixes the dimension; every
    // later line must agree. Malformed lines are skipped with a warning.
    static EmbeddingTable load(std::istream& in, int dimension = kAutoDimension,
                               std::vector<std::string>* warnings = nullptr) {
        std::optional<EmbeddingTable> table;
        if (dimension > 0)
            table.emplace(dimension);
        std::string line;
        size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (detail::trim_view(line).empty())
                continue;
            std::istringstream fields(line);
            std::string token;
            fields >> token;
            std::vector<double> vec;
            double v;
            while (fields >> v)
                vec.push_back(v);
            if (token.empty() || vec.empty() ||
                (table && static_cast<int>(vec.size()) != table->dimension())) {
                if (warnings)
                    warnings->push_back(
                        "embedding line " + std::to_string(line_no) + ": expected token + " +
                        (table ? std::to_string(table->dimension()) : std::string("n")) +
                        " numbers, skipped");
                continue;
            }
            if (!table)
                table.emplace(static_cast<int>(vec.size()));
            table->add(token, std::move(vec));
        }
        if (!table)
            table.emplace(kDefaultDimension);
        return *std::move(table);
    }

    static EmbeddingTable load_file(const std::string& path, int dimension = kAutoDimension,
                                    std::vector<std::string>* warnings = nullptr) {
        std::ifstream in(path);
        if (!in)
            throw Error("cannot open embedding file: " + path);
        return load(in, dimension, warnings);
    }

    void save(std::ostream& out) const {
        // Stable order for byte-identical files.
        std::vector<const std::string*> tokens;
        tokens.reserve(entries_.size());
        for (const auto& [token, vec] : entries_)
            tokens.push_back(&token);
        std::sort(tokens.begin(), tokens.end(),
                  [](const std::string* a, const std::string* b) { return *a < *b; });
        char buf[32];
        for (const std::string* token : tokens) {
            out << *token;
            for (double v : entries_.at(*token)) {
                std::snprintf(buf, sizeof buf, " %.4f", v);
                out << buf;
            }
            out << '\n';
        }
    }

private:
    int dimension_;
    std::unordered_map<std::string, std::vector<double>> entries_;
};

// Mean of in-vocabulary token vectors; the zero vector when nothing is in
// vocabulary or the text is empty.
inline std::vector<double> embed_sentence(std::string_view text, const EmbeddingTable& table) {
    std::vector<double> sum(static_cast<size_t>(table.dimension()), 0.0);
    size_t hits = 0;
    for (const std::string& token : embedding_tokens(text)) {
        if (const std::vector<double>* vec = table.lookup(token)) {
            for (size_t i = 0; i < sum.size(); ++i)
                sum[i] += (*vec)[i];
            ++hits;
        }
    }
    if (hits > 0)
        for (double& v : sum)
            v /= static_cast<double>(hits);
    return sum;
}

// Zero by convention when either vector has zero norm.
inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size())
        throw DimensionMismatch("cosine over vectors of size " + std::to_string(a.size()) +
                                " and " + std::to_string(b.size()));
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0)
        return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

} // namespace hintgen
