#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "hintgen/detail/porter.hpp"
#include "hintgen/detail/text.hpp"
#include "hintgen/errors.hpp"

// Text-similarity scores for generated hints against reference hints. All
// scores operate on lowercase alphanumeric tokens and live in [0, 1]; no
// smoothing anywhere, so degenerate inputs score 0 rather than epsilon.

namespace hintgen::metrics {

inline std::vector<std::string> tokenize(std::string_view text) {
    return hintgen::detail::split_alnum(text);
}

// Case- and whitespace-insensitive string equality.
inline bool exact_match(std::string_view candidate, std::string_view reference) {
    return hintgen::detail::normalize_ws(candidate) == hintgen::detail::normalize_ws(reference);
}

namespace detail {

// n-grams as joined tokens; '\x1f' cannot appear inside a token.
inline std::map<std::string, int> ngram_counts(const std::vector<std::string>& tokens, int n) {
    std::map<std::string, int> counts;
    if (n < 1 || tokens.size() < static_cast<size_t>(n))
        return counts;
    for (size_t i = 0; i + static_cast<size_t>(n) <= tokens.size(); ++i) {
        std::string gram = tokens[i];
        for (size_t j = 1; j < static_cast<size_t>(n); ++j) {
            gram.push_back('\x1f');
            gram += tokens[i + j];
        }
        ++counts[gram];
    }
    return counts;
}

inline size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    if (a.empty() || b.empty())
        return 0;
    std::vector<size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
    for (size_t i = 1; i <= a.size(); ++i) {
        for (size_t j = 1; j <= b.size(); ++j) {
            if (a[i - 1] == b[j - 1])
                cur[j] = prev[j - 1] + 1;
            else
                cur[j] = std::max(prev[j], cur[j - 1]);
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

} // namespace detail

// Geometric mean of clipped n-gram precisions for orders 1..max_order,
// scaled by the brevity penalty min(1, exp(1 - r/c)). Any order with zero
// precision (including a candidate too short to have n-grams of that order)
// zeroes the whole score.
inline double bleu(std::string_view candidate, std::string_view reference, int max_order = 4) {
    if (max_order < 1)
        throw Error("bleu max_order must be >= 1");
    std::vector<std::string> cand = tokenize(candidate);
    std::vector<std::string> ref = tokenize(reference);
    if (cand.empty())
        return 0.0;

    double log_precision_sum = 0.0;
    for (int n = 1; n <= max_order; ++n) {
        auto cand_grams = detail::ngram_counts(cand, n);
        auto ref_grams = detail::ngram_counts(ref, n);
        long total = 0;
        long clipped = 0;
        for (const auto& [gram, count] : cand_grams) {
            total += count;
            auto it = ref_grams.find(gram);
            if (it != ref_grams.end())
                clipped += std::min(count, it->second);
        }
        if (total == 0 || clipped == 0)
            return 0.0;
        log_precision_sum += std::log(static_cast<double>(clipped) / static_cast<double>(total));
    }

    double ratio = static_cast<double>(ref.size()) / static_cast<double>(cand.size());
    double brevity = std::min(1.0, std::exp(1.0 - ratio));
    return brevity * std::exp(log_precision_sum / max_order);
}

// LCS-based F score weighted toward recall: P = LCS/|cand|, R = LCS/|ref|,
// F = (1 + beta^2) P R / (R + beta^2 P).
inline double rouge_l(std::string_view candidate, std::string_view reference, double beta = 1.2) {
    std::vector<std::string> cand = tokenize(candidate);
    std::vector<std::string> ref = tokenize(reference);
    if (cand.empty() || ref.empty())
        return 0.0;
    size_t lcs = detail::lcs_length(cand, ref);
    if (lcs == 0)
        return 0.0;
    double p = static_cast<double>(lcs) / static_cast<double>(cand.size());
    double r = static_cast<double>(lcs) / static_cast<double>(ref.size());
    double b2 = beta * beta;
    return (1.0 + b2) * p * r / (r + b2 * p);
}

// Unigram alignment in two passes, exact tokens first then Porter stems,
// each pass greedy in candidate order taking the first unmatched reference
// position. Fmean = 10PR/(R + 9P), fragmentation penalty
// 0.5 (chunks/matches)^3, score = Fmean (1 - penalty). A chunk is a maximal
// run of matches adjacent in both sentences.
inline double meteor(std::string_view candidate, std::string_view reference) {
    std::vector<std::string> cand = tokenize(candidate);
    std::vector<std::string> ref = tokenize(reference);
    if (cand.empty() || ref.empty())
        return 0.0;

    constexpr int kUnmatched = -1;
    std::vector<int> cand_to_ref(cand.size(), kUnmatched);
    std::vector<bool> ref_taken(ref.size(), false);

    for (size_t i = 0; i < cand.size(); ++i) {
        for (size_t j = 0; j < ref.size(); ++j) {
            if (!ref_taken[j] && cand[i] == ref[j]) {
                cand_to_ref[i] = static_cast<int>(j);
                ref_taken[j] = true;
                break;
            }
        }
    }

    std::vector<std::string> cand_stems(cand.size()), ref_stems(ref.size());
    for (size_t i = 0; i < cand.size(); ++i)
        cand_stems[i] = hintgen::detail::porter_stem(cand[i]);
    for (size_t j = 0; j < ref.size(); ++j)
        ref_stems[j] = hintgen::detail::porter_stem(ref[j]);
    for (size_t i = 0; i < cand.size(); ++i) {
        if (cand_to_ref[i] != kUnmatched)
            continue;
        for (size_t j = 0; j < ref.size(); ++j) {
            if (!ref_taken[j] && cand_stems[i] == ref_stems[j]) {
                cand_to_ref[i] = static_cast<int>(j);
                ref_taken[j] = true;
                break;
            }
        }
    }

    int matches = 0;
    int chunks = 0;
    int prev_ref = -2; // never adjacent to a real index
    for (size_t i = 0; i < cand.size(); ++i) {
        if (cand_to_ref[i] == kUnmatched)
            continue;
        ++matches;
        bool adjacent = (matches > 1) && (cand_to_ref[i] == prev_ref + 1) && i > 0 &&
                        cand_to_ref[i - 1] == prev_ref;
        if (!adjacent)
            ++chunks;
        prev_ref = cand_to_ref[i];
    }
    if (matches == 0)
        return 0.0;

    double p = static_cast<double>(matches) / static_cast<double>(cand.size());
    double r = static_cast<double>(matches) / static_cast<double>(ref.size());
    double fmean = 10.0 * p * r / (r + 9.0 * p);
    double frag = static_cast<double>(chunks) / static_cast<double>(matches);
    double penalty = 0.5 * frag * frag * frag;
    return fmean * (1.0 - penalty);
}

// Consensus scorer: per n-gram order 1..4, cosine between TF-IDF vectors of
// candidate and reference, averaged over the four orders. IDF comes from
// document frequency over a reference corpus, idf = log(N / max(df, 1)).
// When every idf touching a pair is zero at some order (a one-sentence
// corpus does this), that order falls back to plain TF vectors so identity
// still scores 1 instead of 0/0.
class CiderScorer {
public:
    static constexpr int kMaxOrder = 4;

    explicit CiderScorer(const std::vector<std::string>& corpus_references) {
        corpus_size_ = corpus_references.size();
        for (const std::string& ref : corpus_references) {
            std::vector<std::string> tokens = tokenize(ref);
            for (int n = 1; n <= kMaxOrder; ++n)
                for (const auto& [gram, count] : detail::ngram_counts(tokens, n))
                    ++df_[n - 1][gram];
        }
    }

    double score(std::string_view candidate, std::string_view reference) const {
        std::vector<std::string> cand = tokenize(candidate);
        std::vector<std::string> ref = tokenize(reference);
        double total = 0.0;
        for (int n = 1; n <= kMaxOrder; ++n)
            total += order_score(cand, ref, n);
        return total / kMaxOrder;
    }

private:
    double idf(int n, const std::string& gram) const {
        const auto& table = df_[n - 1];
        auto it = table.find(gram);
        long df = it == table.end() ? 0 : it->second;
        return std::log(static_cast<double>(std::max<size_t>(corpus_size_, 1)) /
                        static_cast<double>(std::max<long>(df, 1)));
    }

    double order_score(const std::vector<std::string>& cand, const std::vector<std::string>& ref,
                       int n) const {
        auto cand_grams = detail::ngram_counts(cand, n);
        auto ref_grams = detail::ngram_counts(ref, n);
        if (cand_grams.empty() || ref_grams.empty())
            return 0.0;

        bool any_nonzero_idf = false;
        for (const auto& [gram, count] : cand_grams)
            if (idf(n, gram) != 0.0)
                any_nonzero_idf = true;
        for (const auto& [gram, count] : ref_grams)
            if (idf(n, gram) != 0.0)
                any_nonzero_idf = true;

        double dot = 0.0, cand_norm = 0.0, ref_norm = 0.0;
        for (const auto& [gram, count] : cand_grams) {
            double w = static_cast<double>(count) * (any_nonzero_idf ? idf(n, gram) : 1.0);
            cand_norm += w * w;
            auto it = ref_grams.find(gram);
            if (it != ref_grams.end())
                dot += w * static_cast<double>(it->second) *
                       (any_nonzero_idf ? idf(n, gram) : 1.0);
        }
        for (const auto& [gram, count] : ref_grams) {
            double w = static_cast<double>(count) * (any_nonzero_idf ? idf(n, gram) : 1.0);
            ref_norm += w * w;
        }
        if (cand_norm == 0.0 || ref_norm == 0.0)
            return 0.0;
        return dot / (std::sqrt(cand_norm) * std::sqrt(ref_norm));
    }

    size_t corpus_size_ = 0;
    std::map<std::string, long> df_[kMaxOrder];
};

inline double cider(std::string_view candidate, std::string_view reference,
                    const std::vector<std::string>& corpus_references) {
    return CiderScorer(corpus_references).score(candidate, reference);
}

// Knobs are spelled out so the report can state what it measured, but the
// defaults are the only values the rest of the project uses.
struct MetricConfig {
    int bleu_max_order = 4;  // report carries orders 1..bleu_max_order
    double rouge_beta = 1.2;
    // meteor is fixed-form: F = 10PR/(R+9P), penalty 0.5 (chunks/matches)^3
};

struct PairScores {
    bool exact = false;
    double bleu[4] = {0.0, 0.0, 0.0, 0.0}; // index n-1 holds BLEU@n
    double meteor = 0.0;
    double rouge_l = 0.0;
    double cider = 0.0;
};

struct MetricReport {
    std::vector<PairScores> pairs;
    double exact_match = 0.0; // fraction of pairs matching exactly
    double bleu[4] = {0.0, 0.0, 0.0, 0.0};
    double meteor = 0.0;
    double rouge_l = 0.0;
    double cider = 0.0;

    size_t pair_count() const { return pairs.size(); }
};

// Per-pair scores plus arithmetic means; the reference column doubles as the
// IDF corpus. Throws LengthMismatch / EmptyCorpus rather than guessing.
inline MetricReport evaluate_corpus(const std::vector<std::string>& candidates,
                                    const std::vector<std::string>& references,
                                    const MetricConfig& cfg = {}) {
    if (candidates.size() != references.size())
        throw LengthMismatch("candidate/reference count mismatch: " +
                             std::to_string(candidates.size()) + " vs " +
                             std::to_string(references.size()));
    if (candidates.empty())
        throw EmptyCorpus("no candidate/reference pairs to evaluate");
    if (cfg.bleu_max_order < 1 || cfg.bleu_max_order > 4)
        throw Error("bleu_max_order must be in 1..4");

    CiderScorer scorer(references);
    MetricReport report;
    report.pairs.reserve(candidates.size());
    for (size_t i = 0; i < candidates.size(); ++i) {
        PairScores p;
        p.exact = exact_match(candidates[i], references[i]);
        for (int n = 1; n <= cfg.bleu_max_order; ++n)
            p.bleu[n - 1] = bleu(candidates[i], references[i], n);
        p.meteor = meteor(candidates[i], references[i]);
        p.rouge_l = rouge_l(candidates[i], references[i], cfg.rouge_beta);
        p.cider = scorer.score(candidates[i], references[i]);
        report.pairs.push_back(p);

        report.exact_match += p.exact ? 1.0 : 0.0;
        for (int n = 0; n < 4; ++n)
            report.bleu[n] += p.bleu[n];
        report.meteor += p.meteor;
        report.rouge_l += p.rouge_l;
        report.cider += p.cider;
    }
    double n = static_cast<double>(report.pairs.size());
    report.exact_match /= n;
    for (int i = 0; i < 4; ++i)
        report.bleu[i] /= n;
    report.meteor /= n;
    report.rouge_l /= n;
    report.cider /= n;
    return report;
}

} // namespace hintgen::metrics
