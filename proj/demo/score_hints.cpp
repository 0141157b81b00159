// Scores a candidate hint-text against a reference on every supported
// metric. The reference doubles as the one-document IDF corpus for CIDEr,
// which is why that score is most useful over whole files (see the
// `evaluate` subcommand of the CLI for that).
//
//   ./score_hints "enter the city" "enter the city name"

#include <cstdio>
#include <iostream>

#include "hintgen/metrics.hpp"

int main(int argc, char** argv) {
    if (argc != 3) {
        std::cerr << "usage: score_hints <candidate> <reference>\n";
        return 1;
    }
    using namespace hintgen::metrics;
    std::string cand = argv[1], ref = argv[2];

    std::printf("exact_match: %s\n", exact_match(cand, ref) ? "yes" : "no");
    for (int n = 1; n <= 4; ++n)
        std::printf("bleu@%d:      %.6f\n", n, bleu(cand, ref, n));
    std::printf("meteor:      %.6f\n", meteor(cand, ref));
    std::printf("rouge_l:     %.6f\n", rouge_l(cand, ref));
    std::printf("cider:       %.6f\n", cider(cand, ref, {ref}));
    return 0;
}
