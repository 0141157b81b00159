#pragma once

#include <optional>
#include <string>

// Outcome of one validation round on the device, fed back into the next
// prompt. Kept separate from the pipeline so the prompt builder can depend
// on it without pulling in device code.

namespace hintgen {

enum class Verdict {
    Pass,             // input accepted, page transitioned
    FailNoTransition, // input rejected, page stayed (error popup or silent)
    Unvalidated,      // no device attached; hint produced but never exercised
};

inline const char* to_string(Verdict v) {
    switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::FailNoTransition: return "fail";
    case Verdict::Unvalidated: return "unvalidated";
    }
    return "unvalidated";
}

struct FeedbackRecord {
    Verdict verdict = Verdict::Unvalidated;
    std::string failed_input;                 // rejected content; empty unless failed
    std::optional<std::string> error_message; // popup text, only with a failure
    int round = 1;                            // 1-based generation round
};

} // namespace hintgen
