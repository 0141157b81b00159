#pragma once

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "hintgen/detail/jsonl.hpp"
#include "hintgen/detail/text.hpp"
#include "hintgen/errors.hpp"
#include "hintgen/prompt.hpp"

// Completion backend behind a single complete(prompt) call. Two kinds: an
// HTTP client speaking the common chat-completions wire schema, and a
// scripted mock for offline runs. The mock does no network work at all, so
// tests and the acceptance suite never touch a socket unless they opt in.

namespace hintgen {

enum class BackendKind { HttpChat, ScriptedMock };

struct BackendConfig {
    BackendKind kind = BackendKind::ScriptedMock;
    std::string endpoint;    // HttpChat only: scheme://host[:port][/path]
    std::string model_name;
    std::chrono::milliseconds timeout{30000};
    int max_retries = 2;     // NetworkError only; timeouts fail immediately
    std::chrono::milliseconds retry_backoff{100}; // doubles per retry
    double temperature = 0.0;
    std::string api_key_env = "LLM_API_KEY"; // key read from this variable
    std::string trace_path;  // JSONL request/response log when non-empty
    int max_in_flight = 4;
};

struct HintResult {
    std::string hint_text;     // non-empty after trimming
    std::string input_content; // may be empty
    std::string raw_response;
};

// Ordered contains-rules; the first rule whose needle occurs in the prompt
// wins, then the default if any. Misses are errors, not empty strings, so a
// fixture that drifts out from under a test fails loudly.
class MockScript {
public:
    void add_rule(std::string needle, std::string response) {
        rules_.push_back({std::move(needle), std::move(response)});
    }
    void set_default(std::string response) { default_response_ = std::move(response); }

    bool empty() const { return rules_.empty() && !default_response_; }

    const std::string& lookup(const std::string& prompt) const {
        for (const auto& rule : rules_)
            if (prompt.find(rule.needle) != std::string::npos)
                return rule.response;
        if (default_response_)
            return *default_response_;
        throw MockMiss("no scripted response matches prompt (first 80 chars: " +
                       prompt.substr(0, 80) + ")");
    }

    // JSONL: {"contains": "...", "response": "..."} rules in file order,
    // {"default": "..."} for the fallback.
    static MockScript load(std::istream& in, std::vector<std::string>* warnings = nullptr) {
        MockScript script;
        detail::for_each_jsonl(
            in,
            [&](size_t line_no, const detail::ojson& j) {
                if (j.contains("default")) {
                    script.set_default(j.at("default").get<std::string>());
                } else if (j.contains("contains") && j.contains("response")) {
                    script.add_rule(j.at("contains").get<std::string>(),
                                    j.at("response").get<std::string>());
                } else if (warnings) {
                    warnings->push_back("line " + std::to_string(line_no) +
                                        ": expected contains/response or default, skipped");
                }
            },
            warnings);
        return script;
    }

    static MockScript load_file(const std::string& path,
                                std::vector<std::string>* warnings = nullptr) {
        std::ifstream in(path);
        if (!in)
            throw Error("cannot open mock script: " + path);
        return load(in, warnings);
    }

private:
    struct Rule {
        std::string needle;
        std::string response;
    };
    std::vector<Rule> rules_;
    std::optional<std::string> default_response_;
};

namespace detail {

// Text between the first quote pair at or after `from`. Straight quotes and
// the UTF-8 curly pair are all accepted as either end.
inline std::optional<std::string> first_quoted_span(std::string_view s, size_t from) {
    auto quote_at = [&](size_t i) -> size_t { // returns quote byte length, 0 if none
        if (s[i] == '"')
            return 1;
        if (i + 2 < s.size() && static_cast<unsigned char>(s[i]) == 0xE2 &&
            static_cast<unsigned char>(s[i + 1]) == 0x80 &&
            (static_cast<unsigned char>(s[i + 2]) == 0x9C ||
             static_cast<unsigned char>(s[i + 2]) == 0x9D))
            return 3;
        return 0;
    };
    size_t open = from;
    size_t open_len = 0;
    while (open < s.size() && (open_len = quote_at(open)) == 0)
        ++open;
    if (open >= s.size())
        return std::nullopt;
    size_t close = open + open_len;
    size_t close_len = 0;
    while (close < s.size() && (close_len = quote_at(close)) == 0)
        ++close;
    if (close >= s.size())
        return std::nullopt;
    return std::string(s.substr(open + open_len, close - open - open_len));
}

} // namespace detail

// Pulls the quoted span after the case-insensitive marker "hint-text is" and
// the one after "input content is"; marker order in the response does not
// matter. A missing input-content marker yields an empty input, a missing or
// empty hint is UnparseableResponse.
inline HintResult parse_hint_response(const std::string& raw) {
    constexpr std::string_view kHintMarker = "hint-text is";
    constexpr std::string_view kInputMarker = "input content is";

    size_t hint_pos = detail::ifind(raw, kHintMarker);
    if (hint_pos == std::string::npos)
        throw UnparseableResponse("response has no 'hint-text is' marker");
    std::optional<std::string> hint =
        detail::first_quoted_span(raw, hint_pos + kHintMarker.size());
    if (!hint || detail::trim_view(*hint).empty())
        throw UnparseableResponse("no quoted hint-text after marker");

    HintResult result;
    result.hint_text = detail::trim(*hint);
    result.raw_response = raw;

    size_t input_pos = detail::ifind(raw, kInputMarker);
    if (input_pos != std::string::npos) {
        if (auto span = detail::first_quoted_span(raw, input_pos + kInputMarker.size()))
            result.input_content = detail::trim(*span);
    }
    return result;
}

namespace detail {

std::string http_chat_complete(const BackendConfig& cfg, const std::string& prompt);

} // namespace detail

class LlmGateway {
public:
    explicit LlmGateway(BackendConfig cfg, MockScript mock = {})
        : cfg_(std::move(cfg)), mock_(std::move(mock)),
          in_flight_(std::max(cfg_.max_in_flight, 1)) {
        if (cfg_.timeout.count() <= 0)
            throw Error("backend timeout must be positive");
        if (cfg_.max_retries < 0 || cfg_.max_retries > 5)
            throw Error("max_retries must be in 0..5");
        if (cfg_.kind == BackendKind::HttpChat && cfg_.endpoint.empty())
            throw Error("HttpChat backend requires an endpoint");
        if (!cfg_.trace_path.empty())
            trace_.emplace(detail::open_for_write(cfg_.trace_path));
    }

    const BackendConfig& config() const { return cfg_; }
    size_t completions_issued() const { return completions_.load(); }

    // Raw completion text. NetworkError is retried with exponential backoff
    // up to max_retries; TimeoutError and MockMiss fail at once.
    std::string complete(const std::string& prompt) {
        in_flight_.acquire();
        struct Release {
            std::counting_semaphore<>& sem;
            ~Release() { sem.release(); }
        } release{in_flight_};

        completions_.fetch_add(1);
        trace("request", prompt);
        try {
            std::string response = complete_once_with_retry(prompt);
            trace("response", response);
            return response;
        } catch (const std::exception& e) {
            trace("error", e.what());
            throw;
        }
    }

    // complete + parse. On an unparseable response, and only when the caller
    // still has its one reminder available, re-queries once with a format
    // reminder appended; a second failure is final.
    HintResult request_hint(const std::string& prompt, bool allow_reminder = true,
                            bool* reminder_used = nullptr) {
        if (reminder_used)
            *reminder_used = false;
        std::string raw = complete(prompt);
        try {
            return parse_hint_response(raw);
        } catch (const UnparseableResponse& first) {
            if (!allow_reminder)
                throw UnparseableAfterReminder(std::string("reminder already spent: ") +
                                               first.what());
            if (reminder_used)
                *reminder_used = true;
            std::string reminded =
                prompt + "\n\n" + std::string(template_pattern(SectionKind::ExampleOutput));
            std::string raw2 = complete(reminded);
            try {
                return parse_hint_response(raw2);
            } catch (const UnparseableResponse& second) {
                throw UnparseableAfterReminder(std::string("still unparseable after reminder: ") +
                                               second.what());
            }
        }
    }

private:
    std::string complete_once_with_retry(const std::string& prompt) {
        if (cfg_.kind == BackendKind::ScriptedMock)
            return mock_.lookup(prompt);
        int attempt = 0;
        while (true) {
            try {
                return detail::http_chat_complete(cfg_, prompt);
            } catch (const NetworkError&) {
                if (attempt >= cfg_.max_retries)
                    throw;
                std::this_thread::sleep_for(cfg_.retry_backoff * (1 << attempt));
                ++attempt;
            }
        }
    }

    void trace(std::string_view event, const std::string& body) {
        if (!trace_)
            return;
        detail::ojson j;
        j["event"] = std::string(event);
        j["body"] = body;
        std::lock_guard lock(trace_mutex_);
        *trace_ << j.dump() << '\n';
        trace_->flush();
    }

    BackendConfig cfg_;
    MockScript mock_;
    std::counting_semaphore<> in_flight_;
    std::atomic<size_t> completions_{0};
    std::optional<std::ofstream> trace_;
    std::mutex trace_mutex_;
};

} // namespace hintgen

// The HTTP leg lives in its own header to keep the socket code out of the
// way; it must follow the gateway since it completes a declared function.
#include "hintgen/detail/http_chat.hpp"
