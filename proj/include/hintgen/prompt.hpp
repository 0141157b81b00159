#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hintgen/detail/text.hpp"
#include "hintgen/entities.hpp"
#include "hintgen/errors.hpp"
#include "hintgen/example_store.hpp"
#include "hintgen/feedback.hpp"

// Assembles the natural-language documents sent to the model. Every section
// is produced from a fixed pattern in kSectionTemplates; builders only fill
// placeholders, so goldens pin the exact wording. Empty GUI fields render as
// the literal word unknown rather than an empty quote pair. The input's own
// existing hint is deliberately absent from every pattern: the model must
// not see the value it is asked to produce.

namespace hintgen {

enum class SectionKind {
    InContext,
    AppInfo,
    PageInfo,
    InputInfo,
    Feedback,
    Query,
    FeedbackQuery,
    ExampleOutput,
};

inline const char* to_string(SectionKind kind) {
    switch (kind) {
    case SectionKind::InContext: return "in_context";
    case SectionKind::AppInfo: return "app_info";
    case SectionKind::PageInfo: return "page_info";
    case SectionKind::InputInfo: return "input_info";
    case SectionKind::Feedback: return "feedback";
    case SectionKind::Query: return "query";
    case SectionKind::FeedbackQuery: return "feedback_query";
    case SectionKind::ExampleOutput: return "example_output";
    }
    return "?";
}

struct PromptSection {
    SectionKind kind;
    std::string text;

    bool operator==(const PromptSection&) const = default;
};

struct PromptDocument {
    std::vector<PromptSection> sections;

    bool operator==(const PromptDocument&) const = default;
};

struct SectionTemplate {
    SectionKind kind;
    std::string_view pattern;
};

inline constexpr std::array<SectionTemplate, 8> kSectionTemplates{{
    {SectionKind::InContext, "We will provide you with {count} examples:\n{examples}"},
    {SectionKind::AppInfo,
     "The app name is \"{app}\", it has following activities: \"{activities}\"."},
    {SectionKind::PageInfo,
     "The current GUI page is \"{activity}\", it has following components: \"{components}\", "
     "the upper part of the page is \"{upper}\", the lower part of the page is \"{lower}\"."},
    {SectionKind::InputInfo,
     "The text input of this page is \"{input}\", its nearby components are \"{nearby}\"."},
    {SectionKind::Feedback,
     "The input content \"{content}\" doesn't pass the page, the error message of the input "
     "component is: {error}."},
    {SectionKind::Query,
     "Please generate a hint-text for the input component based on the above information, and "
     "generate corresponding input content based on the generated hint-text."},
    {SectionKind::FeedbackQuery,
     "Please regenerate the hint text and its corresponding input content based on the feedback "
     "information above."},
    {SectionKind::ExampleOutput,
     "Please output according to the following example: the hint-text is \"xxx\", the input "
     "content is \"xxx\"."},
}};

inline constexpr std::string_view kExampleLinePattern =
    "The {ordinal} text input is \"{input}\", its nearby components are \"{nearby}\", its "
    "hint-text is \"{hint}\".";

inline std::string_view template_pattern(SectionKind kind) {
    for (const SectionTemplate& t : kSectionTemplates)
        if (t.kind == kind)
            return t.pattern;
    return {};
}

namespace detail {

// {name} substitution; unknown placeholders are left alone so a stale
// template shows up verbatim in goldens instead of vanishing.
inline std::string fill(std::string_view pattern,
                        std::initializer_list<std::pair<std::string_view, std::string_view>> args) {
    std::string out;
    out.reserve(pattern.size());
    size_t i = 0;
    while (i < pattern.size()) {
        if (pattern[i] == '{') {
            size_t close = pattern.find('}', i);
            if (close != std::string_view::npos) {
                std::string_view key = pattern.substr(i + 1, close - i - 1);
                bool matched = false;
                for (const auto& [name, value] : args) {
                    if (name == key) {
                        out += value;
                        matched = true;
                        break;
                    }
                }
                if (matched) {
                    i = close + 1;
                    continue;
                }
            }
        }
        out.push_back(pattern[i]);
        ++i;
    }
    return out;
}

inline std::string or_unknown(std::string_view s) {
    return trim_view(s).empty() ? std::string("unknown") : std::string(s);
}

inline std::string join_or_unknown(const std::vector<std::string>& items) {
    std::string out;
    for (const std::string& item : items) {
        if (trim_view(item).empty())
            continue;
        if (!out.empty())
            out += ", ";
        out += item;
    }
    return out.empty() ? std::string("unknown") : out;
}

} // namespace detail

// Spelled out through ten, digit form with the usual suffix past that.
inline std::string ordinal(int n) {
    static constexpr std::string_view words[] = {"first", "second", "third",  "fourth", "fifth",
                                                 "sixth", "seventh", "eighth", "ninth",  "tenth"};
    if (n >= 1 && n <= 10)
        return std::string(words[n - 1]);
    int tail = n % 100;
    const char* suffix = "th";
    if (tail < 11 || tail > 13) {
        switch (n % 10) {
        case 1: suffix = "st"; break;
        case 2: suffix = "nd"; break;
        case 3: suffix = "rd"; break;
        default: break;
        }
    }
    return std::to_string(n) + suffix;
}

inline PromptSection build_app_section(const AppInfo& app) {
    return {SectionKind::AppInfo,
            detail::fill(template_pattern(SectionKind::AppInfo),
                         {{"app", detail::or_unknown(app.app_name)},
                          {"activities", detail::join_or_unknown(app.activities)}})};
}

inline PromptSection build_page_section(const PageInfo& page) {
    return {SectionKind::PageInfo,
            detail::fill(template_pattern(SectionKind::PageInfo),
                         {{"activity", detail::or_unknown(page.activity_name)},
                          {"components", detail::join_or_unknown(page.components)},
                          {"upper", detail::join_or_unknown(page.upper)},
                          {"lower", detail::join_or_unknown(page.lower)}})};
}

inline PromptSection build_input_section(const InputComponentInfo& input) {
    return {SectionKind::InputInfo,
            detail::fill(template_pattern(SectionKind::InputInfo),
                         {{"input", detail::or_unknown(input.input_label)},
                          {"nearby", detail::join_or_unknown(input.nearby_labels)}})};
}

// Absent when there are no examples; a prompt never carries an empty list
// header.
inline std::optional<PromptSection> build_icl_section(const std::vector<ExampleRecord>& examples) {
    if (examples.empty())
        return std::nullopt;
    std::string lines;
    for (size_t i = 0; i < examples.size(); ++i) {
        const ExampleRecord& r = examples[i];
        if (i)
            lines.push_back('\n');
        lines += detail::fill(kExampleLinePattern,
                              {{"ordinal", ordinal(static_cast<int>(i) + 1)},
                               {"input", detail::or_unknown(r.input_label)},
                               {"nearby", detail::join_or_unknown(r.nearby_labels)},
                               {"hint", r.hint_text}});
    }
    return PromptSection{SectionKind::InContext,
                         detail::fill(template_pattern(SectionKind::InContext),
                                      {{"count", std::to_string(examples.size())},
                                       {"examples", lines}})};
}

// The error slot is a quoted message when the device produced one and the
// bare word null when it stayed silent.
inline PromptSection build_feedback_section(const FeedbackRecord& feedback) {
    std::string error = feedback.error_message ? "\"" + *feedback.error_message + "\""
                                               : std::string("null");
    return {SectionKind::Feedback,
            detail::fill(template_pattern(SectionKind::Feedback),
                         {{"content", feedback.failed_input}, {"error", error}})};
}

inline PromptDocument make_generation_document(const GuiEntityBundle& bundle,
                                               const std::vector<ExampleRecord>& examples) {
    PromptDocument doc;
    if (auto icl = build_icl_section(examples))
        doc.sections.push_back(std::move(*icl));
    doc.sections.push_back(build_app_section(bundle.app));
    doc.sections.push_back(build_page_section(bundle.page));
    doc.sections.push_back(build_input_section(bundle.input));
    doc.sections.push_back(
        {SectionKind::Query, std::string(template_pattern(SectionKind::Query))});
    doc.sections.push_back(
        {SectionKind::ExampleOutput, std::string(template_pattern(SectionKind::ExampleOutput))});
    return doc;
}

// Retry documents lead with what went wrong and carry no examples; the model
// already saw them in round one and the feedback is the new signal.
inline PromptDocument make_feedback_document(const GuiEntityBundle& bundle,
                                             const FeedbackRecord& feedback) {
    PromptDocument doc;
    doc.sections.push_back(build_feedback_section(feedback));
    doc.sections.push_back(build_app_section(bundle.app));
    doc.sections.push_back(build_page_section(bundle.page));
    doc.sections.push_back(build_input_section(bundle.input));
    doc.sections.push_back(
        {SectionKind::FeedbackQuery, std::string(template_pattern(SectionKind::FeedbackQuery))});
    doc.sections.push_back(
        {SectionKind::ExampleOutput, std::string(template_pattern(SectionKind::ExampleOutput))});
    return doc;
}

inline std::string render(const PromptDocument& doc) {
    std::string out;
    for (size_t i = 0; i < doc.sections.size(); ++i) {
        if (i)
            out += "\n\n";
        out += doc.sections[i].text;
    }
    return out;
}

inline bool contains_section(const PromptDocument& doc, SectionKind kind) {
    for (const PromptSection& s : doc.sections)
        if (s.kind == kind)
            return true;
    return false;
}

} // namespace hintgen
