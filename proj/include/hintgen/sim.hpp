#pragma once

#include <cstdlib>
#include <fstream>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hintgen/detail/text.hpp"
#include "hintgen/errors.hpp"
#include "hintgen/vh.hpp"

// A declarative stand-in for a device: screens described in a JSON spec,
// rendered as view hierarchies, with per-field validators that either
// transition to the next screen or raise an error popup. Everything is
// synchronous and deterministic so validation runs offline.

namespace hintgen::sim {

enum class ValidatorKind { NonEmpty, Pattern, OneOf, Range };

struct Validator {
    ValidatorKind kind = ValidatorKind::NonEmpty;
    std::string pattern;        // Pattern: must match the whole string
    std::vector<std::string> options; // OneOf: exact, case-sensitive
    double min = 0.0, max = 0.0;      // Range: inclusive numeric bounds

    bool accepts(const std::string& text) const {
        switch (kind) {
        case ValidatorKind::NonEmpty:
            return !hintgen::detail::trim_view(text).empty();
        case ValidatorKind::Pattern:
            return std::regex_match(text, std::regex(pattern));
        case ValidatorKind::OneOf:
            for (const std::string& option : options)
                if (text == option)
                    return true;
            return false;
        case ValidatorKind::Range: {
            std::string trimmed = hintgen::detail::trim(text);
            if (trimmed.empty())
                return false;
            char* end = nullptr;
            double value = std::strtod(trimmed.c_str(), &end);
            if (end != trimmed.c_str() + trimmed.size())
                return false;
            return value >= min && value <= max;
        }
        }
        return false;
    }
};

struct InputField {
    std::string field_id;
    std::string label;
    Validator validator;
    std::string error_message;     // empty: the field fails silently
    std::string transition_target; // screen id entered on accept
};

struct SimScreen {
    std::string screen_id;
    std::string activity_name;
    std::vector<std::string> statics; // plain labels, document order
    std::vector<InputField> inputs;
};

struct SimAppSpec {
    std::string app_name;
    std::string initial_screen;
    std::vector<SimScreen> screens;

    const SimScreen* find_screen(const std::string& id) const {
        for (const SimScreen& s : screens)
            if (s.screen_id == id)
                return &s;
        return nullptr;
    }
};

namespace detail {

using json = nlohmann::json;

inline const json& require_field(const json& j, const char* key, const std::string& path) {
    if (!j.is_object() || !j.contains(key))
        throw SchemaError(path + "." + key + ": missing");
    return j.at(key);
}

inline std::string require_string(const json& j, const char* key, const std::string& path,
                                  bool allow_empty = false) {
    const json& v = require_field(j, key, path);
    if (!v.is_string())
        throw SchemaError(path + "." + key + ": expected string");
    std::string s = v.get<std::string>();
    if (!allow_empty && s.empty())
        throw SchemaError(path + "." + key + ": must not be empty");
    return s;
}

inline Validator parse_validator(const json& j, const std::string& path) {
    Validator v;
    std::string kind = require_string(j, "kind", path);
    if (kind == "nonempty") {
        v.kind = ValidatorKind::NonEmpty;
    } else if (kind == "pattern") {
        v.kind = ValidatorKind::Pattern;
        v.pattern = require_string(j, "pattern", path, /*allow_empty=*/true);
        try {
            std::regex probe(v.pattern);
        } catch (const std::regex_error& e) {
            throw SchemaError(path + ".pattern: " + e.what());
        }
    } else if (kind == "one_of") {
        v.kind = ValidatorKind::OneOf;
        const json& options = require_field(j, "options", path);
        if (!options.is_array() || options.empty())
            throw SchemaError(path + ".options: expected non-empty array");
        for (const json& o : options) {
            if (!o.is_string())
                throw SchemaError(path + ".options: expected strings");
            v.options.push_back(o.get<std::string>());
        }
    } else if (kind == "range") {
        v.kind = ValidatorKind::Range;
        const json& lo = require_field(j, "min", path);
        const json& hi = require_field(j, "max", path);
        if (!lo.is_number() || !hi.is_number())
            throw SchemaError(path + ".min/max: expected numbers");
        v.min = lo.get<double>();
        v.max = hi.get<double>();
        if (v.min > v.max)
            throw SchemaError(path + ": min exceeds max");
    } else {
        throw SchemaError(path + ".kind: unknown validator kind '" + kind + "'");
    }
    return v;
}

} // namespace detail

// Parses and cross-checks a spec document; any structural problem raises
// SchemaError naming the offending field by path.
inline SimAppSpec load_sim_app(const std::string& spec_text) {
    detail::json root;
    try {
        root = detail::json::parse(spec_text);
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("spec is not valid JSON: ") + e.what());
    }
    if (!root.is_object())
        throw SchemaError("spec root: expected object");
    const detail::json& version = detail::require_field(root, "version", "spec");
    if (!version.is_number_integer() || version.get<int>() != 1)
        throw SchemaError("spec.version: expected 1");

    SimAppSpec spec;
    spec.app_name = detail::require_string(root, "app_name", "spec");
    spec.initial_screen = detail::require_string(root, "initial_screen", "spec");

    const detail::json& screens = detail::require_field(root, "screens", "spec");
    if (!screens.is_array() || screens.empty())
        throw SchemaError("screens: expected non-empty array");

    std::set<std::string> screen_ids;
    for (size_t i = 0; i < screens.size(); ++i) {
        std::string spath = "screens[" + std::to_string(i) + "]";
        const detail::json& js = screens[i];
        SimScreen screen;
        screen.screen_id = detail::require_string(js, "id", spath);
        screen.activity_name = detail::require_string(js, "activity", spath);
        if (!screen_ids.insert(screen.screen_id).second)
            throw SchemaError(spath + ".id: duplicate screen id '" + screen.screen_id + "'");
        if (js.contains("statics")) {
            const detail::json& statics = js.at("statics");
            if (!statics.is_array())
                throw SchemaError(spath + ".statics: expected array");
            for (const detail::json& s : statics) {
                if (!s.is_string())
                    throw SchemaError(spath + ".statics: expected strings");
                screen.statics.push_back(s.get<std::string>());
            }
        }
        if (js.contains("inputs")) {
            const detail::json& inputs = js.at("inputs");
            if (!inputs.is_array())
                throw SchemaError(spath + ".inputs: expected array");
            std::set<std::string> field_ids;
            for (size_t k = 0; k < inputs.size(); ++k) {
                std::string fpath = spath + ".inputs[" + std::to_string(k) + "]";
                const detail::json& jf = inputs[k];
                InputField field;
                field.field_id = detail::require_string(jf, "id", fpath);
                if (!field_ids.insert(field.field_id).second)
                    throw SchemaError(fpath + ".id: duplicate field id '" + field.field_id + "'");
                if (jf.contains("label"))
                    field.label = jf.at("label").get<std::string>();
                field.validator =
                    detail::parse_validator(detail::require_field(jf, "validator", fpath),
                                            fpath + ".validator");
                if (jf.contains("error_message"))
                    field.error_message = jf.at("error_message").get<std::string>();
                field.transition_target = detail::require_string(jf, "transition", fpath);
                screen.inputs.push_back(std::move(field));
            }
        }
        spec.screens.push_back(std::move(screen));
    }

    if (!spec.find_screen(spec.initial_screen))
        throw SchemaError("spec.initial_screen: no screen with id '" + spec.initial_screen + "'");
    for (size_t i = 0; i < spec.screens.size(); ++i)
        for (size_t k = 0; k < spec.screens[i].inputs.size(); ++k)
            if (!spec.find_screen(spec.screens[i].inputs[k].transition_target))
                throw SchemaError("screens[" + std::to_string(i) + "].inputs[" +
                                  std::to_string(k) + "].transition: no screen with id '" +
                                  spec.screens[i].inputs[k].transition_target + "'");
    return spec;
}

inline SimAppSpec load_sim_app_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open sim spec: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return load_sim_app(text);
}

struct SimState {
    std::string current_screen;
    std::optional<std::string> pending_popup;
    std::vector<std::pair<std::string, std::string>> history; // (action, fingerprint)
};

class SimDevice {
public:
    static constexpr int kScreenWidth = 1080;
    static constexpr int kScreenHeight = 1920;

    explicit SimDevice(SimAppSpec spec) : spec_(std::move(spec)) {
        state_.current_screen = spec_.initial_screen;
    }

    const SimAppSpec& spec() const { return spec_; }
    const SimState& state() const { return state_; }

    void reset() {
        state_ = SimState{};
        state_.current_screen = spec_.initial_screen;
    }

    void reset_to_activity(const std::string& activity_name) {
        for (const SimScreen& s : spec_.screens) {
            if (s.activity_name == activity_name) {
                state_ = SimState{};
                state_.current_screen = s.screen_id;
                return;
            }
        }
        throw UnknownScreen("no screen with activity '" + activity_name + "'");
    }

    // Pure render of the current state; a pending popup is included but not
    // consumed, so this is safe for fingerprinting.
    ViewHierarchy render() const {
        const SimScreen& screen = current_screen();
        ViewHierarchy vh;
        vh.activity_name = screen.activity_name;
        vh.source_path = "sim://" + spec_.app_name + "/" + screen.screen_id;

        UiNode root;
        root.class_name = "android.widget.FrameLayout";
        root.bounds = {0, 0, kScreenWidth, kScreenHeight};

        int row = 0;
        auto row_bounds = [&row]() {
            Rect r{40, 100 + row * 140, kScreenWidth - 40, 100 + row * 140 + 120};
            ++row;
            return r;
        };
        for (const std::string& label : screen.statics) {
            UiNode node;
            node.class_name = "android.widget.TextView";
            node.text = label;
            node.bounds = row_bounds();
            root.children.push_back(std::move(node));
        }
        for (const InputField& field : screen.inputs) {
            UiNode node;
            node.class_name = "android.widget.EditText";
            node.text = field.label;
            node.resource_id = "sim:id/" + field.field_id;
            node.bounds = row_bounds();
            root.children.push_back(std::move(node));
        }
        if (state_.pending_popup) {
            UiNode popup;
            popup.class_name = "android.widget.TextView";
            popup.text = *state_.pending_popup;
            popup.resource_id = "sim:id/popup";
            popup.bounds = {240, 860, 840, 1060};
            root.children.push_back(std::move(popup));
        }
        vh.root = std::move(root);
        return vh;
    }

    // A popup survives exactly one observation: the render that shows it
    // also clears it.
    ViewHierarchy current_page() {
        ViewHierarchy vh = render();
        state_.pending_popup.reset();
        return vh;
    }

    // Accept moves to the field's transition target; reject stays put and
    // arms the error popup (when the field has a message).
    bool inject_and_submit(const std::string& field_id, const std::string& text) {
        const SimScreen& screen = current_screen();
        const InputField* field = nullptr;
        for (const InputField& f : screen.inputs)
            if (f.field_id == field_id)
                field = &f;
        if (!field)
            throw UnknownField("screen '" + screen.screen_id + "' has no field '" + field_id +
                               "'");

        bool accepted = field->validator.accepts(text);
        if (accepted) {
            state_.current_screen = field->transition_target;
            state_.pending_popup.reset();
        } else if (!field->error_message.empty()) {
            state_.pending_popup = field->error_message;
        }
        state_.history.emplace_back("inject:" + field_id + ":" + text, fingerprint(render()));
        return accepted;
    }

private:
    const SimScreen& current_screen() const {
        const SimScreen* s = spec_.find_screen(state_.current_screen);
        if (!s) // unreachable for validated specs; transitions are checked at load
            throw UnknownScreen("state points at missing screen '" + state_.current_screen + "'");
        return *s;
    }

    SimAppSpec spec_;
    SimState state_;
};

namespace detail {

inline std::set<std::string> label_set(const ViewHierarchy& vh) {
    std::set<std::string> labels;
    walk(vh.root, [&](const UiNode& node) {
        std::string label = display_label(node);
        if (!label.empty())
            labels.insert(std::move(label));
    });
    return labels;
}

} // namespace detail

// True when the page really changed: different activity, or the label sets
// overlap on less than half their union. An added popup over an unchanged
// page keeps similarity high and does not count.
inline bool detect_transition(const ViewHierarchy& before, const ViewHierarchy& after) {
    if (before.activity_name != after.activity_name)
        return true;
    std::set<std::string> a = detail::label_set(before);
    std::set<std::string> b = detail::label_set(after);
    if (a.empty() && b.empty())
        return false;
    size_t intersection = 0;
    for (const std::string& label : a)
        if (b.count(label))
            ++intersection;
    size_t union_size = a.size() + b.size() - intersection;
    double jaccard = static_cast<double>(intersection) / static_cast<double>(union_size);
    return jaccard < 0.5;
}

// Text of nodes present only in `after`, compared by (class, text), in
// document order. This is how an error popup's message is recovered.
inline std::optional<std::string> diff_error_message(const ViewHierarchy& before,
                                                     const ViewHierarchy& after) {
    std::set<std::pair<std::string, std::string>> seen;
    walk(before.root, [&](const UiNode& node) { seen.insert({node.class_name, node.text}); });

    std::string combined;
    walk(after.root, [&](const UiNode& node) {
        if (node.text.empty() || seen.count({node.class_name, node.text}))
            return;
        if (!combined.empty())
            combined.push_back(' ');
        combined += node.text;
    });
    if (combined.empty())
        return std::nullopt;
    return combined;
}

// What the generation loop needs from a device. SimDeviceDriver is the only
// implementation here; a real one would shell out to a device bridge and
// honor settle_timeout while polling for the page to settle.
class DeviceDriver {
public:
    virtual ~DeviceDriver() = default;
    virtual std::string app_name() = 0;
    virtual void reset_to(const std::string& activity_name) = 0;
    virtual ViewHierarchy current_page() = 0;
    virtual void inject_and_submit(const std::string& field_id, const std::string& text,
                                   std::chrono::milliseconds settle_timeout) = 0;
};

class SimDeviceDriver : public DeviceDriver {
public:
    explicit SimDeviceDriver(SimAppSpec spec) : device_(std::move(spec)) {}

    SimDevice& device() { return device_; }

    std::string app_name() override { return device_.spec().app_name; }
    void reset_to(const std::string& activity_name) override {
        device_.reset_to_activity(activity_name);
    }
    ViewHierarchy current_page() override { return device_.current_page(); }
    void inject_and_submit(const std::string& field_id, const std::string& text,
                           std::chrono::milliseconds) override {
        device_.inject_and_submit(field_id, text); // synchronous, nothing to wait for
    }

private:
    SimDevice device_;
};

} // namespace hintgen::sim
