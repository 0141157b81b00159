#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "hintgen/errors.hpp"
#include "hintgen/vh.hpp"

// Three-level GUI entity extraction: app-level, page-level and
// input-component-level information assembled into one bundle.

namespace hintgen {

struct AppInfo {
    std::string app_name;
    std::vector<std::string> activities;
};

struct PageInfo {
    std::string activity_name;
    std::vector<std::string> components; // top-to-bottom, left-to-right
    std::vector<std::string> upper;
    std::vector<std::string> lower;
};

struct InputComponentInfo {
    std::string input_label;
    std::vector<std::string> nearby_labels; // parent first, then siblings
    NodePath node_path;                     // provenance
    std::string existing_hint;              // verbatim, may be empty
};

struct GuiEntityBundle {
    AppInfo app;
    PageInfo page;
    InputComponentInfo input;
    std::vector<std::string> warnings;
};

// Prompt budget: at most this many nearby labels, truncated in document order.
inline constexpr size_t kNearbyLabelCap = 12;

inline AppInfo app_info_from(const AppManifest& manifest) {
    return AppInfo{manifest.app_name, manifest.activity_names};
}

inline PageInfo extract_page_info(const ViewHierarchy& vh) {
    if (vh.root.bounds.bottom <= vh.root.bounds.top)
        throw DegenerateBounds("root bounds have non-positive height");

    struct Entry {
        std::string label;
        double cy;
        double cx;
    };
    std::vector<Entry> entries;
    auto walk = [&](const UiNode& node, auto&& self) -> void {
        std::string label = display_label(node);
        if (!label.empty())
            entries.push_back({std::move(label), node.bounds.center_y(), node.bounds.center_x()});
        for (const UiNode& child : node.children)
            self(child, self);
    };
    walk(vh.root, walk);

    std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.cy != b.cy)
            return a.cy < b.cy;
        return a.cx < b.cx;
    });

    PageInfo page;
    page.activity_name = vh.activity_name;
    const double midline = (vh.root.bounds.top + vh.root.bounds.bottom) / 2.0;
    for (Entry& e : entries) {
        // Center strictly below the midline marks a component as lower;
        // midline ties stay upper.
        if (e.cy > midline)
            page.lower.push_back(e.label);
        else
            page.upper.push_back(e.label);
        page.components.push_back(std::move(e.label));
    }
    return page;
}

// Nearby scope is the parent plus direct siblings, document order, empty
// labels and the input itself excluded.
inline InputComponentInfo extract_input_info(const ViewHierarchy& vh, const NodePath& path) {
    const UiNode* node = resolve_path(vh, path);
    if (!node)
        throw BadPath("node path does not resolve");
    if (!is_text_input(*node))
        throw NotAnInput("node at path is not a text input: " + node->class_name);

    InputComponentInfo info;
    info.node_path = path;
    info.input_label = display_label(*node);
    info.existing_hint = node->hint;

    if (!path.empty()) {
        NodePath parent_path(path.begin(), path.end() - 1);
        const UiNode* parent = resolve_path(vh, parent_path);
        std::string parent_label = display_label(*parent);
        if (!parent_label.empty())
            info.nearby_labels.push_back(std::move(parent_label));
        for (size_t i = 0; i < parent->children.size(); ++i) {
            if (static_cast<int>(i) == path.back())
                continue;
            std::string label = display_label(parent->children[i]);
            if (!label.empty())
                info.nearby_labels.push_back(std::move(label));
        }
    }
    if (info.nearby_labels.size() > kNearbyLabelCap)
        info.nearby_labels.resize(kNearbyLabelCap);
    return info;
}

inline GuiEntityBundle bundle(AppInfo app, PageInfo page, InputComponentInfo input) {
    GuiEntityBundle b{std::move(app), std::move(page), std::move(input), {}};
    if (!b.app.activities.empty() && !b.page.activity_name.empty()) {
        bool known = std::find(b.app.activities.begin(), b.app.activities.end(),
                               b.page.activity_name) != b.app.activities.end();
        if (!known)
            b.warnings.push_back("activity '" + b.page.activity_name +
                                 "' is not declared by the app manifest");
    }
    return b;
}

} // namespace hintgen
