#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hintgen/detail/text.hpp"
#include "hintgen/detail/xml.hpp"
#include "hintgen/errors.hpp"

// Typed GUI trees parsed from UIAutomator-style view-hierarchy dumps and
// plain-XML Android manifests, plus the text-input predicates the rest of
// the pipeline is built on.

namespace hintgen {

struct Rect {
    int left = 0;
    int top = 0;
    int right = 0;
    int bottom = 0;

    double center_x() const { return (left + right) / 2.0; }
    double center_y() const { return (top + bottom) / 2.0; }
    bool contains(const Rect& other) const {
        return left <= other.left && top <= other.top &&
               right >= other.right && bottom >= other.bottom;
    }
    bool operator==(const Rect&) const = default;
};

struct UiNode {
    std::string class_name;
    std::string text;
    std::string resource_id;
    std::string hint;
    std::string content_desc;
    Rect bounds;
    std::vector<UiNode> children; // document order

    bool operator==(const UiNode&) const = default;
};

struct ViewHierarchy {
    std::string activity_name;
    UiNode root;
    std::string source_path; // provenance, not compared
    std::vector<std::string> warnings;
};

struct AppManifest {
    std::string app_name;
    std::vector<std::string> activity_names; // deduplicated, first occurrence order
    std::vector<std::string> warnings;
};

// Pre-order child-index path from the root; {} addresses the root itself.
using NodePath = std::vector<int>;

inline bool is_text_input(const UiNode& node) {
    return detail::icontains(node.class_name, "EditText");
}

// Non-empty hint after trimming is the only thing that counts.
inline bool has_hint(const UiNode& node) {
    return !detail::trim_view(node.hint).empty();
}

// The textual handle of a node: trimmed text if any, else the short form of
// the resource-id (suffix after the last '/'), else empty.
inline std::string display_label(const UiNode& node) {
    std::string_view text = detail::trim_view(node.text);
    if (!text.empty())
        return std::string(text);
    std::string_view id = detail::trim_view(node.resource_id);
    size_t slash = id.rfind('/');
    if (slash != std::string_view::npos)
        id = id.substr(slash + 1);
    return std::string(id);
}

namespace detail {

// Strictly "[l,t][r,b]"; anything else is MalformedBounds.
inline Rect parse_bounds(std::string_view s) {
    auto bad = [&]() -> Rect {
        throw MalformedBounds("bad bounds attribute '" + std::string(s) + "'");
    };
    size_t pos = 0;
    auto expect = [&](char c) {
        if (pos >= s.size() || s[pos] != c)
            bad();
        ++pos;
    };
    auto read_int = [&]() {
        size_t start = pos;
        if (pos < s.size() && s[pos] == '-')
            ++pos;
        size_t digits = 0;
        while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
            ++pos;
            ++digits;
        }
        if (digits == 0 || digits > 9)
            bad();
        return std::stoi(std::string(s.substr(start, pos - start)));
    };
    Rect r;
    expect('[');
    r.left = read_int();
    expect(',');
    r.top = read_int();
    expect(']');
    expect('[');
    r.right = read_int();
    expect(',');
    r.bottom = read_int();
    expect(']');
    if (pos != s.size())
        bad();
    if (r.left > r.right || r.top > r.bottom)
        throw MalformedBounds("reversed bounds '" + std::string(s) + "'");
    return r;
}

inline UiNode node_from_element(const XmlElement& el) {
    UiNode node;
    auto get = [&](std::string_view key) {
        const std::string* v = el.attr(key);
        return v ? *v : std::string();
    };
    node.class_name = get("class");
    node.text = get("text");
    node.resource_id = get("resource-id");
    node.hint = get("hint");
    node.content_desc = get("content-desc");
    if (const std::string* b = el.attr("bounds"))
        node.bounds = parse_bounds(*b);
    node.children.reserve(el.children.size());
    for (const XmlElement& child : el.children)
        node.children.push_back(node_from_element(child));
    return node;
}

inline void check_enclosure(const UiNode& parent, std::vector<std::string>& warnings) {
    for (const UiNode& child : parent.children) {
        if (!parent.bounds.contains(child.bounds))
            warnings.push_back("node '" + display_label(child) +
                               "' extends outside its parent bounds");
        check_enclosure(child, warnings);
    }
}

inline void serialize_node(const UiNode& node, std::string& out, int depth) {
    out.append(static_cast<size_t>(depth) * 2, ' ');
    out += "<node class=\"";
    xml_escape_into(out, node.class_name);
    out += "\" text=\"";
    xml_escape_into(out, node.text);
    out += "\" resource-id=\"";
    xml_escape_into(out, node.resource_id);
    out += "\" hint=\"";
    xml_escape_into(out, node.hint);
    out += "\" content-desc=\"";
    xml_escape_into(out, node.content_desc);
    out += "\" bounds=\"[" + std::to_string(node.bounds.left) + ',' +
           std::to_string(node.bounds.top) + "][" + std::to_string(node.bounds.right) +
           ',' + std::to_string(node.bounds.bottom) + "]\"";
    if (node.children.empty()) {
        out += " />\n";
        return;
    }
    out += ">\n";
    for (const UiNode& child : node.children)
        serialize_node(child, out, depth + 1);
    out.append(static_cast<size_t>(depth) * 2, ' ');
    out += "</node>\n";
}

} // namespace detail

// Dumps do not carry an activity name; the caller supplies it (empty is
// allowed and recorded as a warning).
inline ViewHierarchy parse_hierarchy(std::string_view xml_text, std::string activity_name,
                                     std::string source_path = {}) {
    detail::XmlElement doc = detail::parse_xml(xml_text);
    const detail::XmlElement* root = &doc;
    if (doc.name == "hierarchy") {
        if (doc.children.size() != 1)
            throw MalformedXml("<hierarchy> must contain exactly one root node, got " +
                               std::to_string(doc.children.size()));
        root = &doc.children.front();
    }
    ViewHierarchy vh;
    vh.activity_name = std::move(activity_name);
    vh.source_path = std::move(source_path);
    vh.root = detail::node_from_element(*root);
    if (vh.activity_name.empty())
        vh.warnings.push_back("no activity name supplied for this page");
    detail::check_enclosure(vh.root, vh.warnings);
    return vh;
}

// Writes the dump back out in the UIAutomator syntax; parse(serialize(vh))
// reproduces the tree field for field.
inline std::string serialize_hierarchy(const ViewHierarchy& vh) {
    std::string out = "<?xml version='1.0' encoding='UTF-8' standalone='yes' ?>\n"
                      "<hierarchy rotation=\"0\">\n";
    detail::serialize_node(vh.root, out, 1);
    out += "</hierarchy>\n";
    return out;
}

inline AppManifest parse_manifest(std::string_view xml_text) {
    detail::XmlElement doc = detail::parse_xml(xml_text);
    if (doc.name != "manifest")
        throw MalformedXml("expected <manifest> root, got <" + doc.name + ">");
    const std::string* package = doc.attr("package");
    if (!package || detail::trim_view(*package).empty())
        throw MissingPackage("manifest has no package attribute");

    AppManifest manifest;

    // Application label wins; fall back to the package's last segment.
    std::string label;
    for (const detail::XmlElement& child : doc.children) {
        if (child.name != "application")
            continue;
        const std::string* l = child.attr("android:label");
        if (!l)
            l = child.attr("label");
        if (l)
            label = detail::trim(*l);
    }
    if (label.empty()) {
        std::string_view pkg = detail::trim_view(*package);
        size_t dot = pkg.rfind('.');
        label = std::string(dot == std::string_view::npos ? pkg : pkg.substr(dot + 1));
    }
    manifest.app_name = label;

    // Activities anywhere under the manifest, short-form names, first
    // occurrence wins.
    auto collect = [&](const detail::XmlElement& el, auto&& self) -> void {
        if (el.name == "activity") {
            const std::string* name = el.attr("android:name");
            if (!name)
                name = el.attr("name");
            if (name) {
                std::string_view n = detail::trim_view(*name);
                size_t dot = n.rfind('.');
                std::string short_name(dot == std::string_view::npos ? n : n.substr(dot + 1));
                if (!short_name.empty()) {
                    bool seen = false;
                    for (const std::string& existing : manifest.activity_names)
                        if (existing == short_name) {
                            seen = true;
                            break;
                        }
                    if (!seen)
                        manifest.activity_names.push_back(short_name);
                }
            }
        }
        for (const detail::XmlElement& child : el.children)
            self(child, self);
    };
    collect(doc, collect);

    if (manifest.activity_names.empty())
        manifest.warnings.push_back("manifest declares no activities");
    return manifest;
}

// Pre-order visit of a subtree.
template <typename Fn>
inline void walk(const UiNode& node, Fn&& fn) {
    fn(node);
    for (const UiNode& child : node.children)
        walk(child, fn);
}

inline const UiNode* resolve_path(const ViewHierarchy& vh, const NodePath& path) {
    const UiNode* node = &vh.root;
    for (int index : path) {
        if (index < 0 || static_cast<size_t>(index) >= node->children.size())
            return nullptr;
        node = &node->children[static_cast<size_t>(index)];
    }
    return node;
}

// Paths to all EditText-matching nodes, pre-order.
inline std::vector<NodePath> find_text_inputs(const ViewHierarchy& vh) {
    std::vector<NodePath> out;
    NodePath path;
    auto walk = [&](const UiNode& node, auto&& self) -> void {
        if (is_text_input(node))
            out.push_back(path);
        for (size_t i = 0; i < node.children.size(); ++i) {
            path.push_back(static_cast<int>(i));
            self(node.children[i], self);
            path.pop_back();
        }
    };
    walk(vh.root, walk);
    return out;
}

namespace detail {

inline uint64_t structure_hash(const UiNode& node, uint64_t h) {
    h = fnv1a(node.class_name, h);
    h = fnv1a("\x1f", h);
    h = fnv1a(display_label(node), h);
    h = fnv1a("\x1e", h);
    for (const UiNode& child : node.children)
        h = structure_hash(child, h);
    return h;
}

} // namespace detail

// Digest over the activity name and the pre-order (class, display label)
// sequence. Bounds are deliberately excluded so that resized renderings of
// the same page fingerprint identically.
inline std::string fingerprint(const ViewHierarchy& vh) {
    uint64_t h = detail::fnv1a(vh.activity_name);
    h = detail::fnv1a("\x1f", h);
    return detail::to_hex(detail::structure_hash(vh.root, h));
}

// Same digest without the activity name. Dump files carry no activity field,
// so the loader derives it from the file stem; re-captures of one page saved
// under different names still collide here.
inline std::string layout_fingerprint(const ViewHierarchy& vh) {
    return detail::to_hex(detail::structure_hash(vh.root, detail::fnv1a("")));
}

} // namespace hintgen
