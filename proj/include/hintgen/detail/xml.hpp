#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hintgen/detail/text.hpp"
#include "hintgen/errors.hpp"

// A deliberately small XML reader covering the subset emitted by UIAutomator
// dumps and plain-text Android manifests: elements, attributes, comments,
// CDATA, processing instructions and the five named entities plus numeric
// character references. Text content is validated but not retained.

namespace hintgen::detail {

struct XmlElement {
    std::string name;
    std::vector<std::pair<std::string, std::string>> attrs; // document order
    std::vector<XmlElement> children;

    const std::string* attr(std::string_view key) const {
        for (const auto& [k, v] : attrs)
            if (k == key)
                return &v;
        return nullptr;
    }
};

class XmlReader {
public:
    explicit XmlReader(std::string_view src) : src_(src) {}

    XmlElement parse_document() {
        skip_misc();
        if (eof() || peek() != '<')
            fail("expected root element");
        XmlElement root = parse_element();
        skip_misc();
        if (!eof())
            fail("trailing content after root element");
        return root;
    }

private:
    std::string_view src_;
    size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw MalformedXml("XML error at offset " + std::to_string(pos_) + ": " + msg);
    }

    bool eof() const { return pos_ >= src_.size(); }
    char peek() const { return src_[pos_]; }
    bool starts_with(std::string_view s) const { return src_.substr(pos_, s.size()) == s; }

    void skip_ws() {
        while (!eof() && is_space(peek()))
            ++pos_;
    }

    void skip_until(std::string_view terminator, const char* what) {
        size_t at = src_.find(terminator, pos_);
        if (at == std::string_view::npos)
            fail(std::string("unterminated ") + what);
        pos_ = at + terminator.size();
    }

    // Whitespace, comments, PIs and DOCTYPE between markup.
    void skip_misc() {
        for (;;) {
            skip_ws();
            if (starts_with("<!--")) {
                pos_ += 4;
                skip_until("-->", "comment");
            } else if (starts_with("<?")) {
                pos_ += 2;
                skip_until("?>", "processing instruction");
            } else if (starts_with("<!DOCTYPE")) {
                skip_until(">", "DOCTYPE");
            } else {
                return;
            }
        }
    }

    static bool is_name_start(char c) {
        return is_alnum(c) || c == '_' || c == ':';
    }
    static bool is_name_char(char c) {
        return is_alnum(c) || c == '_' || c == ':' || c == '-' || c == '.';
    }

    std::string parse_name() {
        if (eof() || !is_name_start(peek()))
            fail("expected name");
        size_t start = pos_;
        while (!eof() && is_name_char(peek()))
            ++pos_;
        return std::string(src_.substr(start, pos_ - start));
    }

    std::string decode_entities(std::string_view raw) {
        std::string out;
        out.reserve(raw.size());
        for (size_t i = 0; i < raw.size(); ++i) {
            if (raw[i] != '&') {
                out.push_back(raw[i]);
                continue;
            }
            size_t semi = raw.find(';', i + 1);
            if (semi == std::string_view::npos)
                fail("unterminated entity reference");
            std::string_view ent = raw.substr(i + 1, semi - i - 1);
            if (ent == "amp") out.push_back('&');
            else if (ent == "lt") out.push_back('<');
            else if (ent == "gt") out.push_back('>');
            else if (ent == "quot") out.push_back('"');
            else if (ent == "apos") out.push_back('\'');
            else if (!ent.empty() && ent[0] == '#') out += decode_charref(ent.substr(1));
            else fail("unknown entity &" + std::string(ent) + ";");
            i = semi;
        }
        return out;
    }

    std::string decode_charref(std::string_view digits) {
        unsigned long cp = 0;
        bool hex = !digits.empty() && (digits[0] == 'x' || digits[0] == 'X');
        std::string_view body = hex ? digits.substr(1) : digits;
        if (body.empty())
            fail("empty character reference");
        for (char c : body) {
            int d;
            if (c >= '0' && c <= '9') d = c - '0';
            else if (hex && c >= 'a' && c <= 'f') d = 10 + c - 'a';
            else if (hex && c >= 'A' && c <= 'F') d = 10 + c - 'A';
            else { fail("bad character reference"); }
            cp = cp * (hex ? 16 : 10) + static_cast<unsigned long>(d);
            if (cp > 0x10FFFF)
                fail("character reference out of range");
        }
        return encode_utf8(cp);
    }

    static std::string encode_utf8(unsigned long cp) {
        std::string out;
        if (cp < 0x80) {
            out.push_back(static_cast<char>(cp));
        } else if (cp < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else if (cp < 0x10000) {
            out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else {
            out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        }
        return out;
    }

    std::string parse_attr_value() {
        if (eof() || (peek() != '"' && peek() != '\''))
            fail("expected quoted attribute value");
        char quote = peek();
        ++pos_;
        size_t start = pos_;
        while (!eof() && peek() != quote) {
            if (peek() == '<')
                fail("'<' in attribute value");
            ++pos_;
        }
        if (eof())
            fail("unterminated attribute value");
        std::string_view raw = src_.substr(start, pos_ - start);
        ++pos_; // closing quote
        return decode_entities(raw);
    }

    XmlElement parse_element() {
        ++pos_; // '<'
        XmlElement el;
        el.name = parse_name();
        for (;;) {
            skip_ws();
            if (eof())
                fail("unterminated element <" + el.name + ">");
            if (peek() == '/') {
                ++pos_;
                if (eof() || peek() != '>')
                    fail("expected '>' after '/'");
                ++pos_;
                return el; // self-closing
            }
            if (peek() == '>') {
                ++pos_;
                parse_content(el);
                return el;
            }
            std::string key = parse_name();
            for (const auto& [k, v] : el.attrs)
                if (k == key)
                    fail("duplicate attribute '" + key + "'");
            skip_ws();
            if (eof() || peek() != '=')
                fail("expected '=' after attribute name");
            ++pos_;
            skip_ws();
            el.attrs.emplace_back(std::move(key), parse_attr_value());
        }
    }

    void parse_content(XmlElement& el) {
        for (;;) {
            // character data (not retained)
            while (!eof() && peek() != '<') {
                if (peek() == '&') {
                    size_t semi = src_.find(';', pos_);
                    if (semi == std::string_view::npos)
                        fail("unterminated entity reference");
                    pos_ = semi;
                }
                ++pos_;
            }
            if (eof())
                fail("unterminated element <" + el.name + ">");
            if (starts_with("<!--")) {
                pos_ += 4;
                skip_until("-->", "comment");
            } else if (starts_with("<![CDATA[")) {
                pos_ += 9;
                skip_until("]]>", "CDATA section");
            } else if (starts_with("<?")) {
                pos_ += 2;
                skip_until("?>", "processing instruction");
            } else if (starts_with("</")) {
                pos_ += 2;
                std::string closing = parse_name();
                if (closing != el.name)
                    fail("mismatched closing tag </" + closing + "> for <" + el.name + ">");
                skip_ws();
                if (eof() || peek() != '>')
                    fail("expected '>' in closing tag");
                ++pos_;
                return;
            } else {
                el.children.push_back(parse_element());
            }
        }
    }
};

inline XmlElement parse_xml(std::string_view text) {
    return XmlReader(text).parse_document();
}

inline void xml_escape_into(std::string& out, std::string_view value) {
    for (char c : value) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default: out.push_back(c);
        }
    }
}

} // namespace hintgen::detail
