#include "hfsmbt/xml/xml_reader.hpp"

#include <cctype>

namespace hfsmbt::xml {

namespace {

bool is_name_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_' || c == ':' ||
           static_cast<unsigned char>(c) >= 0x80;
}

bool is_name_char(char c) {
    return is_name_start(c) || std::isdigit(static_cast<unsigned char>(c)) != 0 || c == '-' || c == '.';
}

void append_utf8(std::string& out, unsigned long cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

class Reader {
public:
    explicit Reader(std::string_view text) : text_(text) {}

    Element document() {
        skip_bom();
        skip_misc(true);
        if (at_end()) {
            fail("document has no root element");
        }
        if (peek() != '<') {
            fail("expected '<'");
        }
        Element root = element();
        skip_misc(false);
        if (!at_end()) {
            fail("content after the root element");
        }
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw SyntaxError(line_, col_, msg); }

    bool at_end() const { return pos_ >= text_.size(); }
    char peek(std::size_t ahead = 0) const { return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0'; }
    bool starts_with(std::string_view s) const { return text_.substr(pos_, s.size()) == s; }

    char advance() {
        const char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void advance(std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) {
            advance();
        }
    }

    void expect(char c) {
        if (at_end() || peek() != c) {
            fail(std::string("expected '") + c + "'");
        }
        advance();
    }

    void skip_ws() {
        while (!at_end() && std::isspace(static_cast<unsigned char>(peek())) != 0) {
            advance();
        }
    }

    void skip_bom() {
        if (starts_with("\xEF\xBB\xBF")) {
            pos_ += 3;
        }
    }

    void comment() {
        advance(4);
        while (!starts_with("-->")) {
            if (at_end()) {
                fail("unterminated comment");
            }
            advance();
        }
        advance(3);
    }

    // Whitespace, comments and (in the prolog) the XML declaration.
    void skip_misc(bool prolog) {
        bool first = true;
        while (true) {
            if (prolog && first && starts_with("<?xml")) {
                while (!starts_with("?>")) {
                    if (at_end()) {
                        fail("unterminated declaration");
                    }
                    advance();
                }
                advance(2);
            }
            first = false;
            skip_ws();
            if (starts_with("<!--")) {
                comment();
                continue;
            }
            if (starts_with("<?") || starts_with("<!")) {
                fail("unsupported markup");
            }
            return;
        }
    }

    std::string name() {
        if (at_end() || !is_name_start(peek())) {
            fail("expected a name");
        }
        std::string out;
        while (!at_end() && is_name_char(peek())) {
            out += advance();
        }
        return out;
    }

    void entity(std::string& out) {
        const int line = line_;
        const int col = col_;
        advance();  // &
        std::string ref;
        while (!at_end() && peek() != ';') {
            if (ref.size() > 10) {
                throw SyntaxError(line, col, "unterminated entity reference");
            }
            ref += advance();
        }
        if (at_end()) {
            throw SyntaxError(line, col, "unterminated entity reference");
        }
        advance();  // ;
        if (ref == "lt") {
            out += '<';
        } else if (ref == "gt") {
            out += '>';
        } else if (ref == "amp") {
            out += '&';
        } else if (ref == "quot") {
            out += '"';
        } else if (ref == "apos") {
            out += '\'';
        } else if (ref.size() > 1 && ref[0] == '#') {
            unsigned long cp = 0;
            try {
                std::size_t used = 0;
                const bool hex = ref[1] == 'x';
                const std::string digits = ref.substr(hex ? 2 : 1);
                cp = std::stoul(digits, &used, hex ? 16 : 10);
                if (used != digits.size() || cp == 0 || cp > 0x10FFFF) {
                    throw std::invalid_argument("range");
                }
            } catch (const std::exception&) {
                throw SyntaxError(line, col, "bad character reference &" + ref + ";");
            }
            append_utf8(out, cp);
        } else {
            throw SyntaxError(line, col, "unknown entity &" + ref + ";");
        }
    }

    std::string attribute_value() {
        if (at_end() || (peek() != '"' && peek() != '\'')) {
            fail("expected a quoted attribute value");
        }
        const char quote = advance();
        std::string out;
        while (true) {
            if (at_end()) {
                fail("unterminated attribute value");
            }
            const char c = peek();
            if (c == quote) {
                advance();
                return out;
            }
            if (c == '<') {
                fail("'<' inside attribute value");
            }
            if (c == '&') {
                entity(out);
            } else {
                out += advance();
            }
        }
    }

    Element element() {
        Element el;
        el.line = line_;
        el.column = col_;
        expect('<');
        el.name = name();
        while (true) {
            const bool had_space = !at_end() && std::isspace(static_cast<unsigned char>(peek())) != 0;
            skip_ws();
            if (at_end()) {
                fail("unterminated start tag <" + el.name + ">");
            }
            if (starts_with("/>")) {
                advance(2);
                return el;
            }
            if (peek() == '>') {
                advance();
                break;
            }
            if (!had_space) {
                fail("expected whitespace before attribute");
            }
            const int line = line_;
            const int col = col_;
            std::string key = name();
            skip_ws();
            expect('=');
            skip_ws();
            std::string value = attribute_value();
            if (el.attribute(key) != nullptr) {
                throw SyntaxError(line, col, "duplicate attribute '" + key + "'");
            }
            el.attributes.emplace_back(std::move(key), std::move(value));
        }
        // Content.
        while (true) {
            if (at_end()) {
                fail("missing </" + el.name + ">");
            }
            if (starts_with("</")) {
                advance(2);
                const int line = line_;
                const int col = col_;
                const std::string closing = name();
                if (closing != el.name) {
                    throw SyntaxError(line, col, "mismatched </" + closing + ">, expected </" + el.name + ">");
                }
                skip_ws();
                expect('>');
                return el;
            }
            if (starts_with("<!--")) {
                comment();
                continue;
            }
            if (starts_with("<!") || starts_with("<?")) {
                fail("unsupported markup");
            }
            if (peek() == '<') {
                el.children.push_back(element());
                continue;
            }
            if (std::isspace(static_cast<unsigned char>(peek())) != 0) {
                advance();
                continue;
            }
            fail("unexpected text content");
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

}  // namespace

const std::string* Element::attribute(std::string_view key) const {
    for (const auto& [k, v] : attributes) {
        if (k == key) {
            return &v;
        }
    }
    return nullptr;
}

SyntaxError::SyntaxError(int line, int column, const std::string& message)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column),
      detail_(message) {}

Element parse_document(std::string_view text) { return Reader(text).document(); }

std::string escape_attribute(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (char c : raw) {
        switch (c) {
            case '&':
                out += "&amp;";
                break;
            case '<':
                out += "&lt;";
                break;
            case '>':
                out += "&gt;";
                break;
            case '"':
                out += "&quot;";
                break;
            case '\'':
                out += "&apos;";
                break;
            default:
                out += c;
        }
    }
    return out;
}

}  // namespace hfsmbt::xml
