#pragma once

/// @file xml_reader.hpp
/// @brief Minimal XML element reader with line/column diagnostics.
///
/// Handles the subset behavior files use: an optional declaration, comments,
/// elements, attributes (single or double quoted), the five predefined
/// entities and numeric character references. Text content other than
/// whitespace, CDATA, DOCTYPE and processing instructions after the prolog
/// are rejected.

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hfsmbt::xml {

struct Element {
    std::string name;
    std::vector<std::pair<std::string, std::string>> attributes;
    std::vector<Element> children;
    int line = 0;
    int column = 0;

    [[nodiscard]] const std::string* attribute(std::string_view key) const;
};

class SyntaxError : public std::runtime_error {
public:
    SyntaxError(int line, int column, const std::string& message);

    [[nodiscard]] int line() const noexcept { return line_; }
    [[nodiscard]] int column() const noexcept { return column_; }
    [[nodiscard]] const std::string& detail() const noexcept { return detail_; }

private:
    int line_;
    int column_;
    std::string detail_;
};

/// Parses a whole document and returns its root element.
Element parse_document(std::string_view text);

/// Escapes &, <, >, " and ' for use inside a double-quoted attribute.
std::string escape_attribute(std::string_view raw);

}  // namespace hfsmbt::xml
