#pragma once

/// @file bt_xml.hpp
/// @brief Behavior-tree documents: XML grammar, validation and serialization.
///
/// Grammar (a subset of the BehaviorTree.CPP v3 format):
///
///     <root main_tree_to_execute="ID">
///       <BehaviorTree ID="ID"> exactly one node element </BehaviorTree> ...
///     </root>
///
/// Node elements: Sequence, ReactiveSequence, Fallback, ReactiveFallback,
/// Parallel success_threshold="M", Repeat num_cycles="n", Retry
/// num_attempts="n" (n = -1 is infinite), Action ID="..", Condition ID="..",
/// SubTree ID="..". Every node accepts name="..". Remaining attributes of
/// leaves are ports and of SubTree are remaps; `{key}` names a blackboard key,
/// anything else is a literal. Children appear in priority order.

#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hfsmbt/bt/node.hpp"
#include "hfsmbt/bt/registry.hpp"

namespace hfsmbt::xml {

enum class XmlErrc {
    XmlSyntax,
    UnknownElement,
    MissingAttribute,
    BadAttribute,
    BadThreshold,
    BadStructure,
    DuplicateTree,
    DanglingSubTree,
    SubTreeCycle,
};

const char* to_string(XmlErrc code);

class BtXmlError : public std::runtime_error {
public:
    BtXmlError(XmlErrc code, int line, int column, const std::string& detail);

    [[nodiscard]] XmlErrc code() const noexcept { return code_; }
    [[nodiscard]] int line() const noexcept { return line_; }
    [[nodiscard]] int column() const noexcept { return column_; }
    [[nodiscard]] const std::string& detail() const noexcept { return detail_; }

private:
    XmlErrc code_;
    int line_;
    int column_;
    std::string detail_;
};

struct BtDocument {
    std::string main_tree_id;
    /// Trees in document order.
    std::vector<std::pair<std::string, bt::BtNode>> trees;
    std::string source_path;

    [[nodiscard]] const bt::BtNode* find(const std::string& id) const;
    [[nodiscard]] std::vector<std::string> tree_ids() const;
    /// Same main tree and structurally equal trees in the same order.
    [[nodiscard]] bool structurally_equal(const BtDocument& other) const;
};

/// Looks up trees loaded before this document (nullptr when unknown).
using TreeLookup = std::function<const bt::BtNode*(const std::string& id)>;

/// Parses and structurally checks a document. SubTree references must resolve
/// inside the document or through @p known; the reference graph must be
/// acyclic. Throws BtXmlError.
BtDocument parse_bt_xml(std::string_view text, const TreeLookup& known = {}, std::string source_path = {});

/// Reads and parses a file; I/O failures are reported as XmlSyntax at 0:0.
BtDocument load_bt_file(const std::string& path, const TreeLookup& known = {});

/// Canonical text: two-space indentation, attributes in the order ID, name,
/// threshold/count, then ports alphabetically. Byte-stable for equal input.
std::string serialize(const BtDocument& doc);

struct ValidationIssue {
    std::string code;
    std::string subject;
    std::string detail;
    std::string tree_id;

    [[nodiscard]] std::string to_string() const;
};

/// Checks leaf registration, leaf kinds, subtree references and that every
/// required input port has a binding. Issues are returned, never thrown.
std::vector<ValidationIssue> validate(const BtDocument& doc, const bt::LeafRegistry& registry,
                                      const TreeLookup& known = {});

/// Parses @p text and validates it; a parse error becomes a single issue.
std::vector<ValidationIssue> validate_xml(std::string_view text, const bt::LeafRegistry& registry,
                                          const TreeLookup& known = {});

/// Deep copy of tree @p id with every SubTree bound to a copy of its target.
/// Throws BtXmlError(DanglingSubTree / SubTreeCycle).
bt::BtNode instantiate(const std::string& id, const TreeLookup& lookup);

}  // namespace hfsmbt::xml
