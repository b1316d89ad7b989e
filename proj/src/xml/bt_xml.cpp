#include "hfsmbt/xml/bt_xml.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "hfsmbt/bt/error.hpp"
#include "hfsmbt/xml/xml_reader.hpp"

namespace hfsmbt::xml {

using bt::BtNode;
using bt::NodeKind;

namespace {

struct SubTreeRef {
    std::string from_tree;
    std::string target;
    int line = 0;
    int column = 0;
};

[[noreturn]] void fail_at(XmlErrc code, const Element& el, const std::string& detail) {
    throw BtXmlError(code, el.line, el.column, detail);
}

int parse_int_attribute(const Element& el, const std::string& key) {
    const std::string* raw = el.attribute(key);
    if (raw == nullptr) {
        fail_at(XmlErrc::MissingAttribute, el, "<" + el.name + "> requires " + key);
    }
    int value = 0;
    auto [ptr, ec] = std::from_chars(raw->data(), raw->data() + raw->size(), value);
    if (ec != std::errc{} || ptr != raw->data() + raw->size()) {
        fail_at(XmlErrc::BadAttribute, el, key + "=\"" + *raw + "\" is not an integer");
    }
    return value;
}

class DocumentParser {
public:
    BtNode node(const Element& el, const std::string& tree_id) {
        const auto kind = bt::node_kind_from_string(el.name);
        if (!kind) {
            fail_at(XmlErrc::UnknownElement, el, "unknown element <" + el.name + ">");
        }
        std::optional<std::string> name;
        if (const auto* n = el.attribute("name")) {
            name = *n;
        }

        if (bt::is_leaf(*kind) || *kind == NodeKind::SubTree) {
            const std::string* id = el.attribute("ID");
            if (id == nullptr) {
                fail_at(XmlErrc::MissingAttribute, el, "<" + el.name + "> requires ID");
            }
            if (id->empty()) {
                fail_at(XmlErrc::BadAttribute, el, "empty ID");
            }
            if (!el.children.empty()) {
                fail_at(XmlErrc::BadStructure, el, "<" + el.name + "> cannot have children");
            }
            bt::PortMap ports;
            for (const auto& [key, value] : el.attributes) {
                if (key != "ID" && key != "name") {
                    ports.emplace(key, bt::PortValue::parse(value));
                }
            }
            if (*kind == NodeKind::SubTree) {
                refs.push_back(SubTreeRef{tree_id, *id, el.line, el.column});
            }
            return BtNode::make(*kind, *id, {}, std::move(ports), 0, std::move(name));
        }

        std::string param_key;
        if (*kind == NodeKind::Parallel) {
            param_key = "success_threshold";
        } else if (*kind == NodeKind::Repeat) {
            param_key = "num_cycles";
        } else if (*kind == NodeKind::Retry) {
            param_key = "num_attempts";
        }
        for (const auto& [key, _] : el.attributes) {
            if (key != "name" && key != param_key) {
                fail_at(XmlErrc::BadAttribute, el, "unexpected attribute " + key + " on <" + el.name + ">");
            }
        }
        const int param = param_key.empty() ? 0 : parse_int_attribute(el, param_key);

        std::vector<BtNode> children;
        children.reserve(el.children.size());
        for (const auto& child : el.children) {
            children.push_back(node(child, tree_id));
        }
        if (bt::is_decorator(*kind)) {
            if (children.size() != 1) {
                fail_at(XmlErrc::BadStructure, el, "<" + el.name + "> needs exactly one child");
            }
            if (param != bt::kInfinite && param < 1) {
                fail_at(XmlErrc::BadAttribute, el, param_key + " must be >= 1 or -1");
            }
        } else if (children.empty()) {
            fail_at(XmlErrc::BadStructure, el, "<" + el.name + "> needs at least one child");
        }
        if (*kind == NodeKind::Parallel && (param < 1 || param > static_cast<int>(children.size()))) {
            fail_at(XmlErrc::BadThreshold, el,
                    "success_threshold=" + std::to_string(param) + " with " + std::to_string(children.size()) +
                        " children");
        }
        return BtNode::make(*kind, {}, std::move(children), {}, param, std::move(name));
    }

    std::vector<SubTreeRef> refs;
};

void collect_refs(const BtNode& node, std::vector<std::string>& out) {
    if (node.kind() == NodeKind::SubTree) {
        out.push_back(node.id());
    }
    for (const auto& child : node.children()) {
        if (node.kind() != NodeKind::SubTree) {
            collect_refs(child, out);
        }
    }
}

const BtNode* lookup_tree(const BtDocument* doc, const TreeLookup& known, const std::string& id) {
    if (doc != nullptr) {
        if (const BtNode* t = doc->find(id)) {
            return t;
        }
    }
    return known ? known(id) : nullptr;
}

// Depth-first search over subtree references starting at @p id.
void check_acyclic(const std::string& id, const BtDocument* doc, const TreeLookup& known,
                   std::vector<std::string>& stack, std::set<std::string>& done) {
    if (done.contains(id)) {
        return;
    }
    if (auto it = std::find(stack.begin(), stack.end(), id); it != stack.end()) {
        std::string path;
        for (; it != stack.end(); ++it) {
            path += *it + " -> ";
        }
        throw BtXmlError(XmlErrc::SubTreeCycle, 0, 0, path + id);
    }
    const BtNode* tree = lookup_tree(doc, known, id);
    if (tree == nullptr) {
        return;
    }
    stack.push_back(id);
    std::vector<std::string> refs;
    collect_refs(*tree, refs);
    for (const auto& r : refs) {
        check_acyclic(r, doc, known, stack, done);
    }
    stack.pop_back();
    done.insert(id);
}

void write_node(std::ostringstream& out, const BtNode& node, int depth) {
    const std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
    out << indent << '<' << bt::to_string(node.kind());
    if (bt::is_leaf(node.kind()) || node.kind() == NodeKind::SubTree) {
        out << " ID=\"" << escape_attribute(node.id()) << '"';
    }
    if (node.explicit_name()) {
        out << " name=\"" << escape_attribute(*node.explicit_name()) << '"';
    }
    switch (node.kind()) {
        case NodeKind::Parallel:
            out << " success_threshold=\"" << node.param() << '"';
            break;
        case NodeKind::Repeat:
            out << " num_cycles=\"" << node.param() << '"';
            break;
        case NodeKind::Retry:
            out << " num_attempts=\"" << node.param() << '"';
            break;
        default:
            break;
    }
    for (const auto& [port, value] : node.ports()) {
        out << ' ' << port << "=\"" << escape_attribute(value.to_attribute()) << '"';
    }
    // Resolved subtrees are written as references only.
    if (bt::is_leaf(node.kind()) || node.kind() == NodeKind::SubTree) {
        out << "/>\n";
        return;
    }
    out << ">\n";
    for (const auto& child : node.children()) {
        write_node(out, child, depth + 1);
    }
    out << indent << "</" << bt::to_string(node.kind()) << ">\n";
}

void validate_node(const BtNode& node, const std::string& tree_id, const bt::LeafRegistry& registry,
                   const BtDocument& doc, const TreeLookup& known, std::vector<ValidationIssue>& issues) {
    const auto kind_name = std::string(bt::to_string(node.kind()));
    if (bt::is_leaf(node.kind())) {
        const bt::LeafImpl* impl = registry.find(node.id());
        if (impl == nullptr) {
            issues.push_back({"UnregisteredLeaf", node.id(), kind_name + " not in registry", tree_id});
            return;
        }
        if (impl->kind != node.kind()) {
            issues.push_back({"LeafKindMismatch", node.id(),
                              "used as " + kind_name + " but registered as " + std::string(bt::to_string(impl->kind)),
                              tree_id});
        }
        for (const auto& spec : impl->ports) {
            if (spec.direction == bt::PortDirection::Input && spec.required && !node.ports().contains(spec.name)) {
                issues.push_back({"MissingPortSource", node.id(), "input port '" + spec.name + "' has no binding",
                                  tree_id});
            }
        }
        return;
    }
    if (node.kind() == NodeKind::SubTree) {
        if (lookup_tree(&doc, known, node.id()) == nullptr) {
            issues.push_back({"DanglingSubTree", node.id(), "no tree with this ID", tree_id});
        }
        return;
    }
    if (node.kind() == NodeKind::Parallel &&
        (node.param() < 1 || node.param() > static_cast<int>(node.children().size()))) {
        issues.push_back({"BadThreshold", kind_name, "success_threshold out of range", tree_id});
    }
    if (bt::is_decorator(node.kind()) ? node.children().size() != 1 : node.children().empty()) {
        issues.push_back({"BadArity", kind_name, "wrong number of children", tree_id});
    }
    for (const auto& child : node.children()) {
        validate_node(child, tree_id, registry, doc, known, issues);
    }
}

BtNode instantiate_node(const BtNode& node, const TreeLookup& lookup, std::vector<std::string>& stack) {
    if (node.kind() == NodeKind::SubTree) {
        BtNode copy = BtNode::subtree(node.id(), node.ports(), node.explicit_name());
        if (std::find(stack.begin(), stack.end(), node.id()) != stack.end()) {
            throw BtXmlError(XmlErrc::SubTreeCycle, 0, 0, "cycle through " + node.id());
        }
        const BtNode* target = lookup ? lookup(node.id()) : nullptr;
        if (target == nullptr) {
            throw BtXmlError(XmlErrc::DanglingSubTree, 0, 0, "no tree with ID " + node.id());
        }
        stack.push_back(node.id());
        copy.attach_subtree(instantiate_node(*target, lookup, stack));
        stack.pop_back();
        return copy;
    }
    std::vector<BtNode> children;
    children.reserve(node.children().size());
    for (const auto& child : node.children()) {
        children.push_back(instantiate_node(child, lookup, stack));
    }
    return BtNode::make(node.kind(), node.id(), std::move(children), node.ports(), node.param(), node.explicit_name());
}

}  // namespace

const char* to_string(XmlErrc code) {
    switch (code) {
        case XmlErrc::XmlSyntax:
            return "XmlSyntax";
        case XmlErrc::UnknownElement:
            return "UnknownElement";
        case XmlErrc::MissingAttribute:
            return "MissingAttribute";
        case XmlErrc::BadAttribute:
            return "BadAttribute";
        case XmlErrc::BadThreshold:
            return "BadThreshold";
        case XmlErrc::BadStructure:
            return "BadStructure";
        case XmlErrc::DuplicateTree:
            return "DuplicateTree";
        case XmlErrc::DanglingSubTree:
            return "DanglingSubTree";
        case XmlErrc::SubTreeCycle:
            return "SubTreeCycle";
    }
    return "Unknown";
}

BtXmlError::BtXmlError(XmlErrc code, int line, int column, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + " at " + std::to_string(line) + ":" + std::to_string(column) +
                         ": " + detail),
      code_(code),
      line_(line),
      column_(column),
      detail_(detail) {}

const BtNode* BtDocument::find(const std::string& id) const {
    for (const auto& [tid, tree] : trees) {
        if (tid == id) {
            return &tree;
        }
    }
    return nullptr;
}

std::vector<std::string> BtDocument::tree_ids() const {
    std::vector<std::string> out;
    for (const auto& [tid, _] : trees) {
        out.push_back(tid);
    }
    return out;
}

bool BtDocument::structurally_equal(const BtDocument& other) const {
    if (main_tree_id != other.main_tree_id || trees.size() != other.trees.size()) {
        return false;
    }
    for (std::size_t i = 0; i < trees.size(); ++i) {
        if (trees[i].first != other.trees[i].first || !trees[i].second.structurally_equal(other.trees[i].second)) {
            return false;
        }
    }
    return true;
}

BtDocument parse_bt_xml(std::string_view text, const TreeLookup& known, std::string source_path) {
    Element root;
    try {
        root = parse_document(text);
    } catch (const SyntaxError& e) {
        throw BtXmlError(XmlErrc::XmlSyntax, e.line(), e.column(), e.detail());
    }
    if (root.name != "root") {
        fail_at(XmlErrc::UnknownElement, root, "document element must be <root>, found <" + root.name + ">");
    }
    const std::string* main = root.attribute("main_tree_to_execute");
    if (main == nullptr) {
        fail_at(XmlErrc::MissingAttribute, root, "<root> requires main_tree_to_execute");
    }

    BtDocument doc;
    doc.main_tree_id = *main;
    doc.source_path = std::move(source_path);
    DocumentParser parser;
    for (const auto& el : root.children) {
        if (el.name != "BehaviorTree") {
            fail_at(XmlErrc::UnknownElement, el, "expected <BehaviorTree>, found <" + el.name + ">");
        }
        const std::string* id = el.attribute("ID");
        if (id == nullptr) {
            fail_at(XmlErrc::MissingAttribute, el, "<BehaviorTree> requires ID");
        }
        if (doc.find(*id) != nullptr) {
            fail_at(XmlErrc::DuplicateTree, el, "tree " + *id + " defined twice");
        }
        if (el.children.size() != 1) {
            fail_at(XmlErrc::BadStructure, el, "<BehaviorTree> must contain exactly one node");
        }
        doc.trees.emplace_back(*id, parser.node(el.children.front(), *id));
    }
    if (doc.find(doc.main_tree_id) == nullptr) {
        fail_at(XmlErrc::MissingAttribute, root, "main tree " + doc.main_tree_id + " is not defined");
    }
    for (const auto& ref : parser.refs) {
        if (lookup_tree(&doc, known, ref.target) == nullptr) {
            throw BtXmlError(XmlErrc::DanglingSubTree, ref.line, ref.column,
                             "SubTree " + ref.target + " referenced from " + ref.from_tree + " is not defined");
        }
    }
    std::set<std::string> done;
    for (const auto& [tid, _] : doc.trees) {
        std::vector<std::string> stack;
        check_acyclic(tid, &doc, known, stack, done);
    }
    return doc;
}

BtDocument load_bt_file(const std::string& path, const TreeLookup& known) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw BtXmlError(XmlErrc::XmlSyntax, 0, 0, "cannot read " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_bt_xml(buf.str(), known, path);
}

std::string serialize(const BtDocument& doc) {
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<root main_tree_to_execute=\"" << escape_attribute(doc.main_tree_id) << "\">\n";
    for (const auto& [id, tree] : doc.trees) {
        out << "  <BehaviorTree ID=\"" << escape_attribute(id) << "\">\n";
        write_node(out, tree, 2);
        out << "  </BehaviorTree>\n";
    }
    out << "</root>\n";
    return out.str();
}

std::string ValidationIssue::to_string() const {
    std::string s = code + "(" + subject + ")";
    if (!tree_id.empty()) {
        s += " in " + tree_id;
    }
    if (!detail.empty()) {
        s += ": " + detail;
    }
    return s;
}

std::vector<ValidationIssue> validate(const BtDocument& doc, const bt::LeafRegistry& registry,
                                      const TreeLookup& known) {
    std::vector<ValidationIssue> issues;
    if (doc.find(doc.main_tree_id) == nullptr) {
        issues.push_back({"MissingMainTree", doc.main_tree_id, "main tree is not defined", {}});
    }
    for (const auto& [id, tree] : doc.trees) {
        validate_node(tree, id, registry, doc, known, issues);
    }
    try {
        std::set<std::string> done;
        for (const auto& [id, _] : doc.trees) {
            std::vector<std::string> stack;
            check_acyclic(id, &doc, known, stack, done);
        }
    } catch (const BtXmlError& e) {
        issues.push_back({to_string(e.code()), doc.main_tree_id, e.detail(), {}});
    }
    return issues;
}

std::vector<ValidationIssue> validate_xml(std::string_view text, const bt::LeafRegistry& registry,
                                          const TreeLookup& known) {
    try {
        return validate(parse_bt_xml(text, known), registry, known);
    } catch (const BtXmlError& e) {
        return {ValidationIssue{to_string(e.code()), std::to_string(e.line()) + ":" + std::to_string(e.column()),
                                e.detail(),
                                {}}};
    }
}

BtNode instantiate(const std::string& id, const TreeLookup& lookup) {
    const BtNode* root = lookup ? lookup(id) : nullptr;
    if (root == nullptr) {
        throw BtXmlError(XmlErrc::DanglingSubTree, 0, 0, "no tree with ID " + id);
    }
    std::vector<std::string> stack{id};
    return instantiate_node(*root, lookup, stack);
}

}  // namespace hfsmbt::xml
