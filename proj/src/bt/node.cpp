#include "hfsmbt/bt/node.hpp"

#include <array>
#include <sstream>
#include <utility>

#include "hfsmbt/bt/error.hpp"

namespace hfsmbt::bt {

namespace {

constexpr std::array<std::pair<NodeKind, std::string_view>, 10> kKindNames{{
    {NodeKind::Action, "Action"},
    {NodeKind::Condition, "Condition"},
    {NodeKind::Sequence, "Sequence"},
    {NodeKind::ReactiveSequence, "ReactiveSequence"},
    {NodeKind::Fallback, "Fallback"},
    {NodeKind::ReactiveFallback, "ReactiveFallback"},
    {NodeKind::Parallel, "Parallel"},
    {NodeKind::Repeat, "Repeat"},
    {NodeKind::Retry, "Retry"},
    {NodeKind::SubTree, "SubTree"},
}};

void collect_running(const BtNode& node, const std::string& prefix, std::vector<std::string>& out) {
    const std::string path = prefix.empty() ? node.name() : prefix + "/" + node.name();
    if (node.status() != NodeStatus::Running) {
        return;
    }
    if (is_leaf(node.kind())) {
        out.push_back(path);
        return;
    }
    for (const auto& child : node.children()) {
        collect_running(child, path, out);
    }
}

void describe_into(const BtNode& node, int depth, std::ostringstream& out) {
    out << std::string(static_cast<std::size_t>(depth) * 2, ' ') << to_string(node.kind());
    if (!node.id().empty()) {
        out << ' ' << node.id();
    }
    if (node.explicit_name()) {
        out << " \"" << *node.explicit_name() << '"';
    }
    if (node.kind() == NodeKind::Parallel || is_decorator(node.kind())) {
        out << " [" << node.param() << ']';
    }
    out << " <" << to_string(node.status()) << ">\n";
    for (const auto& child : node.children()) {
        describe_into(child, depth + 1, out);
    }
}

}  // namespace

std::string_view to_string(NodeKind kind) {
    for (const auto& [k, name] : kKindNames) {
        if (k == kind) {
            return name;
        }
    }
    return "?";
}

std::optional<NodeKind> node_kind_from_string(std::string_view name) {
    for (const auto& [k, n] : kKindNames) {
        if (n == name) {
            return k;
        }
    }
    return std::nullopt;
}

PortValue PortValue::parse(std::string_view attr) {
    if (attr.size() >= 2 && attr.front() == '{' && attr.back() == '}') {
        return key(std::string(attr.substr(1, attr.size() - 2)));
    }
    return literal(std::string(attr));
}

std::string PortValue::to_attribute() const { return is_key ? "{" + text + "}" : text; }

BtNode BtNode::make(NodeKind kind, std::string id, std::vector<BtNode> children, PortMap ports, int param,
                    std::optional<std::string> name) {
    const auto kind_name = std::string(to_string(kind));
    if (is_leaf(kind)) {
        if (id.empty()) {
            throw BtError(BtErrc::InvalidTree, kind_name, "leaf without id");
        }
        if (!children.empty()) {
            throw BtError(BtErrc::InvalidTree, id, "leaves have no children");
        }
        param = 0;
    } else if (is_decorator(kind)) {
        if (children.size() != 1) {
            throw BtError(BtErrc::InvalidTree, kind_name, "decorators have exactly one child");
        }
        if (param != kInfinite && param < 1) {
            throw BtError(BtErrc::InvalidTree, kind_name, "count must be >= 1 or -1 (infinite)");
        }
    } else if (kind == NodeKind::SubTree) {
        if (id.empty()) {
            throw BtError(BtErrc::InvalidTree, kind_name, "subtree without tree id");
        }
        if (children.size() > 1) {
            throw BtError(BtErrc::InvalidTree, id, "subtree resolves to a single tree");
        }
        param = 0;
    } else {
        if (children.empty()) {
            throw BtError(BtErrc::InvalidTree, kind_name, "composites need at least one child");
        }
        if (kind == NodeKind::Parallel) {
            if (param < 1 || param > static_cast<int>(children.size())) {
                throw BtError(BtErrc::InvalidThreshold, kind_name,
                              "success_threshold " + std::to_string(param) + " with " +
                                  std::to_string(children.size()) + " children");
            }
        } else {
            param = 0;
        }
    }
    if (!is_leaf(kind) && kind != NodeKind::SubTree) {
        id.clear();
        ports.clear();
    }

    BtNode node;
    node.kind_ = kind;
    node.id_ = std::move(id);
    node.name_ = std::move(name);
    node.children_ = std::move(children);
    node.ports_ = std::move(ports);
    node.param_ = param;
    return node;
}

BtNode BtNode::action(std::string id, PortMap ports, std::optional<std::string> name) {
    return make(NodeKind::Action, std::move(id), {}, std::move(ports), 0, std::move(name));
}

BtNode BtNode::condition(std::string id, PortMap ports, std::optional<std::string> name) {
    return make(NodeKind::Condition, std::move(id), {}, std::move(ports), 0, std::move(name));
}

BtNode BtNode::sequence(std::vector<BtNode> children, std::optional<std::string> name) {
    return make(NodeKind::Sequence, {}, std::move(children), {}, 0, std::move(name));
}

BtNode BtNode::reactive_sequence(std::vector<BtNode> children, std::optional<std::string> name) {
    return make(NodeKind::ReactiveSequence, {}, std::move(children), {}, 0, std::move(name));
}

BtNode BtNode::fallback(std::vector<BtNode> children, std::optional<std::string> name) {
    return make(NodeKind::Fallback, {}, std::move(children), {}, 0, std::move(name));
}

BtNode BtNode::reactive_fallback(std::vector<BtNode> children, std::optional<std::string> name) {
    return make(NodeKind::ReactiveFallback, {}, std::move(children), {}, 0, std::move(name));
}

BtNode BtNode::parallel(int success_threshold, std::vector<BtNode> children, std::optional<std::string> name) {
    return make(NodeKind::Parallel, {}, std::move(children), {}, success_threshold, std::move(name));
}

BtNode BtNode::repeat(int num_cycles, BtNode child, std::optional<std::string> name) {
    std::vector<BtNode> children;
    children.push_back(std::move(child));
    return make(NodeKind::Repeat, {}, std::move(children), {}, num_cycles, std::move(name));
}

BtNode BtNode::retry(int num_attempts, BtNode child, std::optional<std::string> name) {
    std::vector<BtNode> children;
    children.push_back(std::move(child));
    return make(NodeKind::Retry, {}, std::move(children), {}, num_attempts, std::move(name));
}

BtNode BtNode::subtree(std::string tree_id, PortMap remaps, std::optional<std::string> name) {
    return make(NodeKind::SubTree, std::move(tree_id), {}, std::move(remaps), 0, std::move(name));
}

std::string BtNode::name() const {
    if (name_) {
        return *name_;
    }
    if (!id_.empty()) {
        return id_;
    }
    return std::string(to_string(kind_));
}

void BtNode::attach_subtree(BtNode tree) {
    if (kind_ != NodeKind::SubTree) {
        throw BtError(BtErrc::InvalidTree, name(), "attach_subtree on a non-SubTree node");
    }
    children_.clear();
    children_.push_back(std::move(tree));
}

bool BtNode::structurally_equal(const BtNode& other) const {
    if (kind_ != other.kind_ || id_ != other.id_ || name_ != other.name_ || ports_ != other.ports_ ||
        param_ != other.param_ || children_.size() != other.children_.size()) {
        return false;
    }
    for (std::size_t i = 0; i < children_.size(); ++i) {
        if (!children_[i].structurally_equal(other.children_[i])) {
            return false;
        }
    }
    return true;
}

std::size_t BtNode::size() const {
    std::size_t n = 1;
    for (const auto& c : children_) {
        n += c.size();
    }
    return n;
}

std::vector<std::string> running_leaf_paths(const BtNode& root) {
    std::vector<std::string> out;
    collect_running(root, "", out);
    return out;
}

std::string describe(const BtNode& root) {
    std::ostringstream out;
    describe_into(root, 0, out);
    return out.str();
}

}  // namespace hfsmbt::bt
