#include "hfsmbt/bt/decision_list.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <set>
#include <stdexcept>

#include "hfsmbt/bt/error.hpp"

namespace hfsmbt::bt {

namespace {

// A route through the tree: the literals it assumed and where it ended.
struct Route {
    std::vector<Literal> guard;
    NodeStatus result = NodeStatus::Failure;
    std::string running_action;
};

bool conflicts(const Literal& a, const Literal& b) {
    if (a.atom != b.atom || a.id != b.id) {
        return false;
    }
    return a.atom == Literal::Atom::Condition ? a.value != b.value : a.outcome != b.outcome;
}

// Conjunction of two guards, or nullopt when they contradict each other.
std::optional<std::vector<Literal>> conjoin(const std::vector<Literal>& lhs, const std::vector<Literal>& rhs) {
    std::vector<Literal> out = lhs;
    for (const auto& lit : rhs) {
        bool duplicate = false;
        for (const auto& existing : out) {
            if (conflicts(existing, lit)) {
                return std::nullopt;
            }
            duplicate = duplicate || existing == lit;
        }
        if (!duplicate) {
            out.push_back(lit);
        }
    }
    return out;
}

std::vector<Route> routes(const BtNode& node);

// Shared walk for ReactiveSequence (continue_on = Success) and
// ReactiveFallback (continue_on = Failure).
std::vector<Route> composite_routes(const BtNode& node, NodeStatus continue_on) {
    std::vector<std::vector<Route>> per_child;
    per_child.reserve(node.children().size());
    for (const auto& child : node.children()) {
        per_child.push_back(routes(child));
    }
    std::vector<Route> out;
    std::function<void(std::size_t, const std::vector<Literal>&)> expand =
        [&](std::size_t index, const std::vector<Literal>& guard) {
            for (const auto& r : per_child[index]) {
                auto joined = conjoin(guard, r.guard);
                if (!joined) {
                    continue;
                }
                if (r.result == continue_on && index + 1 < per_child.size()) {
                    expand(index + 1, *joined);
                } else {
                    out.push_back(Route{std::move(*joined), r.result, r.running_action});
                }
            }
        };
    expand(0, {});
    return out;
}

std::vector<Route> routes(const BtNode& node) {
    switch (node.kind()) {
        case NodeKind::Condition:
            return {Route{{Literal::condition(node.id(), true)}, NodeStatus::Success, {}},
                    Route{{Literal::condition(node.id(), false)}, NodeStatus::Failure, {}}};
        case NodeKind::Action:
            return {Route{{Literal::action(node.id(), NodeStatus::Success)}, NodeStatus::Success, {}},
                    Route{{Literal::action(node.id(), NodeStatus::Running)}, NodeStatus::Running, node.id()},
                    Route{{Literal::action(node.id(), NodeStatus::Failure)}, NodeStatus::Failure, {}}};
        case NodeKind::ReactiveSequence:
            return composite_routes(node, NodeStatus::Success);
        case NodeKind::ReactiveFallback:
            return composite_routes(node, NodeStatus::Failure);
        default:
            throw BtError(BtErrc::NotNormalizable, std::string(to_string(node.kind())),
                          "only reactive composites, conditions and actions can be flattened");
    }
}

void collect_ids(const BtNode& node, NodeKind kind, std::vector<std::string>& out) {
    if (node.kind() == kind && std::find(out.begin(), out.end(), node.id()) == out.end()) {
        out.push_back(node.id());
    }
    for (const auto& child : node.children()) {
        collect_ids(child, kind, out);
    }
}

bool condition_only(const BtNode& node) {
    if (node.kind() == NodeKind::Condition) {
        return true;
    }
    if (is_leaf(node.kind()) || node.kind() == NodeKind::SubTree) {
        return false;
    }
    return std::all_of(node.children().begin(), node.children().end(), condition_only);
}

std::string literal_text(const Literal& lit) {
    if (lit.atom == Literal::Atom::Condition) {
        return (lit.value ? "" : "!") + lit.id;
    }
    switch (lit.outcome) {
        case NodeStatus::Success:
            return "succeeded(" + lit.id + ")";
        case NodeStatus::Failure:
            return "failed(" + lit.id + ")";
        default:
            return "running(" + lit.id + ")";
    }
}

}  // namespace

std::string Decision::to_string() const {
    std::string out;
    // running(a) on the selected action is implied by "-> a"; leave it out.
    std::vector<std::string> parts;
    for (const auto& lit : guard) {
        if (kind == Kind::Run && lit.atom == Literal::Atom::Action && lit.id == action &&
            lit.outcome == NodeStatus::Running) {
            continue;
        }
        parts.push_back(literal_text(lit));
    }
    if (parts.empty()) {
        out = "true";
    }
    for (std::size_t i = 0; i < parts.size(); ++i) {
        out += (i == 0 ? "" : " && ") + parts[i];
    }
    out += " -> ";
    switch (kind) {
        case Kind::Run:
            out += action;
            break;
        case Kind::Succeed:
            out += "succeed";
            break;
        case Kind::Fail:
            out += "fail";
            break;
    }
    return out;
}

DecisionList to_decision_list(const BtNode& tree) {
    DecisionList list;
    for (auto& r : routes(tree)) {
        Decision d;
        d.guard = std::move(r.guard);
        switch (r.result) {
            case NodeStatus::Success:
                d.kind = Decision::Kind::Succeed;
                break;
            case NodeStatus::Running:
                d.kind = Decision::Kind::Run;
                d.action = std::move(r.running_action);
                break;
            default:
                d.kind = Decision::Kind::Fail;
                break;
        }
        list.push_back(std::move(d));
    }
    return list;
}

bool holds(const Literal& literal, const Valuation& valuation) {
    if (literal.atom == Literal::Atom::Condition) {
        auto it = valuation.conditions.find(literal.id);
        const bool value = it != valuation.conditions.end() && it->second;
        return value == literal.value;
    }
    auto it = valuation.actions.find(literal.id);
    const NodeStatus outcome = it == valuation.actions.end() ? NodeStatus::Running : it->second;
    return outcome == literal.outcome;
}

const Decision& evaluate(const DecisionList& list, const Valuation& valuation) {
    for (const auto& d : list) {
        if (std::all_of(d.guard.begin(), d.guard.end(),
                        [&](const Literal& lit) { return holds(lit, valuation); })) {
            return d;
        }
    }
    throw std::logic_error("decision list is not exhaustive");
}

std::vector<std::string> condition_ids(const BtNode& tree) {
    std::vector<std::string> out;
    collect_ids(tree, NodeKind::Condition, out);
    return out;
}

std::vector<std::string> action_ids(const BtNode& tree) {
    std::vector<std::string> out;
    collect_ids(tree, NodeKind::Action, out);
    return out;
}

BtNode backchain(BtNode goal_condition, BtNode achieving_subtree) {
    if (!condition_only(goal_condition)) {
        throw BtError(BtErrc::InvalidTree, goal_condition.name(), "backchain goal must contain only conditions");
    }
    std::vector<BtNode> children;
    children.push_back(std::move(goal_condition));
    children.push_back(std::move(achieving_subtree));
    return BtNode::fallback(std::move(children));
}

}  // namespace hfsmbt::bt
