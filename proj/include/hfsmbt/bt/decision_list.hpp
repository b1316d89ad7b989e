#pragma once

/// @file decision_list.hpp
/// @brief Flattening of memoryless trees into prioritized guarded decisions,
/// and goal-driven construction by backchaining.
///
/// A memoryless tree (reactive composites, conditions, actions) decides one
/// tick purely from what its leaves report. to_decision_list() enumerates
/// every consistent root-to-outcome route in priority order. A guard is a
/// conjunction over condition values and action outcomes; actions not
/// mentioned in a guard are assumed still running, which is the usual case
/// when reading the list as an if/elif/else chain.

#include <map>
#include <string>
#include <vector>

#include "hfsmbt/bt/node.hpp"

namespace hfsmbt::bt {

struct Literal {
    enum class Atom { Condition, Action };

    Atom atom = Atom::Condition;
    std::string id;
    /// Condition literals: required truth value.
    bool value = true;
    /// Action literals: required tick result (Success, Failure or Running).
    NodeStatus outcome = NodeStatus::Running;

    static Literal condition(std::string id, bool value) {
        return {Atom::Condition, std::move(id), value, NodeStatus::Running};
    }
    static Literal action(std::string id, NodeStatus outcome) {
        return {Atom::Action, std::move(id), true, outcome};
    }

    friend bool operator==(const Literal&, const Literal&) = default;
};

struct Decision {
    enum class Kind { Run, Succeed, Fail };

    std::vector<Literal> guard;
    Kind kind = Kind::Fail;
    /// Action left Running by the tick (Kind::Run only).
    std::string action;

    [[nodiscard]] std::string to_string() const;
};

using DecisionList = std::vector<Decision>;

/// Throws BtError(NotNormalizable) naming the first offending node kind.
DecisionList to_decision_list(const BtNode& tree);

/// Leaf values for one evaluation. Missing action entries mean Running;
/// missing condition entries mean false.
struct Valuation {
    std::map<std::string, bool> conditions;
    std::map<std::string, NodeStatus> actions;
};

bool holds(const Literal& literal, const Valuation& valuation);

/// First decision whose guard holds. Throws std::logic_error if none does
/// (impossible for lists produced by to_decision_list).
const Decision& evaluate(const DecisionList& list, const Valuation& valuation);

/// Distinct condition ids in priority (left-to-right) order.
std::vector<std::string> condition_ids(const BtNode& tree);
std::vector<std::string> action_ids(const BtNode& tree);

/// Fallback(goal, achieving): succeeds immediately when the goal already
/// holds, otherwise runs the subtree that achieves it. @p goal_condition must
/// contain only conditions (BtError InvalidTree otherwise).
BtNode backchain(BtNode goal_condition, BtNode achieving_subtree);

}  // namespace hfsmbt::bt
