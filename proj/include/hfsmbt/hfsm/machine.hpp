#pragma once

/// @file machine.hpp
/// @brief Hierarchical state machine; itself a State so machines nest.

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hfsmbt/hfsm/state.hpp"

namespace hfsmbt::hfsm {

struct Transition {
    /// A state of this machine or one of the machine's own outcomes.
    std::string target;
    AutonomyLevel required = AutonomyLevel::Off;
};

class StateMachine : public State {
public:
    StateMachine(std::string name, std::vector<std::string> outcomes, std::vector<std::string> input_keys = {},
                 std::vector<std::string> output_keys = {});

    /// The first state added is the initial state unless set_initial() is used.
    State& add_state(std::unique_ptr<State> state, std::map<std::string, Transition> transitions, Remaps remaps = {});
    void set_initial(const std::string& name);

    /// Checks totality and targets, recursively. Throws HfsmError(InvalidMachine).
    void validate() const;

    [[nodiscard]] const std::string& initial() const { return initial_; }
    [[nodiscard]] std::vector<std::string> state_names() const;
    [[nodiscard]] State* find(const std::string& name);
    [[nodiscard]] const std::map<std::string, Transition>& transitions(const std::string& name) const;

    void on_enter(StateContext& ctx) override;
    /// Runs one cycle of the active child.
    std::optional<std::string> execute(StateContext& ctx) override;
    void on_exit(StateContext& ctx) override;
    void on_preempt(StateContext& ctx) override;
    [[nodiscard]] bool is_machine() const override { return true; }

    /// Paths of the active states, outermost first (this machine excluded).
    void active_paths(std::vector<std::string>& out) const;

    /// Records an operator confirm / force for an active state named by name
    /// or full path anywhere below this machine. Throws HfsmError(NotActive,
    /// UndeclaredOutcome).
    void confirm(const std::string& state, const std::string& outcome);
    void force(const std::string& state, const std::string& outcome);

private:
    struct Entry {
        std::unique_ptr<State> state;
        std::map<std::string, Transition> transitions;
        Remaps remaps;
    };

    enum class Mark { Confirm, Force };
    void mark(const std::string& state, const std::string& outcome, Mark m);
    [[nodiscard]] std::string child_path(const std::string& child) const { return path_ + "/" + child; }
    void enter_child(const std::string& name, StateContext& ctx);
    void exit_child(StateContext& ctx, bool preempt);
    UserDataView child_view(Entry& e, StateContext& ctx);

    std::vector<std::string> order_;
    std::map<std::string, Entry> states_;
    std::string initial_;

    // Runtime.
    std::string path_;
    std::optional<std::string> active_;
    std::optional<std::string> pending_;
    std::optional<std::string> forced_;
    std::set<std::string> confirms_;
};

}  // namespace hfsmbt::hfsm
