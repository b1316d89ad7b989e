#pragma once

/// @file state.hpp
/// @brief State implementations and the context they execute in.

#include <chrono>
#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hfsmbt/hfsm/autonomy.hpp"
#include "hfsmbt/hfsm/events.hpp"
#include "hfsmbt/hfsm/userdata.hpp"

namespace hfsmbt::hfsm {

/// Goals handed over by provide_goal / end_goals commands.
struct GoalMailbox {
    std::deque<PoseList> pending;
    bool ended = false;
};

class Supervisor;

/// What a state sees during a lifecycle call.
struct StateContext {
    UserDataView& userdata;
    /// Full path of the state, e.g. "/Navigate/Plan".
    const std::string& path;
    Supervisor& supervisor;
};

/// Executive services available to states.
class Supervisor {
public:
    virtual ~Supervisor() = default;
    /// Fills in seq and timestamp and publishes.
    virtual void emit(MirrorEvent event) = 0;
    [[nodiscard]] virtual AutonomyLevel autonomy() const = 0;
    [[nodiscard]] virtual GoalMailbox& goals() = 0;
    [[nodiscard]] virtual std::chrono::milliseconds period() const = 0;
};

class State {
public:
    State(std::string name, std::vector<std::string> outcomes, std::vector<std::string> input_keys = {},
          std::vector<std::string> output_keys = {});
    virtual ~State() = default;
    State(const State&) = delete;
    State& operator=(const State&) = delete;

    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] const std::vector<std::string>& outcomes() const { return outcomes_; }
    [[nodiscard]] const std::vector<std::string>& input_keys() const { return inputs_; }
    [[nodiscard]] const std::vector<std::string>& output_keys() const { return outputs_; }
    [[nodiscard]] bool declares(const std::string& outcome) const;

    virtual void on_enter(StateContext&) {}
    /// Returns an outcome label, or nullopt while still running.
    virtual std::optional<std::string> execute(StateContext& ctx) = 0;
    virtual void on_exit(StateContext&) {}
    virtual void on_preempt(StateContext&) {}

    /// Nested machines report true and are driven step by step.
    [[nodiscard]] virtual bool is_machine() const { return false; }

protected:
    void add_outcome(const std::string& outcome);

private:
    std::string name_;
    std::vector<std::string> outcomes_;
    std::vector<std::string> inputs_;
    std::vector<std::string> outputs_;
};

/// State built from callables; handy for tests and simple manifests.
class LambdaState : public State {
public:
    using Step = std::function<std::optional<std::string>(StateContext&)>;
    using Hook = std::function<void(StateContext&)>;

    LambdaState(std::string name, std::vector<std::string> outcomes, Step step, std::vector<std::string> inputs = {},
                std::vector<std::string> outputs = {});

    Hook enter;
    Hook exit;
    Hook preempt;

    void on_enter(StateContext& ctx) override;
    std::optional<std::string> execute(StateContext& ctx) override { return step_(ctx); }
    void on_exit(StateContext& ctx) override;
    void on_preempt(StateContext& ctx) override;

private:
    Step step_;
};

}  // namespace hfsmbt::hfsm
