#include "hfsmbt/hfsm/machine.hpp"

#include "hfsmbt/hfsm/error.hpp"

namespace hfsmbt::hfsm {

StateMachine::StateMachine(std::string name, std::vector<std::string> outcomes, std::vector<std::string> input_keys,
                           std::vector<std::string> output_keys)
    : State(std::move(name), std::move(outcomes), std::move(input_keys), std::move(output_keys)) {}

State& StateMachine::add_state(std::unique_ptr<State> state, std::map<std::string, Transition> transitions,
                               Remaps remaps) {
    const std::string name = state->name();
    if (name.empty() || name.find('/') != std::string::npos) {
        throw HfsmError(HfsmErrc::InvalidMachine, this->name(), "bad state name '" + name + "'");
    }
    if (states_.contains(name)) {
        throw HfsmError(HfsmErrc::InvalidMachine, this->name(), "duplicate state " + name);
    }
    order_.push_back(name);
    if (initial_.empty()) {
        initial_ = name;
    }
    auto& e = states_[name];
    e.state = std::move(state);
    e.transitions = std::move(transitions);
    e.remaps = std::move(remaps);
    return *e.state;
}

void StateMachine::set_initial(const std::string& name) { initial_ = name; }

void StateMachine::validate() const {
    if (states_.empty()) {
        throw HfsmError(HfsmErrc::InvalidMachine, name(), "machine has no states");
    }
    if (!states_.contains(initial_)) {
        throw HfsmError(HfsmErrc::InvalidMachine, name(), "initial state '" + initial_ + "' does not exist");
    }
    for (const auto& sname : order_) {
        const auto& e = states_.at(sname);
        for (const auto& outcome : e.state->outcomes()) {
            if (!e.transitions.contains(outcome)) {
                throw HfsmError(HfsmErrc::InvalidMachine, name(),
                                "no transition for (" + sname + ", " + outcome + ")");
            }
        }
        for (const auto& [outcome, t] : e.transitions) {
            if (!e.state->declares(outcome)) {
                throw HfsmError(HfsmErrc::InvalidMachine, name(),
                                "transition for undeclared outcome (" + sname + ", " + outcome + ")");
            }
            if (!states_.contains(t.target) && !declares(t.target)) {
                throw HfsmError(HfsmErrc::InvalidMachine, name(),
                                "(" + sname + ", " + outcome + ") targets unknown '" + t.target + "'");
            }
        }
        if (e.state->is_machine()) {
            static_cast<const StateMachine&>(*e.state).validate();
        }
    }
}

std::vector<std::string> StateMachine::state_names() const { return order_; }

State* StateMachine::find(const std::string& name) {
    auto it = states_.find(name);
    return it == states_.end() ? nullptr : it->second.state.get();
}

const std::map<std::string, Transition>& StateMachine::transitions(const std::string& name) const {
    auto it = states_.find(name);
    if (it == states_.end()) {
        throw HfsmError(HfsmErrc::UnknownState, name);
    }
    return it->second.transitions;
}

UserDataView StateMachine::child_view(Entry& e, StateContext& ctx) {
    return UserDataView(ctx.userdata.store(), child_path(e.state->name()), e.state->input_keys(),
                        e.state->output_keys(), &e.remaps, &ctx.userdata);
}

void StateMachine::enter_child(const std::string& name, StateContext& ctx) {
    active_ = name;
    pending_.reset();
    forced_.reset();
    confirms_.clear();
    auto& e = states_.at(name);
    const std::string path = child_path(name);
    MirrorEvent ev;
    ev.kind = EventKind::StateEntered;
    ev.state = path;
    ctx.supervisor.emit(std::move(ev));
    auto view = child_view(e, ctx);
    StateContext cctx{view, path, ctx.supervisor};
    e.state->on_enter(cctx);
}

void StateMachine::exit_child(StateContext& ctx, bool preempt) {
    if (!active_) {
        return;
    }
    auto& e = states_.at(*active_);
    const std::string path = child_path(*active_);
    auto view = child_view(e, ctx);
    StateContext cctx{view, path, ctx.supervisor};
    if (preempt) {
        e.state->on_preempt(cctx);
    } else {
        e.state->on_exit(cctx);
    }
    MirrorEvent ev;
    ev.kind = EventKind::StateExited;
    ev.state = path;
    ctx.supervisor.emit(std::move(ev));
    active_.reset();
    pending_.reset();
    forced_.reset();
    confirms_.clear();
}

void StateMachine::on_enter(StateContext& ctx) {
    path_ = ctx.path;
    active_.reset();
    enter_child(initial_, ctx);
}

std::optional<std::string> StateMachine::execute(StateContext& ctx) {
    if (!active_) {
        return std::nullopt;
    }
    auto& e = states_.at(*active_);
    const std::string path = child_path(*active_);

    std::optional<std::string> outcome;
    bool forced = false;
    if (forced_) {
        outcome = std::exchange(forced_, std::nullopt);
        forced = true;
    } else if (pending_) {
        outcome = pending_;
    } else {
        auto view = child_view(e, ctx);
        StateContext cctx{view, path, ctx.supervisor};
        outcome = e.state->execute(cctx);
        if (outcome && !e.state->declares(*outcome)) {
            throw HfsmError(HfsmErrc::UndeclaredOutcome, path, "returned '" + *outcome + "'");
        }
    }
    if (!outcome) {
        return std::nullopt;
    }

    const Transition& t = e.transitions.at(*outcome);
    bool confirmed = false;
    if (!forced) {
        const AutonomyLevel level = ctx.supervisor.autonomy();
        const bool approved = confirms_.contains(*outcome);
        if (gate_transition(t.required, level, approved) == Gate::Blocked) {
            if (!pending_) {
                pending_ = outcome;
                MirrorEvent ev;
                ev.kind = EventKind::TransitionBlocked;
                ev.state = path;
                ev.outcome = *outcome;
                ev.required_level = t.required;
                ctx.supervisor.emit(std::move(ev));
            }
            return std::nullopt;
        }
        confirmed = approved && gate_transition(t.required, level, false) == Gate::Blocked;
    }

    MirrorEvent ev;
    ev.kind = EventKind::OutcomeEmitted;
    ev.state = path;
    ev.outcome = *outcome;
    ev.forced = forced;
    ev.confirmed = confirmed;
    ctx.supervisor.emit(std::move(ev));

    const std::string target = t.target;
    exit_child(ctx, false);
    if (states_.contains(target)) {
        enter_child(target, ctx);
        return std::nullopt;
    }
    return target;
}

void StateMachine::on_exit(StateContext& ctx) { exit_child(ctx, false); }

void StateMachine::on_preempt(StateContext& ctx) { exit_child(ctx, true); }

void StateMachine::active_paths(std::vector<std::string>& out) const {
    if (!active_) {
        return;
    }
    out.push_back(child_path(*active_));
    const auto& e = states_.at(*active_);
    if (e.state->is_machine()) {
        static_cast<const StateMachine&>(*e.state).active_paths(out);
    }
}

void StateMachine::mark(const std::string& state, const std::string& outcome, Mark m) {
    if (!active_) {
        throw HfsmError(HfsmErrc::NotActive, state);
    }
    auto& e = states_.at(*active_);
    if (state == *active_ || state == child_path(*active_)) {
        if (!e.state->declares(outcome)) {
            throw HfsmError(HfsmErrc::UndeclaredOutcome, state, "'" + outcome + "' is not declared");
        }
        if (m == Mark::Force) {
            forced_ = outcome;
        } else {
            confirms_.insert(outcome);
        }
        return;
    }
    if (e.state->is_machine()) {
        static_cast<StateMachine&>(*e.state).mark(state, outcome, m);
        return;
    }
    throw HfsmError(HfsmErrc::NotActive, state);
}

void StateMachine::confirm(const std::string& state, const std::string& outcome) { mark(state, outcome, Mark::Confirm); }

void StateMachine::force(const std::string& state, const std::string& outcome) { mark(state, outcome, Mark::Force); }

}  // namespace hfsmbt::hfsm
