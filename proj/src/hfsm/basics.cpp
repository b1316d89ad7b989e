#include <algorithm>

#include "hfsmbt/hfsm/autonomy.hpp"
#include "hfsmbt/hfsm/error.hpp"
#include "hfsmbt/hfsm/state.hpp"
#include "hfsmbt/hfsm/userdata.hpp"

namespace hfsmbt::hfsm {

std::string_view to_string(AutonomyLevel level) {
    switch (level) {
        case AutonomyLevel::Off:
            return "off";
        case AutonomyLevel::Low:
            return "low";
        case AutonomyLevel::High:
            return "high";
        case AutonomyLevel::Full:
            return "full";
    }
    return "off";
}

std::optional<AutonomyLevel> parse_autonomy(std::string_view text) {
    for (auto l : {AutonomyLevel::Off, AutonomyLevel::Low, AutonomyLevel::High, AutonomyLevel::Full}) {
        if (to_string(l) == text) {
            return l;
        }
    }
    return std::nullopt;
}

const char* to_string(HfsmErrc code) {
    switch (code) {
        case HfsmErrc::UndeclaredOutcome:
            return "UndeclaredOutcome";
        case HfsmErrc::UserDataKeyMissing:
            return "UserDataKeyMissing";
        case HfsmErrc::UndeclaredUserDataKey:
            return "UndeclaredUserDataKey";
        case HfsmErrc::NotActive:
            return "NotActive";
        case HfsmErrc::InvalidMachine:
            return "InvalidMachine";
        case HfsmErrc::UnknownState:
            return "UnknownState";
    }
    return "Unknown";
}

HfsmError::HfsmError(HfsmErrc code, std::string subject, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + "(" + subject + ")" + (detail.empty() ? "" : ": " + detail)),
      code_(code),
      subject_(std::move(subject)) {}

UserDataView::UserDataView(UserData& store, std::string state, const std::vector<std::string>& inputs,
                           const std::vector<std::string>& outputs, const Remaps* remaps, const UserDataView* parent)
    : store_(store), state_(std::move(state)), inputs_(inputs), outputs_(outputs), remaps_(remaps), parent_(parent) {}

std::string UserDataView::resolve(const std::string& key) const {
    std::string k = key;
    if (remaps_ != nullptr) {
        if (auto it = remaps_->find(key); it != remaps_->end()) {
            k = it->second;
        }
    }
    return parent_ != nullptr ? parent_->resolve(k) : k;
}

const Value& UserDataView::get(const std::string& key) const {
    if (std::find(inputs_.begin(), inputs_.end(), key) == inputs_.end()) {
        throw HfsmError(HfsmErrc::UndeclaredUserDataKey, state_, "reads undeclared key '" + key + "'");
    }
    const auto it = store_.find(resolve(key));
    if (it == store_.end()) {
        throw HfsmError(HfsmErrc::UserDataKeyMissing, state_, "key '" + key + "' is not set");
    }
    return it->second;
}

std::optional<Value> UserDataView::find(const std::string& key) const {
    if (std::find(inputs_.begin(), inputs_.end(), key) == inputs_.end()) {
        throw HfsmError(HfsmErrc::UndeclaredUserDataKey, state_, "reads undeclared key '" + key + "'");
    }
    const auto it = store_.find(resolve(key));
    if (it == store_.end()) {
        return std::nullopt;
    }
    return it->second;
}

void UserDataView::set(const std::string& key, Value value) {
    if (std::find(outputs_.begin(), outputs_.end(), key) == outputs_.end()) {
        throw HfsmError(HfsmErrc::UndeclaredUserDataKey, state_, "writes undeclared key '" + key + "'");
    }
    store_[resolve(key)] = std::move(value);
}

State::State(std::string name, std::vector<std::string> outcomes, std::vector<std::string> input_keys,
             std::vector<std::string> output_keys)
    : name_(std::move(name)),
      outcomes_(std::move(outcomes)),
      inputs_(std::move(input_keys)),
      outputs_(std::move(output_keys)) {
    if (outcomes_.empty()) {
        throw HfsmError(HfsmErrc::InvalidMachine, name_, "a state needs at least one outcome");
    }
}

bool State::declares(const std::string& outcome) const {
    return std::find(outcomes_.begin(), outcomes_.end(), outcome) != outcomes_.end();
}

void State::add_outcome(const std::string& outcome) {
    if (!declares(outcome)) {
        outcomes_.push_back(outcome);
    }
}

LambdaState::LambdaState(std::string name, std::vector<std::string> outcomes, Step step,
                         std::vector<std::string> inputs, std::vector<std::string> outputs)
    : State(std::move(name), std::move(outcomes), std::move(inputs), std::move(outputs)), step_(std::move(step)) {}

void LambdaState::on_enter(StateContext& ctx) {
    if (enter) {
        enter(ctx);
    }
}

void LambdaState::on_exit(StateContext& ctx) {
    if (exit) {
        exit(ctx);
    }
}

void LambdaState::on_preempt(StateContext& ctx) {
    if (preempt) {
        preempt(ctx);
    }
}

}  // namespace hfsmbt::hfsm
