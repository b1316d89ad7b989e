#pragma once

/// @file autonomy.hpp
/// @brief Ordered autonomy levels used to gate transitions.

#include <optional>
#include <string_view>

namespace hfsmbt::hfsm {

enum class AutonomyLevel { Off = 0, Low = 1, High = 2, Full = 3 };

/// "off", "low", "high", "full".
std::string_view to_string(AutonomyLevel level);
std::optional<AutonomyLevel> parse_autonomy(std::string_view text);

enum class Gate { Allowed, Blocked };

/// Allowed iff required <= current or the operator has confirmed or forced
/// this particular transition.
constexpr Gate gate_transition(AutonomyLevel required, AutonomyLevel current, bool operator_approved) {
    return (static_cast<int>(required) <= static_cast<int>(current) || operator_approved) ? Gate::Allowed
                                                                                        : Gate::Blocked;
}

}  // namespace hfsmbt::hfsm
