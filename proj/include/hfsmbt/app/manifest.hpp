#pragma once

/// @file manifest.hpp
/// @brief Behavior manifests: state machines described as YAML data.
///
///     behavior: Demo
///     outcomes: [finished, failed]
///     initial: Load                 # optional, defaults to the first state
///     world: ../worlds/demo20.txt   # optional; or seed: 42
///     schedule: blocks.json         # optional obstacle schedule
///     states:
///       - name: Load
///         type: bt_loader
///         files: [../behaviors/planner.xml]
///         transitions: {done: GetGoal, failed: failed}
///       - name: Plan
///         type: bt_execute_goal
///         behavior: GlobalPlan
///         goal_key: goal            # default "goal"
///         remap: {goal: target}     # state key -> enclosing machine key
///         transitions:
///           done: {target: Follow, autonomy: high}
///           failed: failed
///           canceled: GetGoal
///
/// State types and their outcomes:
///   bt_loader        done failed          (files)
///   bt_execute       done failed canceled (behavior)
///   bt_execute_goal  done failed canceled (behavior, goal_key)
///   get_goal         received finished    (output, default "goal")
///   wait             done                 (ms)
///   machine          its own `outcomes`   (states, initial)
/// Relative paths are resolved against the manifest's directory.

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hfsmbt/flexbt/bridge.hpp"
#include "hfsmbt/hfsm/machine.hpp"

namespace hfsmbt::app {

class ManifestError : public std::runtime_error {
public:
    /// @p line and @p column are 1-based; 0 when unknown.
    ManifestError(const std::string& source, int line, int column, const std::string& message);
    int line;
    int column;
};

struct StateSpec {
    std::string name;
    std::string type;
    std::map<std::string, hfsm::Transition> transitions;
    hfsm::Remaps remaps;
    std::vector<std::string> files;
    std::string behavior;
    std::string goal_key = "goal";
    std::string output = "goal";
    int wait_ms = 0;
    std::vector<std::string> outcomes;
    std::vector<StateSpec> states;
    std::string initial;
    int line = 0;
    int column = 0;
};

struct Manifest {
    std::string source;
    /// Root machine (type "machine").
    StateSpec root;
    std::optional<std::string> world;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> schedule;
};

/// Throws ManifestError.
Manifest parse_manifest(const std::string& text, const std::string& source, const std::string& base_dir);
Manifest load_manifest(const std::string& path);

/// Builds the machine; bridge states use @p bridge for host, port and timeout.
std::unique_ptr<hfsm::StateMachine> build_machine(const Manifest& m, const flexbt::BridgeConfig& bridge);

}  // namespace hfsmbt::app
