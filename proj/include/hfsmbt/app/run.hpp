#pragma once

/// @file run.hpp
/// @brief The serve and run commands, callable in-process.

#include <chrono>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hfsmbt/hfsm/autonomy.hpp"
#include "hfsmbt/hfsm/events.hpp"
#include "hfsmbt/nav/world.hpp"

namespace hfsmbt::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
/// Port in use or server unreachable.
inline constexpr int kExitEnvironment = 2;
/// Manifest or script error.
inline constexpr int kExitManifest = 3;

inline constexpr std::uint64_t kDefaultSeed = 20221014;

struct WorldOptions {
    std::optional<std::string> world;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> schedule;
};

/// Map file if given, else a random 20x20 world from the seed.
nav::GridWorld make_world(const WorldOptions& o);

struct RunOptions {
    std::string manifest;
    std::string host = "127.0.0.1";
    /// In-process server port; 0 picks a free one.
    std::uint16_t bt_port = 0;
    /// Use a server already listening on bt_port instead of starting one.
    bool external = false;
    std::optional<std::uint16_t> mirror_port;
    /// Override the manifest's world settings.
    WorldOptions world;
    std::chrono::milliseconds tick{100};
    hfsm::AutonomyLevel autonomy = hfsm::AutonomyLevel::High;
    std::optional<std::string> script;
    std::optional<std::string> log_path;
    std::optional<std::string> trace_path;
    bool quiet = false;
};

/// Plan computations observed while one state was active (in-process only).
struct StateVisit {
    std::string state;
    std::uint64_t plans = 0;
};

struct RunReport {
    int exit_code = kExitFailed;
    std::string outcome;
    std::string error;
    std::vector<hfsm::MirrorEvent> events;
    /// Server-side wire log, "< " inbound and "> " outbound (in-process only).
    std::vector<std::string> wire;
    std::vector<StateVisit> visits;
    std::vector<std::string> trace;
    /// Server blackboard keys after the run (in-process only).
    std::vector<std::string> blackboard_keys;
    std::size_t script_fired = 0;
    std::chrono::milliseconds wall{0};
};

RunReport run_behavior(const RunOptions& options, std::ostream& out, std::ostream& err);

struct ServeOptions {
    std::string host = "127.0.0.1";
    std::uint16_t bt_port = 7801;
    std::uint16_t mirror_port = 7802;
    WorldOptions world;
    std::chrono::milliseconds tick{100};
    std::string behavior_dir = ".";
    /// Called with the bound ports once both servers listen.
    std::function<void(std::uint16_t bt, std::uint16_t mirror)> on_ready;
};

/// Prints "ready bt=<port> mirror=<port>", then blocks in @p wait until it
/// returns, then shuts down (in-flight goals end CANCELED).
int serve(const ServeOptions& options, std::ostream& out, std::ostream& err, const std::function<void()>& wait);

}  // namespace hfsmbt::app
