#pragma once

/// @file script.hpp
/// @brief Timed operator-command scripts for headless runs.
///
/// One command per line, `#` starts a comment:
///
///     <when> <command> [args]
///
/// <when> is milliseconds after the behavior started, or `<state>+<ms>`:
/// milliseconds after the named state (name or full path) was first entered.
/// Lines fire in file order; a line waits until every earlier one fired.
/// Commands:
///     set_autonomy off|low|high|full
///     confirm_transition <state> <outcome>
///     force_transition <state> <outcome>
///     preempt
///     provide_goal x,y[,heading] [x,y[,heading] ...]
///     end_goals

#include <chrono>
#include <condition_variable>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "hfsmbt/hfsm/commands.hpp"
#include "hfsmbt/hfsm/events.hpp"

namespace hfsmbt::app {

class ScriptError : public std::runtime_error {
public:
    ScriptError(const std::string& source, int line, const std::string& message);
    int line;
};

struct ScriptLine {
    std::chrono::milliseconds at{0};
    /// Empty: relative to the behavior start.
    std::string after_state;
    hfsm::OperatorCommand command;
    int line = 0;
};

/// Throws ScriptError.
std::vector<ScriptLine> parse_script(const std::string& text, const std::string& source = "<script>");
std::vector<ScriptLine> load_script(const std::string& path);

/// Feeds script lines into a command queue. Attach sink() to the executive
/// before it starts; timing begins at behavior_started.
class ScriptPlayer {
public:
    ScriptPlayer(std::vector<ScriptLine> lines, hfsm::CommandQueue& queue);
    ~ScriptPlayer();
    ScriptPlayer(const ScriptPlayer&) = delete;
    ScriptPlayer& operator=(const ScriptPlayer&) = delete;

    [[nodiscard]] hfsm::EventSink sink();
    void start();
    void stop();
    /// Lines pushed so far.
    [[nodiscard]] std::size_t fired() const;

private:
    using Clock = std::chrono::steady_clock;
    void run();

    std::vector<ScriptLine> lines_;
    hfsm::CommandQueue& queue_;
    mutable std::mutex mutex_;
    std::condition_variable cv_;
    std::optional<Clock::time_point> started_;
    std::map<std::string, Clock::time_point> entered_;
    std::size_t fired_ = 0;
    bool stop_ = false;
    std::thread thread_;
};

}  // namespace hfsmbt::app
