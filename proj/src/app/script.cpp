#include "hfsmbt/app/script.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace hfsmbt::app {

using hfsm::OperatorCommand;

ScriptError::ScriptError(const std::string& source, int l, const std::string& message)
    : std::runtime_error(source + ":" + std::to_string(l) + ": " + message), line(l) {}

namespace {

std::optional<long> to_long(const std::string& s) {
    long v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || v < 0) {
        return std::nullopt;
    }
    return v;
}

std::optional<Pose> parse_pose(const std::string& text) {
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            parts.push_back(std::stod(item, &used));
            if (used != item.size()) {
                return std::nullopt;
            }
        } catch (const std::exception&) {
            return std::nullopt;
        }
    }
    if (parts.size() < 2 || parts.size() > 3) {
        return std::nullopt;
    }
    return Pose{parts[0], parts[1], parts.size() == 3 ? parts[2] : 0.0};
}

}  // namespace

std::vector<ScriptLine> parse_script(const std::string& text, const std::string& source) {
    std::vector<ScriptLine> out;
    std::istringstream in(text);
    std::string raw;
    int number = 0;
    while (std::getline(in, raw)) {
        ++number;
        if (const auto hash = raw.find('#'); hash != std::string::npos) {
            raw.erase(hash);
        }
        std::istringstream words(raw);
        std::vector<std::string> w;
        for (std::string token; words >> token;) {
            w.push_back(token);
        }
        if (w.empty()) {
            continue;
        }
        auto fail = [&](const std::string& m) { throw ScriptError(source, number, m); };
        if (w.size() < 2) {
            fail("expected '<when> <command> [args]'");
        }
        ScriptLine line;
        line.line = number;
        std::string when = w[0];
        if (const auto plus = when.rfind('+'); plus != std::string::npos) {
            line.after_state = when.substr(0, plus);
            when = when.substr(plus + 1);
            if (line.after_state.empty()) {
                fail("missing state before '+'");
            }
        }
        const auto ms = to_long(when);
        if (!ms) {
            fail("bad time '" + w[0] + "'");
        }
        line.at = std::chrono::milliseconds(*ms);
        const auto& cmd = w[1];
        const std::size_t args = w.size() - 2;
        auto want = [&](std::size_t n) {
            if (args != n) {
                fail(cmd + " takes " + std::to_string(n) + " argument(s)");
            }
        };
        if (cmd == "set_autonomy") {
            want(1);
            const auto level = hfsm::parse_autonomy(w[2]);
            if (!level) {
                fail("bad autonomy level '" + w[2] + "'");
            }
            line.command = OperatorCommand::set_autonomy(*level);
        } else if (cmd == "confirm_transition") {
            want(2);
            line.command = OperatorCommand::confirm(w[2], w[3]);
        } else if (cmd == "force_transition") {
            want(2);
            line.command = OperatorCommand::force(w[2], w[3]);
        } else if (cmd == "preempt") {
            want(0);
            line.command = OperatorCommand::preempt();
        } else if (cmd == "end_goals") {
            want(0);
            line.command = OperatorCommand::end_goals();
        } else if (cmd == "provide_goal") {
            if (args == 0) {
                fail("provide_goal needs at least one pose");
            }
            PoseList poses;
            for (std::size_t i = 2; i < w.size(); ++i) {
                const auto p = parse_pose(w[i]);
                if (!p) {
                    fail("bad pose '" + w[i] + "' (expected x,y[,heading])");
                }
                poses.push_back(*p);
            }
            line.command = OperatorCommand::provide_goal(std::move(poses));
        } else {
            fail("unknown command '" + cmd + "'");
        }
        out.push_back(std::move(line));
    }
    return out;
}

std::vector<ScriptLine> load_script(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ScriptError(path, 0, "cannot read file");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_script(text.str(), path);
}

ScriptPlayer::ScriptPlayer(std::vector<ScriptLine> lines, hfsm::CommandQueue& queue)
    : lines_(std::move(lines)), queue_(queue) {}

ScriptPlayer::~ScriptPlayer() { stop(); }

hfsm::EventSink ScriptPlayer::sink() {
    return [this](const hfsm::MirrorEvent& e) {
        if (e.kind != hfsm::EventKind::BehaviorStarted && e.kind != hfsm::EventKind::StateEntered) {
            return;
        }
        const auto now = Clock::now();
        std::lock_guard lock(mutex_);
        if (e.kind == hfsm::EventKind::BehaviorStarted) {
            started_ = now;
        } else {
            entered_.try_emplace(e.state, now);
            entered_.try_emplace(e.state.substr(e.state.rfind('/') + 1), now);
        }
        cv_.notify_all();
    };
}

void ScriptPlayer::start() { thread_ = std::thread([this] { run(); }); }

void ScriptPlayer::stop() {
    {
        std::lock_guard lock(mutex_);
        stop_ = true;
    }
    cv_.notify_all();
    if (thread_.joinable()) {
        thread_.join();
    }
}

std::size_t ScriptPlayer::fired() const {
    std::lock_guard lock(mutex_);
    return fired_;
}

void ScriptPlayer::run() {
    std::unique_lock lock(mutex_);
    for (const auto& line : lines_) {
        // Wait for the reference point, then for the offset.
        auto reference = [&]() -> std::optional<Clock::time_point> {
            if (line.after_state.empty()) {
                return started_;
            }
            const auto it = entered_.find(line.after_state);
            return it == entered_.end() ? std::nullopt : std::optional(it->second);
        };
        cv_.wait(lock, [&] { return stop_ || reference().has_value(); });
        if (stop_) {
            return;
        }
        const auto due = *reference() + line.at;
        cv_.wait_until(lock, due, [&] { return stop_; });
        if (stop_) {
            return;
        }
        queue_.push(line.command);
        ++fired_;
    }
}

}  // namespace hfsmbt::app
