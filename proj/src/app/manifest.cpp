#include "hfsmbt/app/manifest.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "hfsmbt/hfsm/builtin.hpp"

namespace hfsmbt::app {

namespace fs = std::filesystem;

ManifestError::ManifestError(const std::string& source, int l, int c, const std::string& message)
    : std::runtime_error(source + ":" + std::to_string(l) + ":" + std::to_string(c) + ": " + message),
      line(l),
      column(c) {}

namespace {

class Reader {
public:
    Reader(std::string source, std::string base) : source_(std::move(source)), base_(std::move(base)) {}

    [[noreturn]] void fail(const YAML::Node& at, const std::string& message) const {
        const auto mark = at.Mark();
        if (mark.is_null()) {
            throw ManifestError(source_, 0, 0, message);
        }
        throw ManifestError(source_, mark.line + 1, mark.column + 1, message);
    }

    std::string scalar(const YAML::Node& n, const std::string& what) const {
        if (!n.IsScalar()) {
            fail(n, what + " must be a scalar");
        }
        return n.Scalar();
    }

    std::vector<std::string> strings(const YAML::Node& n, const std::string& what) const {
        if (!n.IsSequence()) {
            fail(n, what + " must be a list");
        }
        std::vector<std::string> out;
        for (const auto& item : n) {
            out.push_back(scalar(item, what + " entry"));
        }
        return out;
    }

    std::string path(const YAML::Node& n, const std::string& what) const {
        const fs::path p = scalar(n, what);
        return p.is_absolute() ? p.string() : (fs::path(base_) / p).lexically_normal().string();
    }

    void only(const YAML::Node& map, const std::set<std::string>& allowed) const {
        for (const auto& kv : map) {
            const auto key = kv.first.as<std::string>();
            if (!allowed.count(key)) {
                fail(kv.first, "unknown key '" + key + "'");
            }
        }
    }

    StateSpec state(const YAML::Node& n) const {
        if (!n.IsMap()) {
            fail(n, "state must be a mapping");
        }
        only(n, {"name", "type", "transitions", "remap", "files", "behavior", "goal_key", "output", "ms",
                 "outcomes", "states", "initial"});
        StateSpec s;
        s.line = n.Mark().line + 1;
        s.column = n.Mark().column + 1;
        if (!n["name"]) {
            fail(n, "state without name");
        }
        s.name = scalar(n["name"], "name");
        if (s.name.empty() || s.name.find('/') != std::string::npos) {
            fail(n["name"], "bad state name '" + s.name + "'");
        }
        if (!n["type"]) {
            fail(n, "state '" + s.name + "' without type");
        }
        s.type = scalar(n["type"], "type");
        static const std::set<std::string> types{"bt_loader", "bt_execute", "bt_execute_goal",
                                                 "get_goal",  "wait",       "machine"};
        if (!types.count(s.type)) {
            fail(n["type"], "unknown state type '" + s.type + "'");
        }
        if (n["files"]) {
            if (!n["files"].IsSequence()) {
                fail(n["files"], "files must be a list");
            }
            for (const auto& f : n["files"]) {
                s.files.push_back(path(f, "file"));
            }
        }
        if (n["behavior"]) {
            s.behavior = scalar(n["behavior"], "behavior");
        } else if (s.type == "bt_execute" || s.type == "bt_execute_goal") {
            fail(n, "state '" + s.name + "' needs a behavior");
        }
        if (n["goal_key"]) {
            s.goal_key = scalar(n["goal_key"], "goal_key");
        }
        if (n["output"]) {
            s.output = scalar(n["output"], "output");
        }
        if (n["ms"]) {
            try {
                s.wait_ms = n["ms"].as<int>();
            } catch (const YAML::Exception&) {
                fail(n["ms"], "ms must be an integer");
            }
        }
        if (n["remap"]) {
            if (!n["remap"].IsMap()) {
                fail(n["remap"], "remap must be a mapping");
            }
            for (const auto& kv : n["remap"]) {
                s.remaps[kv.first.as<std::string>()] = scalar(kv.second, "remap target");
            }
        }
        if (s.type == "machine") {
            machine_body(n, s);
        } else if (n["states"] || n["outcomes"] || n["initial"]) {
            fail(n, "only machines have states, outcomes or initial");
        }
        if (!n["transitions"] || !n["transitions"].IsMap()) {
            fail(n, "state '" + s.name + "' needs a transitions mapping");
        }
        for (const auto& kv : n["transitions"]) {
            const auto outcome = kv.first.as<std::string>();
            hfsm::Transition t;
            if (kv.second.IsScalar()) {
                t.target = kv.second.Scalar();
            } else if (kv.second.IsMap()) {
                only(kv.second, {"target", "autonomy"});
                if (!kv.second["target"]) {
                    fail(kv.second, "transition without target");
                }
                t.target = scalar(kv.second["target"], "target");
                if (kv.second["autonomy"]) {
                    const auto level = hfsm::parse_autonomy(scalar(kv.second["autonomy"], "autonomy"));
                    if (!level) {
                        fail(kv.second["autonomy"], "autonomy must be off, low, high or full");
                    }
                    t.required = *level;
                }
            } else {
                fail(kv.second, "transition must be a target or {target, autonomy}");
            }
            s.transitions[outcome] = t;
        }
        check_outcomes(n, s);
        return s;
    }

    void machine_body(const YAML::Node& n, StateSpec& s) const {
        if (!n["outcomes"]) {
            fail(n, "machine '" + s.name + "' needs outcomes");
        }
        s.outcomes = strings(n["outcomes"], "outcomes");
        if (!n["states"] || !n["states"].IsSequence() || n["states"].size() == 0) {
            fail(n, "machine '" + s.name + "' needs a non-empty states list");
        }
        std::set<std::string> names;
        for (const auto& child : n["states"]) {
            s.states.push_back(state(child));
            if (!names.insert(s.states.back().name).second) {
                fail(child, "duplicate state '" + s.states.back().name + "'");
            }
        }
        if (n["initial"]) {
            s.initial = scalar(n["initial"], "initial");
            if (!names.count(s.initial)) {
                fail(n["initial"], "initial state '" + s.initial + "' not found");
            }
        }
        const std::set<std::string> outs(s.outcomes.begin(), s.outcomes.end());
        for (std::size_t i = 0; i < s.states.size(); ++i) {
            for (const auto& [outcome, t] : s.states[i].transitions) {
                if (!names.count(t.target) && !outs.count(t.target)) {
                    fail(n["states"][i]["transitions"],
                         "transition " + s.states[i].name + "." + outcome + " targets unknown '" + t.target + "'");
                }
            }
        }
    }

    void check_outcomes(const YAML::Node& n, const StateSpec& s) const {
        std::vector<std::string> expected = s.outcomes;
        if (s.type == "bt_loader") {
            expected = {"done", "failed"};
        } else if (s.type == "bt_execute" || s.type == "bt_execute_goal") {
            expected = {"done", "failed", "canceled"};
        } else if (s.type == "get_goal") {
            expected = {"received", "finished"};
        } else if (s.type == "wait") {
            expected = {"done"};
        }
        for (const auto& o : expected) {
            if (!s.transitions.count(o)) {
                fail(n["transitions"], "state '" + s.name + "' has no transition for outcome '" + o + "'");
            }
        }
        for (const auto& [o, t] : s.transitions) {
            if (std::find(expected.begin(), expected.end(), o) == expected.end()) {
                fail(n["transitions"], "state '" + s.name + "' has no outcome '" + o + "'");
            }
        }
    }

    Manifest manifest(const YAML::Node& doc) const {
        if (!doc.IsMap()) {
            fail(doc, "manifest must be a mapping");
        }
        only(doc, {"behavior", "outcomes", "initial", "states", "world", "seed", "schedule"});
        Manifest m;
        m.source = source_;
        if (!doc["behavior"]) {
            fail(doc, "missing 'behavior'");
        }
        m.root.name = scalar(doc["behavior"], "behavior");
        m.root.type = "machine";
        machine_body(doc, m.root);
        if (doc["world"]) {
            m.world = path(doc["world"], "world");
        }
        if (doc["seed"]) {
            try {
                m.seed = doc["seed"].as<std::uint64_t>();
            } catch (const YAML::Exception&) {
                fail(doc["seed"], "seed must be a non-negative integer");
            }
        }
        if (doc["schedule"]) {
            m.schedule = path(doc["schedule"], "schedule");
        }
        return m;
    }

private:
    std::string source_;
    std::string base_;
};

std::unique_ptr<hfsm::State> build_state(const StateSpec& s, const flexbt::BridgeConfig& bridge) {
    auto config = bridge;
    config.behavior_name = s.behavior;
    config.files = s.files;
    config.goal_key = s.goal_key;
    if (s.type == "bt_loader") {
        return std::make_unique<flexbt::BtLoaderState>(s.name, config);
    }
    if (s.type == "bt_execute") {
        return std::make_unique<flexbt::BtExecuteState>(s.name, config);
    }
    if (s.type == "bt_execute_goal") {
        return std::make_unique<flexbt::BtExecuteGoalState>(s.name, config);
    }
    if (s.type == "get_goal") {
        return std::make_unique<hfsm::GetGoalState>(s.name, s.output);
    }
    if (s.type == "wait") {
        return std::make_unique<hfsm::WaitState>(s.name, std::chrono::milliseconds(s.wait_ms));
    }
    auto m = std::make_unique<hfsm::StateMachine>(s.name, s.outcomes);
    for (const auto& child : s.states) {
        m->add_state(build_state(child, bridge), child.transitions, child.remaps);
    }
    if (!s.initial.empty()) {
        m->set_initial(s.initial);
    }
    return m;
}

}  // namespace

Manifest parse_manifest(const std::string& text, const std::string& source, const std::string& base_dir) {
    YAML::Node doc;
    try {
        doc = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ManifestError(source, e.mark.line + 1, e.mark.column + 1, e.msg);
    }
    try {
        return Reader(source, base_dir).manifest(doc);
    } catch (const YAML::Exception& e) {
        throw ManifestError(source, e.mark.line + 1, e.mark.column + 1, e.msg);
    }
}

Manifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ManifestError(path, 0, 0, "cannot read file");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_manifest(text.str(), path, fs::absolute(path).parent_path().string());
}

std::unique_ptr<hfsm::StateMachine> build_machine(const Manifest& m, const flexbt::BridgeConfig& bridge) {
    auto root = build_state(m.root, bridge);
    auto* machine = static_cast<hfsm::StateMachine*>(root.release());
    std::unique_ptr<hfsm::StateMachine> out(machine);
    out->validate();
    return out;
}

}  // namespace hfsmbt::app
