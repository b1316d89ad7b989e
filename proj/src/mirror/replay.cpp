#include "hfsmbt/mirror/replay.hpp"

#include <algorithm>

#include "hfsmbt/hfsm/machine.hpp"

namespace hfsmbt::mirror {

using hfsm::EventKind;

SeqGap::SeqGap(std::uint64_t e, std::uint64_t g)
    : std::runtime_error("SeqGap(expected " + std::to_string(e) + ", got " + std::to_string(g) + ")"),
      expected(e),
      got(g) {}

bool ActiveTracker::apply(const hfsm::MirrorEvent& e) {
    switch (e.kind) {
        case EventKind::StateEntered:
            active_.push_back(e.state);
            return true;
        case EventKind::StateExited: {
            const auto prefix = e.state + "/";
            const auto before = active_.size();
            std::erase_if(active_, [&](const std::string& p) { return p == e.state || p.rfind(prefix, 0) == 0; });
            return active_.size() != before;
        }
        case EventKind::BehaviorFinished: {
            const bool changed = !active_.empty();
            active_.clear();
            return changed;
        }
        default:
            return false;
    }
}

Timeline replay(const std::vector<hfsm::MirrorEvent>& events) {
    Timeline out;
    ActiveTracker tracker;
    for (std::size_t i = 0; i < events.size(); ++i) {
        if (i > 0 && events[i].seq != events[i - 1].seq + 1) {
            throw SeqGap(events[i - 1].seq + 1, events[i].seq);
        }
        const auto& e = events[i];
        if (e.kind == EventKind::StateEntered || e.kind == EventKind::StateExited ||
            e.kind == EventKind::BehaviorFinished) {
            tracker.apply(e);
            out.push_back({e.seq, tracker.active()});
        }
    }
    return out;
}

namespace {

bool names_state(hfsm::StateMachine& root, const std::string& path) {
    // "/Root/A/B": the first segment is the root machine itself.
    std::vector<std::string> parts;
    std::size_t pos = 1;
    while (pos <= path.size()) {
        const auto next = path.find('/', pos);
        parts.push_back(path.substr(pos, next == std::string::npos ? std::string::npos : next - pos));
        if (next == std::string::npos) {
            break;
        }
        pos = next + 1;
    }
    if (parts.size() < 2 || parts[0] != root.name()) {
        return false;
    }
    hfsm::StateMachine* m = &root;
    for (std::size_t i = 1; i < parts.size(); ++i) {
        hfsm::State* s = m ? m->find(parts[i]) : nullptr;
        if (!s) {
            return false;
        }
        m = s->is_machine() ? static_cast<hfsm::StateMachine*>(s) : nullptr;
        if (!m && i + 1 < parts.size()) {
            return false;
        }
    }
    return true;
}

}  // namespace

Timeline replay(const std::vector<hfsm::MirrorEvent>& events, hfsm::StateMachine& topology) {
    auto out = replay(events);
    for (const auto& path : visits(out)) {
        if (!names_state(topology, path)) {
            throw std::invalid_argument("unknown state path " + path);
        }
    }
    return out;
}

std::vector<std::string> visits(const Timeline& timeline) {
    std::vector<std::string> out;
    std::vector<std::string> prev;
    for (const auto& step : timeline) {
        for (const auto& p : step.active) {
            if (std::find(prev.begin(), prev.end(), p) == prev.end()) {
                out.push_back(p);
            }
        }
        prev = step.active;
    }
    return out;
}

}  // namespace hfsmbt::mirror
