#pragma once

// Eat-sandwich scenario: Fallback(NotHungry, Sequence(Unwrap, Consume, Dispose),
// EatApple). Every action runs for one tick and then finishes; Consume and
// EatApple satisfy hunger. When Dispose fails the Fallback moves on to
// EatApple even though the sandwich was already eaten.

#include <memory>
#include <string>
#include <vector>

#include "hfsmbt/bt/engine.hpp"

namespace hfsmbt::bt::testing {

struct SandwichRun {
    NodeStatus result = NodeStatus::Idle;
    std::vector<std::string> trace;
};

inline BtNode sandwich_tree() {
    return BtNode::fallback({BtNode::condition("NotHungry"),
                             BtNode::sequence({BtNode::action("Unwrap"), BtNode::action("Consume"),
                                               BtNode::action("Dispose")},
                                              "EatSandwich"),
                             BtNode::action("EatApple")});
}

inline SandwichRun run_sandwich(bool dispose_succeeds) {
    auto hungry = std::make_shared<bool>(true);
    LeafRegistry registry;
    auto two_step = [](NodeStatus end, std::function<void()> effect = {}) {
        return [end, effect](LeafContext& lc) {
            if (!lc.state().has_value()) {
                lc.state() = true;
                return NodeStatus::Running;
            }
            if (effect) {
                effect();
            }
            return end;
        };
    };
    registry.register_condition("NotHungry",
                                [hungry](LeafContext&) { return *hungry ? NodeStatus::Failure : NodeStatus::Success; });
    registry.register_action("Unwrap", two_step(NodeStatus::Success));
    registry.register_action("Consume", two_step(NodeStatus::Success, [hungry] { *hungry = false; }));
    registry.register_action("Dispose", two_step(dispose_succeeds ? NodeStatus::Success : NodeStatus::Failure));
    registry.register_action("EatApple", two_step(NodeStatus::Success, [hungry] { *hungry = false; }));

    Blackboard bb;
    TraceLog trace;
    TreeExecutor exec(sandwich_tree(), bb, registry, &trace);
    SandwichRun run;
    run.result = exec.run_until_done(50);
    for (const auto& e : trace.entries()) {
        run.trace.push_back(e.to_line());
    }
    return run;
}

// Hand-traced expectations for the tree above.
inline const std::vector<std::string> kSandwichTraceDisposeFails{
    "tick=1 node=NotHungry status=F", "tick=1 node=Unwrap status=R",  "tick=2 node=Unwrap status=S",
    "tick=2 node=Consume status=R",   "tick=3 node=Consume status=S", "tick=3 node=Dispose status=R",
    "tick=4 node=Dispose status=F",   "tick=4 node=EatApple status=R", "tick=5 node=EatApple status=S",
};

inline const std::vector<std::string> kSandwichTraceDisposeSucceeds{
    "tick=1 node=NotHungry status=F", "tick=1 node=Unwrap status=R",  "tick=2 node=Unwrap status=S",
    "tick=2 node=Consume status=R",   "tick=3 node=Consume status=S", "tick=3 node=Dispose status=R",
    "tick=4 node=Dispose status=S",
};

}  // namespace hfsmbt::bt::testing
