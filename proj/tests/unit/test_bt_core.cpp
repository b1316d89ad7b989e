#include <algorithm>

#include "bt_test_support.hpp"
#include "doctest.h"
#include "hfsmbt/bt/decision_list.hpp"
#include "hfsmbt/bt/engine.hpp"
#include "hfsmbt/bt/error.hpp"
#include "table_one_oracle.hpp"

using namespace hfsmbt;
using namespace hfsmbt::bt;
using namespace hfsmbt::bt::testing;

namespace {

struct Fixture {
    LeafRegistry registry;
    ScriptedLeaves leaves{registry};
    Blackboard bb;
    TraceLog trace;
    TickContext ctx;

    NodeStatus tick(BtNode& tree) {
        ++ctx.tick_index;
        return tick_root(tree, env());
    }
    void stop(BtNode& tree) { halt(tree, env()); }
    TickEnv env() { return TickEnv{bb, registry, ctx, &trace}; }
};

BtErrc error_code(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const BtError& e) {
        return e.code();
    }
    FAIL("expected BtError");
    return BtErrc::InvalidTree;
}

}  // namespace

TEST_CASE("node summary table examples") {
    SUBCASE("Fallback over [Failure, Success] is Success") {
        Fixture f;
        auto tree = BtNode::fallback(fixed_leaves(f.leaves, {F, S}));
        CHECK(f.tick(tree) == S);
    }
    SUBCASE("Sequence over [Success, Success, Success] is Success") {
        Fixture f;
        auto tree = BtNode::sequence(fixed_leaves(f.leaves, {S, S, S}));
        CHECK(f.tick(tree) == S);
    }
    SUBCASE("Parallel N=3 M=2 over [Success, Running, Failure] is Running") {
        Fixture f;
        auto tree = BtNode::parallel(2, fixed_leaves(f.leaves, {S, R, F}));
        CHECK(f.tick(tree) == R);
    }
}

TEST_CASE("reduce_parallel") {
    const std::vector<NodeStatus> ssf{S, S, F};
    const std::vector<NodeStatus> ffs{F, F, S};
    const std::vector<NodeStatus> r{R};
    CHECK(reduce_parallel(2, ssf) == S);
    CHECK(reduce_parallel(2, ffs) == F);
    CHECK(reduce_parallel(1, r) == R);
    CHECK(error_code([&] { (void)reduce_parallel(0, ssf); }) == BtErrc::InvalidThreshold);
    CHECK(error_code([&] { (void)reduce_parallel(4, ssf); }) == BtErrc::InvalidThreshold);
    const std::vector<NodeStatus> idle{NodeStatus::Idle};
    CHECK(error_code([&] { (void)reduce_parallel(1, idle); }) == BtErrc::InvalidStatus);
}

TEST_CASE("table conformance over every status vector up to length 4") {
    const auto report = check_table_one(4);
    CHECK(report.cases > 0);
    for (const auto& m : report.mismatches) {
        INFO(m);
    }
    CHECK(report.mismatches.empty());
}

TEST_CASE("fallback is the dual of sequence") {
    for (const auto& v : all_status_vectors(4)) {
        std::vector<NodeStatus> inverted;
        std::transform(v.begin(), v.end(), std::back_inserter(inverted), invert);
        CHECK(reduce_fallback(v) == invert(reduce_sequence(inverted)));
    }
}

TEST_CASE("raising the parallel threshold never turns Failure into Success") {
    for (const auto& v : all_status_vectors(4)) {
        for (int m = 1; m < static_cast<int>(v.size()); ++m) {
            if (reduce_parallel(m, v) == F) {
                CHECK(reduce_parallel(m + 1, v) != S);
            }
        }
    }
}

TEST_CASE("structural invariants are enforced at construction") {
    CHECK(error_code([] { (void)BtNode::sequence({}); }) == BtErrc::InvalidTree);
    CHECK(error_code([] {
              std::vector<BtNode> kids;
              kids.push_back(BtNode::action("A"));
              (void)BtNode::parallel(2, std::move(kids));
          }) == BtErrc::InvalidThreshold);
    CHECK(error_code([] { (void)BtNode::repeat(0, BtNode::action("A")); }) == BtErrc::InvalidTree);
    CHECK(error_code([] { (void)BtNode::action(""); }) == BtErrc::InvalidTree);
    CHECK(BtNode::retry(kInfinite, BtNode::action("A")).num_attempts() == kInfinite);
}

TEST_CASE("memory sequence resumes at its cursor") {
    Fixture f;
    f.leaves.action("A", {S});
    f.leaves.action("B", {R, R, S});
    f.leaves.action("C", {S});
    auto tree = BtNode::sequence({BtNode::action("A"), BtNode::action("B"), BtNode::action("C")});
    CHECK(f.tick(tree) == R);
    CHECK(tree.cursor() == 1);
    CHECK(f.tick(tree) == R);
    CHECK(f.tick(tree) == S);
    CHECK(f.leaves.ticks("A") == 1);
    CHECK(f.leaves.ticks("B") == 3);
    CHECK(f.leaves.ticks("C") == 1);
    CHECK(tree.cursor() == 0);
    CHECK(tree.children()[1].status() == NodeStatus::Idle);
}

TEST_CASE("memory sequence failure resets the cursor") {
    Fixture f;
    f.leaves.action("A", {S});
    f.leaves.action("B", {F});
    auto tree = BtNode::sequence({BtNode::action("A"), BtNode::action("B")});
    CHECK(f.tick(tree) == F);
    CHECK(tree.cursor() == 0);
    CHECK(f.tick(tree) == F);
    CHECK(f.leaves.ticks("A") == 2);
}

TEST_CASE("reactive sequence re-checks conditions and halts the skipped runner") {
    Fixture f;
    f.leaves.condition("Ok", {S, S, F});
    f.leaves.action("Work", {R});
    auto tree = BtNode::reactive_sequence({BtNode::condition("Ok"), BtNode::action("Work")});
    CHECK(f.tick(tree) == R);
    CHECK(f.tick(tree) == R);
    CHECK(f.leaves.ticks("Ok") == 2);
    CHECK(f.leaves.halts("Work") == 0);
    CHECK(f.tick(tree) == F);
    CHECK(f.leaves.ticks("Work") == 2);
    CHECK(f.leaves.halts("Work") == 1);
    CHECK(tree.children()[1].status() == NodeStatus::Idle);
}

TEST_CASE("reactive sequence short-circuits on a failing first child") {
    Fixture f;
    f.leaves.condition("C", {F});
    f.leaves.action("A1", {S});
    f.leaves.action("A2", {S});
    auto tree = BtNode::reactive_sequence({BtNode::condition("C"), BtNode::action("A1"), BtNode::action("A2")});
    for (int i = 0; i < 5; ++i) {
        CHECK(f.tick(tree) == F);
    }
    CHECK(f.leaves.ticks("C") == 5);
    CHECK(f.leaves.ticks("A1") == 0);
    CHECK(f.leaves.ticks("A2") == 0);
}

TEST_CASE("reactive fallback halts a lower-priority runner when a higher one takes over") {
    Fixture f;
    f.leaves.condition("Done", {F, F, S});
    f.leaves.action("Try", {R});
    auto tree = BtNode::reactive_fallback({BtNode::condition("Done"), BtNode::action("Try")});
    CHECK(f.tick(tree) == R);
    CHECK(f.tick(tree) == R);
    CHECK(f.tick(tree) == S);
    CHECK(f.leaves.halts("Try") == 1);
}

TEST_CASE("parallel halts still-running children when it finishes") {
    Fixture f;
    f.leaves.action("A", {S});
    f.leaves.action("B", {R});
    f.leaves.action("C", {R});
    auto tree = BtNode::parallel(1, {BtNode::action("A"), BtNode::action("B"), BtNode::action("C")});
    CHECK(f.tick(tree) == S);
    CHECK(f.leaves.halts("B") == 1);
    CHECK(f.leaves.halts("C") == 1);
    CHECK(f.leaves.halts("A") == 0);
}

TEST_CASE("parallel does not re-tick finished children") {
    Fixture f;
    f.leaves.action("A", {S});
    f.leaves.action("B", {R, S});
    auto tree = BtNode::parallel(2, {BtNode::action("A"), BtNode::action("B")});
    CHECK(f.tick(tree) == R);
    CHECK(f.tick(tree) == S);
    CHECK(f.leaves.ticks("A") == 1);
    CHECK(f.leaves.ticks("B") == 2);
}

TEST_CASE("repeat runs n successful cycles and fails on the first failure") {
    Fixture f;
    f.leaves.action("A", {S});
    auto tree = BtNode::repeat(3, BtNode::action("A"));
    CHECK(f.tick(tree) == R);
    CHECK(f.tick(tree) == R);
    CHECK(f.tick(tree) == S);
    CHECK(f.leaves.ticks("A") == 3);

    Fixture g;
    g.leaves.action("A", {S, F});
    auto failing = BtNode::repeat(kInfinite, BtNode::action("A"));
    CHECK(g.tick(failing) == R);
    CHECK(g.tick(failing) == F);
    CHECK(failing.runtime().counter == 0);
}

TEST_CASE("retry succeeds at once and fails after n attempts") {
    Fixture f;
    f.leaves.action("A", {F, S});
    auto tree = BtNode::retry(3, BtNode::action("A"));
    CHECK(f.tick(tree) == R);
    CHECK(f.tick(tree) == S);

    Fixture g;
    g.leaves.action("A", {F});
    auto failing = BtNode::retry(2, BtNode::action("A"));
    CHECK(g.tick(failing) == R);
    CHECK(g.tick(failing) == F);
    CHECK(g.leaves.ticks("A") == 2);
}

TEST_CASE("halt") {
    SUBCASE("running sequence at cursor 2 returns to Idle with cursor 0") {
        Fixture f;
        f.leaves.action("A", {S});
        f.leaves.action("B", {S});
        f.leaves.action("C", {R});
        auto tree = BtNode::sequence({BtNode::action("A"), BtNode::action("B"), BtNode::action("C")});
        CHECK(f.tick(tree) == R);
        CHECK(tree.cursor() == 2);
        f.stop(tree);
        CHECK(tree.status() == NodeStatus::Idle);
        CHECK(tree.cursor() == 0);
        CHECK(f.leaves.halts("C") == 1);
    }
    SUBCASE("idle leaf is a no-op") {
        Fixture f;
        f.leaves.action("A", {R});
        auto leaf = BtNode::action("A");
        f.stop(leaf);
        CHECK(f.leaves.halts("A") == 0);
        CHECK(leaf.status() == NodeStatus::Idle);
    }
    SUBCASE("parallel with two running children halts both exactly once") {
        Fixture f;
        f.leaves.action("A", {R});
        f.leaves.action("B", {R});
        auto tree = BtNode::parallel(2, {BtNode::action("A"), BtNode::action("B")});
        CHECK(f.tick(tree) == R);
        f.stop(tree);
        f.stop(tree);
        CHECK(f.leaves.halts("A") == 1);
        CHECK(f.leaves.halts("B") == 1);
    }
}

TEST_CASE("a halted tree behaves like a fresh one") {
    // Deterministic leaves whose output depends only on their own tick count
    // since the last halt/finish (leaf_state), so a fresh tree and a halted
    // tree must produce the same status sequence.
    auto make_registry = [](LeafRegistry& reg) {
        auto counting = [](int running_ticks, NodeStatus end) {
            return [running_ticks, end](LeafContext& lc) {
                auto& st = lc.state();
                int n = st.has_value() ? std::any_cast<int>(st) : 0;
                st = n + 1;
                return n < running_ticks ? NodeStatus::Running : end;
            };
        };
        reg.register_action("A", counting(2, NodeStatus::Success));
        reg.register_action("B", counting(1, NodeStatus::Failure));
        reg.register_action("C", counting(3, NodeStatus::Success));
    };
    auto make_tree = [] {
        return BtNode::fallback({BtNode::sequence({BtNode::action("A"), BtNode::action("B")}),
                                 BtNode::parallel(1, {BtNode::action("C"), BtNode::action("A")})});
    };

    LeafRegistry reg;
    make_registry(reg);
    for (int warmup = 0; warmup <= 6; ++warmup) {
        Blackboard bb1;
        Blackboard bb2;
        TickContext c1;
        TickContext c2;
        BtNode used = make_tree();
        for (int i = 0; i < warmup; ++i) {
            ++c1.tick_index;
            (void)tick_root(used, TickEnv{bb1, reg, c1});
        }
        halt(used, TickEnv{bb1, reg, c1});
        BtNode fresh = make_tree();
        for (int i = 0; i < 10; ++i) {
            ++c1.tick_index;
            ++c2.tick_index;
            CHECK(tick_root(used, TickEnv{bb1, reg, c1}) == tick_root(fresh, TickEnv{bb2, reg, c2}));
        }
    }
}

TEST_CASE("engine errors") {
    SUBCASE("unregistered leaf") {
        Fixture f;
        auto tree = BtNode::action("Nope");
        CHECK(error_code([&] { f.tick(tree); }) == BtErrc::UnregisteredLeaf);
    }
    SUBCASE("condition returning Running") {
        Fixture f;
        f.leaves.condition("Bad", {R});
        auto tree = BtNode::condition("Bad");
        CHECK(error_code([&] { f.tick(tree); }) == BtErrc::ConditionReturnedRunning);
    }
    SUBCASE("required input bound to an absent key") {
        Fixture f;
        f.registry.register_action("Move", [](LeafContext&) { return NodeStatus::Success; }, {},
                                   {PortSpec{"goal", PortDirection::Input, true}});
        auto tree = BtNode::action("Move", {{"goal", PortValue::key("goal")}});
        try {
            f.tick(tree);
            FAIL("expected BlackboardKeyMissing");
        } catch (const BtError& e) {
            CHECK(e.code() == BtErrc::BlackboardKeyMissing);
            CHECK(e.subject() == "goal");
        }
        f.bb.set("goal", Pose{1, 2, 0});
        CHECK(f.tick(tree) == S);
    }
    SUBCASE("unresolved subtree") {
        Fixture f;
        auto tree = BtNode::subtree("Elsewhere");
        CHECK(error_code([&] { f.tick(tree); }) == BtErrc::UnresolvedSubTree);
    }
}

TEST_CASE("blackboard") {
    Blackboard bb;
    CHECK_THROWS_AS((void)bb.get("missing"), BtError);
    bb.set("n", std::int64_t{3});
    bb.set("n", std::int64_t{4});
    CHECK(bb.get_as<std::int64_t>("n") == 4);
    CHECK(error_code([&] { (void)bb.get_as<std::string>("n"); }) == BtErrc::BlackboardTypeMismatch);
    CHECK(bb.keys() == std::vector<std::string>{"n"});
}

TEST_CASE("ports resolve literals, keys and subtree remaps") {
    Fixture f;
    std::vector<std::string> seen;
    f.registry.register_action("Echo", [&](LeafContext& lc) {
        seen.push_back(std::get<std::string>(lc.input("msg")));
        lc.output("out", lc.input_as<double>("gain") * 2.0);
        return NodeStatus::Success;
    });
    auto leaf = BtNode::action("Echo", {{"msg", PortValue::key("text")},
                                        {"gain", PortValue::literal("1.5")},
                                        {"out", PortValue::key("result")}});
    auto sub = BtNode::subtree("Inner", {{"text", PortValue::key("outer_text")}});
    sub.attach_subtree(std::move(leaf));
    f.bb.set("outer_text", std::string("hello"));
    CHECK(f.tick(sub) == S);
    CHECK(seen == std::vector<std::string>{"hello"});
    // "result" is not remapped, so it lands in the shared blackboard.
    CHECK(f.bb.get_as<double>("result") == doctest::Approx(3.0));

    auto literal_sub = BtNode::subtree("Inner", {{"text", PortValue::literal("fixed")}});
    literal_sub.attach_subtree(BtNode::action("Echo", {{"msg", PortValue::key("text")},
                                                       {"gain", PortValue::literal("1")},
                                                       {"out", PortValue::key("result")}}));
    CHECK(f.tick(literal_sub) == S);
    CHECK(seen.back() == "fixed");
}

TEST_CASE("pose literals") {
    CHECK(std::get<Pose>(convert_literal("p", "1.5;2", "pose")) == Pose{1.5, 2, 0});
    CHECK(std::get<Pose>(convert_literal("p", "1;2;0.5", "pose")) == Pose{1, 2, 0.5});
    CHECK(error_code([] { (void)convert_literal("p", "1;x", "pose"); }) == BtErrc::BlackboardTypeMismatch);
    CHECK(error_code([] { (void)convert_literal("p", "yes", "bool"); }) == BtErrc::BlackboardTypeMismatch);
}

TEST_CASE("trace lines and running paths") {
    Fixture f;
    f.leaves.action("Walk", {R});
    auto tree = BtNode::sequence({BtNode::action("Walk")}, "Root");
    CHECK(f.tick(tree) == R);
    REQUIRE(f.trace.entries().size() == 1);
    CHECK(f.trace.entries()[0].to_line() == "tick=1 node=Walk status=R");
    CHECK(running_leaf_paths(tree) == std::vector<std::string>{"Root/Walk"});
}

TEST_CASE("backchain") {
    SUBCASE("wraps goal and achieving subtree in a fallback") {
        auto eat = BtNode::sequence({BtNode::action("Unwrap"), BtNode::action("Consume"), BtNode::action("Dispose")},
                                    "EatSandwich");
        auto tree = backchain(BtNode::condition("NotHungry"), eat);
        CHECK(tree.kind() == NodeKind::Fallback);
        REQUIRE(tree.children().size() == 2);
        CHECK(tree.children()[0].id() == "NotHungry");
        CHECK(tree.children()[1].structurally_equal(eat));
    }
    SUBCASE("nests") {
        auto tree = backchain(BtNode::condition("C"), backchain(BtNode::condition("C2"), BtNode::action("A")));
        auto expected = BtNode::fallback(
            {BtNode::condition("C"), BtNode::fallback({BtNode::condition("C2"), BtNode::action("A")})});
        CHECK(tree.structurally_equal(expected));
    }
    SUBCASE("satisfied goal performs no action") {
        Fixture f;
        f.leaves.condition("NotHungry", {S});
        f.leaves.action("Unwrap", {S});
        f.leaves.action("EatApple", {S});
        auto tree = backchain(BtNode::condition("NotHungry"),
                              BtNode::fallback({BtNode::action("Unwrap"), BtNode::action("EatApple")}));
        CHECK(f.tick(tree) == S);
        CHECK(f.leaves.ticks("Unwrap") == 0);
        CHECK(f.leaves.ticks("EatApple") == 0);
    }
    SUBCASE("goal must be condition-only") {
        CHECK(error_code([] { (void)backchain(BtNode::action("A"), BtNode::action("B")); }) == BtErrc::InvalidTree);
    }
}
