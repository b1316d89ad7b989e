#include <thread>

#include "doctest.h"
#include "hfsmbt/hfsm/executive.hpp"
#include "hfsmbt/mirror/mirror.hpp"
#include "hfsmbt/server/net.hpp"

using namespace hfsmbt;
using namespace hfsmbt::hfsm;
using namespace hfsmbt::mirror;
using namespace std::chrono_literals;

namespace {

MirrorEvent ev(std::uint64_t seq, EventKind kind, std::string state = {}) {
    MirrorEvent e;
    e.seq = seq;
    e.kind = kind;
    e.state = std::move(state);
    return e;
}

std::unique_ptr<LambdaState> after(const std::string& name, int steps, std::string outcome = "done") {
    auto n = std::make_shared<int>(0);
    return std::make_unique<LambdaState>(name, std::vector<std::string>{outcome},
                                         [n, steps, outcome](StateContext&) -> std::optional<std::string> {
                                             return ++*n % steps == 0 ? std::optional(outcome) : std::nullopt;
                                         });
}

std::unique_ptr<LambdaState> poisoned(const std::string& name) {
    auto s = std::make_unique<LambdaState>(name, std::vector<std::string>{"done"},
                                           [](StateContext&) -> std::optional<std::string> {
                                               throw std::logic_error("poisoned state executed");
                                           });
    s->enter = [](StateContext&) { throw std::logic_error("poisoned state entered"); };
    return s;
}

/// Root { A, Inner { B, C } } with the given leaf factory.
template <typename Make>
std::unique_ptr<StateMachine> topology(Make make) {
    auto root = std::make_unique<StateMachine>("Root", std::vector<std::string>{"finished"});
    auto inner = std::make_unique<StateMachine>("Inner", std::vector<std::string>{"done"});
    inner->add_state(make("B"), {{"done", {"C"}}});
    inner->add_state(make("C"), {{"done", {"done"}}});
    root->add_state(make("A"), {{"done", {"Inner"}}});
    root->add_state(std::move(inner), {{"done", {"finished"}}});
    return root;
}

std::optional<nlohmann::json> next_event(MirrorClient& c, const std::string& kind, std::chrono::milliseconds t = 2s) {
    const auto deadline = std::chrono::steady_clock::now() + t;
    while (std::chrono::steady_clock::now() < deadline) {
        auto f = c.next(50ms);
        if (f && f->value("kind", "") == kind) {
            return f;
        }
    }
    return std::nullopt;
}

}  // namespace

TEST_CASE("replay basics") {
    CHECK(replay({}).empty());
    const std::vector<MirrorEvent> log{ev(1, EventKind::BehaviorStarted), ev(2, EventKind::StateEntered, "/R/A"),
                                       ev(3, EventKind::OutcomeEmitted, "/R/A"), ev(4, EventKind::StateExited, "/R/A"),
                                       ev(5, EventKind::StateEntered, "/R/M"), ev(6, EventKind::StateEntered, "/R/M/X"),
                                       ev(7, EventKind::StateExited, "/R/M"), ev(8, EventKind::BehaviorFinished)};
    const auto t = replay(log);
    REQUIRE(t.size() == 6);
    CHECK(t[0] == TimelineStep{2, {"/R/A"}});
    CHECK(t[1] == TimelineStep{4, {}});
    CHECK(t[3] == TimelineStep{6, {"/R/M", "/R/M/X"}});
    CHECK(t[4] == TimelineStep{7, {}});
    CHECK(visits(t) == std::vector<std::string>{"/R/A", "/R/M", "/R/M/X"});

    auto gap = log;
    gap.erase(gap.begin() + 3);
    try {
        (void)replay(gap);
        FAIL("expected SeqGap");
    } catch (const SeqGap& e) {
        CHECK(e.expected == 4);
        CHECK(e.got == 5);
    }
}

TEST_CASE("replay of an executive log matches its own history without running states") {
    auto live = topology([](const std::string& n) { return after(n, 2); });
    CommandQueue q;
    EventLog log;
    Executive exec(*live, q, ExecutiveConfig{1ms, AutonomyLevel::Full});
    exec.add_sink(log.sink());
    CHECK(exec.execute() == "finished");

    std::vector<std::string> entered;
    for (const auto& e : log.events()) {
        if (e.kind == EventKind::StateEntered) {
            entered.push_back(e.state);
        }
    }
    auto dead = topology(poisoned);
    Timeline t;
    CHECK_NOTHROW(t = replay(log.events(), *dead));
    CHECK(visits(t) == entered);
    CHECK(visits(t) == std::vector<std::string>{"/Root/A", "/Root/Inner", "/Root/Inner/B", "/Root/Inner/C"});
    CHECK(t.back().active.empty());

    auto other = std::make_unique<StateMachine>("Root", std::vector<std::string>{"finished"});
    other->add_state(poisoned("A"), {{"done", {"finished"}}});
    CHECK_THROWS_AS((void)replay(log.events(), *other), std::invalid_argument);
}

TEST_CASE("snapshot then stream; commands and errors") {
    CommandQueue q;
    MirrorConfig cfg;
    cfg.port = 0;
    MirrorServer srv(q, [] { return std::string("S..\n.#.\n"); }, cfg);
    srv.start();

    MirrorEvent entered = ev(1, EventKind::StateEntered, "/Root/A");
    srv.publish(entered);
    MirrorEvent fb = ev(2, EventKind::BtFeedback, "/Root/A");
    fb.robot_pose = Pose{1, 2, 0};
    fb.active_nodes = {"FollowPath"};
    srv.publish(fb);

    MirrorClient a("127.0.0.1", srv.port());
    auto snap = a.next(2s);
    REQUIRE(snap);
    CHECK((*snap)["type"] == "snapshot");
    CHECK((*snap)["active"] == nlohmann::json::array({"/Root/A"}));
    CHECK((*snap)["seq"] == 2);
    CHECK((*snap)["last_feedback"]["robot_pose"]["x"] == 1.0);

    MirrorClient b("127.0.0.1", srv.port());
    REQUIRE(b.next(2s));
    for (int i = 0; i < 100 && srv.clients() < 2; ++i) {
        std::this_thread::sleep_for(5ms);
    }
    REQUIRE(srv.clients() == 2);

    MirrorEvent level = ev(3, EventKind::AutonomyChanged);
    level.level = AutonomyLevel::Full;
    srv.publish(level);
    for (auto* c : {&a, &b}) {
        auto f = next_event(*c, "autonomy_changed");
        REQUIRE(f);
        CHECK((*f)["seq"] == 3);
        CHECK((*f)["level"] == "full");
    }
    CHECK(srv.snapshot().autonomy == AutonomyLevel::Full);

    a.send(R"({"type":"warp_drive"})");
    auto err = a.next(2s);
    REQUIRE(err);
    CHECK((*err)["type"] == "error");
    CHECK((*err)["received"] == R"({"type":"warp_drive"})");
    a.send("not json at all");
    err = a.next(2s);
    REQUIRE(err);
    CHECK((*err)["type"] == "error");
    CHECK_FALSE(b.next(100ms));

    a.send(OperatorCommand::confirm("/Root/A", "done"));
    REQUIRE(q.wait_for(2s));
    const auto cmds = q.drain();
    REQUIRE(cmds.size() == 1);
    CHECK(cmds[0].type == CommandType::ConfirmTransition);
    CHECK(cmds[0].state == "/Root/A");

    // A client leaving does not disturb the others.
    a.close();
    srv.publish(ev(4, EventKind::StateExited, "/Root/A"));
    CHECK(next_event(b, "state_exited"));

    CHECK(fetch_world("127.0.0.1", srv.port()) == "S..\n.#.\n");
    srv.stop();
    CHECK(b.next(1s) == std::nullopt);
}

TEST_CASE("mirror attached to a running executive") {
    StateMachine root("Root", {"finished"});
    root.add_state(std::make_unique<LambdaState>("Hold", std::vector<std::string>{"done"},
                                                 [](StateContext& ctx) -> std::optional<std::string> {
                                                     if (ctx.supervisor.autonomy() == AutonomyLevel::Full) {
                                                         return "done";
                                                     }
                                                     return std::nullopt;
                                                 }),
                   {{"done", {"finished"}}});
    CommandQueue q;
    MirrorConfig cfg;
    cfg.port = 0;
    MirrorServer srv(q, {}, cfg, AutonomyLevel::Low);
    srv.start();
    EventLog log;
    Executive exec(root, q, ExecutiveConfig{5ms, AutonomyLevel::Low});
    exec.add_sink(log.sink());
    exec.add_sink(srv.sink());
    std::string outcome;
    std::thread runner([&] { outcome = exec.execute(); });

    while (exec.active_path().empty()) {
        std::this_thread::sleep_for(2ms);
    }
    MirrorClient late("127.0.0.1", srv.port());
    auto snap = late.next(2s);
    REQUIRE(snap);
    CHECK((*snap)["active"] == nlohmann::json(exec.active_path()));
    CHECK((*snap)["autonomy"] == "low");

    late.send(OperatorCommand::set_autonomy(AutonomyLevel::Full));
    CHECK(next_event(late, "autonomy_changed"));
    auto ack = next_event(late, "command_ack");
    REQUIRE(ack);
    CHECK((*ack)["command"]["type"] == "set_autonomy");
    runner.join();
    CHECK(outcome == "finished");
    CHECK(next_event(late, "behavior_finished"));
}

TEST_CASE("mirror port in use") {
    CommandQueue q;
    MirrorConfig cfg;
    cfg.port = 0;
    MirrorServer first(q, {}, cfg);
    first.start();
    cfg.port = first.port();
    MirrorServer second(q, {}, cfg);
    CHECK_THROWS_AS(second.start(), server::PortInUse);
}
