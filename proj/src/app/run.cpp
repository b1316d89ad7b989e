#include "hfsmbt/app/run.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "hfsmbt/app/manifest.hpp"
#include "hfsmbt/app/script.hpp"
#include "hfsmbt/hfsm/error.hpp"
#include "hfsmbt/hfsm/executive.hpp"
#include "hfsmbt/mirror/mirror.hpp"
#include "hfsmbt/nav/sim.hpp"
#include "hfsmbt/server/messages.hpp"
#include "hfsmbt/server/server.hpp"

namespace hfsmbt::app {

using hfsm::EventKind;
using hfsm::MirrorEvent;

nav::GridWorld make_world(const WorldOptions& o) {
    if (o.world) {
        return nav::GridWorld::load(*o.world);
    }
    return nav::GridWorld::random(o.seed.value_or(kDefaultSeed), 20, 20);
}

namespace {

std::string describe(const MirrorEvent& e) {
    std::ostringstream s;
    s << "[" << std::setw(6) << e.timestamp_ms << " ms] " << hfsm::to_string(e.kind);
    switch (e.kind) {
        case EventKind::BehaviorStarted:
            s << " " << e.name;
            break;
        case EventKind::StateEntered:
        case EventKind::StateExited:
            s << " " << e.state;
            break;
        case EventKind::OutcomeEmitted:
            s << " " << e.state << " -> " << e.outcome << (e.forced ? " (forced)" : "")
              << (e.confirmed ? " (confirmed)" : "");
            break;
        case EventKind::TransitionBlocked:
            s << " " << e.state << " -> " << e.outcome << " needs " << hfsm::to_string(e.required_level);
            break;
        case EventKind::AutonomyChanged:
            s << " " << hfsm::to_string(e.level);
            break;
        case EventKind::BehaviorFinished:
            s << " " << e.outcome;
            break;
        case EventKind::CommandAck:
            s << " " << e.command.dump() << (e.error.empty() ? "" : " error: " + e.error);
            break;
        case EventKind::BtFeedback:
            break;
    }
    return s.str();
}

/// In-process BT server with the navigation simulator.
struct LocalServer {
    LocalServer(nav::GridWorld world, std::vector<nav::ObstacleChange> schedule, const server::ServerConfig& cfg)
        : sim(std::move(world), std::move(schedule)) {
        sim.register_leaves(registry);
        server::TickHooks hooks{[this](bt::Blackboard& bb) { sim.before_tick(bb); },
                                [this](bt::Blackboard& bb) { sim.after_tick(bb); }};
        srv = std::make_unique<server::BtServer>(registry, cfg, hooks);
    }

    nav::NavSim sim;
    bt::LeafRegistry registry;
    std::unique_ptr<server::BtServer> srv;
};

}  // namespace

RunReport run_behavior(const RunOptions& o, std::ostream& out, std::ostream& err) {
    const auto t0 = std::chrono::steady_clock::now();
    RunReport report;
    auto finish = [&](int code, std::string error = {}) {
        report.exit_code = code;
        report.error = std::move(error);
        if (!report.error.empty()) {
            err << report.error << "\n";
        }
        report.wall = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0);
        return report;
    };

    Manifest manifest;
    std::vector<ScriptLine> script;
    WorldOptions world_opts;
    std::vector<nav::ObstacleChange> schedule;
    try {
        manifest = load_manifest(o.manifest);
        if (o.script) {
            script = load_script(*o.script);
        }
        world_opts.world = o.world.world ? o.world.world : (o.world.seed ? std::nullopt : manifest.world);
        world_opts.seed = o.world.seed ? o.world.seed : manifest.seed;
        world_opts.schedule = o.world.schedule ? o.world.schedule : manifest.schedule;
        if (world_opts.schedule) {
            schedule = nav::load_schedule(*world_opts.schedule);
        }
    } catch (const ManifestError& e) {
        return finish(kExitManifest, e.what());
    } catch (const ScriptError& e) {
        return finish(kExitManifest, e.what());
    } catch (const nav::NavError& e) {
        return finish(kExitManifest, e.what());
    }

    std::unique_ptr<LocalServer> local;
    std::mutex wire_mutex;
    std::uint16_t bt_port = o.bt_port;
    std::string world_text;
    try {
        if (!o.external) {
            server::ServerConfig cfg;
            cfg.host = o.host;
            cfg.port = o.bt_port;
            cfg.tick_period = o.tick;
            cfg.behavior_dir = std::filesystem::path(o.manifest).parent_path().string();
            local = std::make_unique<LocalServer>(make_world(world_opts), std::move(schedule), cfg);
            local->srv->set_tap([&](bool outbound, const std::string& line) {
                std::lock_guard lock(wire_mutex);
                report.wire.push_back((outbound ? "> " : "< ") + line);
            });
            local->srv->start();
            bt_port = local->srv->port();
            world_text = local->sim.world_text();
        }
    } catch (const server::PortInUse& e) {
        return finish(kExitEnvironment, e.what());
    } catch (const server::TransportError& e) {
        return finish(kExitEnvironment, e.what());
    } catch (const nav::NavError& e) {
        return finish(kExitManifest, e.what());
    }

    flexbt::BridgeConfig bridge;
    bridge.host = o.host;
    bridge.port = bt_port;
    bridge.feedback_timeout = std::max(std::chrono::milliseconds(2000), o.tick * 5);
    std::unique_ptr<hfsm::StateMachine> machine;
    try {
        machine = build_machine(manifest, bridge);
    } catch (const hfsm::HfsmError& e) {
        return finish(kExitManifest, manifest.source + ": " + e.what());
    }

    hfsm::CommandQueue queue;
    hfsm::EventLog log;
    hfsm::Executive exec(*machine, queue, hfsm::ExecutiveConfig{o.tick, o.autonomy});
    exec.add_sink(log.sink());
    if (!o.quiet) {
        exec.add_sink([&out](const MirrorEvent& e) {
            if (hfsm::is_control_event(e.kind)) {
                out << describe(e) << "\n";
            }
        });
    }
    if (local) {
        // Plan computations per state visit.
        exec.add_sink([&](const MirrorEvent& e) {
            if (e.kind == EventKind::StateEntered) {
                report.visits.push_back({e.state, local->sim.plan_count()});
            } else if (e.kind == EventKind::StateExited) {
                for (auto it = report.visits.rbegin(); it != report.visits.rend(); ++it) {
                    if (it->state == e.state) {
                        it->plans = local->sim.plan_count() - it->plans;
                        break;
                    }
                }
            }
        });
    }

    std::unique_ptr<mirror::MirrorServer> mirror_srv;
    if (o.mirror_port) {
        mirror::MirrorConfig mc;
        mc.host = o.host;
        mc.port = *o.mirror_port;
        mirror_srv = std::make_unique<mirror::MirrorServer>(
            queue, [world_text] { return world_text; }, mc, o.autonomy);
        try {
            mirror_srv->start();
        } catch (const std::exception& e) {
            return finish(kExitEnvironment, e.what());
        }
        exec.add_sink(mirror_srv->sink());
        if (!o.quiet) {
            out << "mirror on port " << mirror_srv->port() << "\n";
        }
    }

    ScriptPlayer player(std::move(script), queue);
    exec.add_sink(player.sink());
    player.start();

    try {
        report.outcome = exec.execute();
    } catch (const hfsm::HfsmError& e) {
        player.stop();
        report.events = log.events();
        return finish(kExitFailed, std::string("executive error: ") + e.what());
    }
    player.stop();
    report.script_fired = player.fired();
    if (mirror_srv) {
        mirror_srv->stop();
    }
    if (local) {
        local->srv->stop();
        report.trace = local->sim.trace();
        report.blackboard_keys = local->srv->blackboard().keys();
        if (o.trace_path) {
            std::ofstream t(*o.trace_path);
            local->sim.write_trace(t);
        }
    }
    report.events = log.events();
    if (o.log_path) {
        std::ofstream l(*o.log_path);
        l << log.to_jsonl();
    }
    if (!o.quiet) {
        out << "outcome " << report.outcome << "\n";
    }
    return finish(hfsm::is_finished_outcome(report.outcome) ? kExitOk : kExitFailed);
}

int serve(const ServeOptions& o, std::ostream& out, std::ostream& err, const std::function<void()>& wait) {
    std::unique_ptr<LocalServer> local;
    hfsm::CommandQueue queue;
    std::unique_ptr<mirror::MirrorServer> mirror_srv;
    try {
        server::ServerConfig cfg;
        cfg.host = o.host;
        cfg.port = o.bt_port;
        cfg.tick_period = o.tick;
        cfg.behavior_dir = o.behavior_dir;
        std::vector<nav::ObstacleChange> schedule;
        if (o.world.schedule) {
            schedule = nav::load_schedule(*o.world.schedule);
        }
        local = std::make_unique<LocalServer>(make_world(o.world), std::move(schedule), cfg);
        const auto world_text = local->sim.world_text();
        mirror::MirrorConfig mc;
        mc.host = o.host;
        mc.port = o.mirror_port;
        mirror_srv = std::make_unique<mirror::MirrorServer>(queue, [world_text] { return world_text; }, mc);
        local->srv->start();
        mirror_srv->start();
    } catch (const server::PortInUse& e) {
        err << e.what() << "\n";
        return kExitEnvironment;
    } catch (const server::TransportError& e) {
        err << e.what() << "\n";
        return kExitEnvironment;
    } catch (const nav::NavError& e) {
        err << e.what() << "\n";
        return kExitManifest;
    }

    // Without an executive the mirror only relays BT feedback; commands are
    // answered with an error ack.
    std::atomic<std::uint64_t> seq{0};
    std::mutex publish_mutex;
    const auto start = std::chrono::steady_clock::now();
    auto stamp = [&](MirrorEvent& e) {
        e.seq = ++seq;
        e.timestamp_ms =
            std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
    };
    local->srv->set_tap([&](bool outbound, const std::string& line) {
        if (!outbound) {
            return;
        }
        try {
            const auto m = server::decode(line);
            if (m.type != server::MessageType::ExecuteFeedback) {
                return;
            }
            MirrorEvent e;
            e.kind = EventKind::BtFeedback;
            e.active_nodes = m.active_nodes;
            e.robot_pose = m.robot_pose;
            e.elapsed_ms = m.elapsed_ms;
            std::lock_guard lock(publish_mutex);
            stamp(e);
            mirror_srv->publish(e);
        } catch (const server::ProtocolError&) {
        }
    });
    std::atomic<bool> done{false};
    std::thread acker([&] {
        while (!done) {
            if (!queue.wait_for(std::chrono::milliseconds(100))) {
                continue;
            }
            for (const auto& c : queue.drain()) {
                MirrorEvent e;
                e.kind = EventKind::CommandAck;
                e.command = hfsm::to_json(c);
                e.error = "NoBehaviorRunning";
                std::lock_guard lock(publish_mutex);
                stamp(e);
                mirror_srv->publish(e);
            }
        }
    });

    out << "ready bt=" << local->srv->port() << " mirror=" << mirror_srv->port() << std::endl;
    if (o.on_ready) {
        o.on_ready(local->srv->port(), mirror_srv->port());
    }
    wait();
    local->srv->stop();
    done = true;
    acker.join();
    mirror_srv->stop();
    out << "stopped" << std::endl;
    return kExitOk;
}

}  // namespace hfsmbt::app
