#pragma once

// In-process server on an ephemeral port with the navigation leaves.

#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "hfsmbt/nav/sim.hpp"
#include "hfsmbt/server/server.hpp"

namespace hfsmbt::testing {

inline std::string behavior(const std::string& file) { return std::string(HFSMBT_FIXTURE_DIR) + "/behaviors/" + file; }

struct NavServer {
    explicit NavServer(nav::GridWorld world, std::vector<nav::ObstacleChange> schedule = {},
                       std::chrono::milliseconds tick = std::chrono::milliseconds(10))
        : sim(std::move(world), std::move(schedule)) {
        sim.register_leaves(registry);
        server::ServerConfig cfg;
        cfg.port = 0;
        cfg.tick_period = tick;
        server::TickHooks hooks{[this](bt::Blackboard& bb) { sim.before_tick(bb); },
                                [this](bt::Blackboard& bb) { sim.after_tick(bb); }};
        srv = std::make_unique<server::BtServer>(registry, cfg, hooks);
        srv->set_tap([this](bool out, const std::string& line) {
            std::lock_guard lock(wire_mutex);
            wire.push_back((out ? "> " : "< ") + line);
        });
        srv->start();
    }

    std::vector<std::string> wire_log() {
        std::lock_guard lock(wire_mutex);
        return wire;
    }

    nav::NavSim sim;
    bt::LeafRegistry registry;
    std::unique_ptr<server::BtServer> srv;
    std::mutex wire_mutex;
    std::vector<std::string> wire;
};

}  // namespace hfsmbt::testing
