// hfsmbt: serve | run | validate

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "hfsmbt/app/run.hpp"
#include "hfsmbt/nav/sim.hpp"
#include "hfsmbt/xml/bt_xml.hpp"

using namespace hfsmbt;

namespace {

std::optional<std::uint16_t> env_port(const char* name) {
    const char* v = std::getenv(name);
    if (!v || !*v) {
        return std::nullopt;
    }
    try {
        const int p = std::stoi(v);
        if (p >= 0 && p <= 65535) {
            return static_cast<std::uint16_t>(p);
        }
    } catch (const std::exception&) {
    }
    std::cerr << "ignoring " << name << "=" << v << "\n";
    return std::nullopt;
}

void wait_for_signal() {
    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    int sig = 0;
    sigwait(&set, &sig);
}

int validate_files(const std::vector<std::string>& files, bool check_leaves) {
    nav::NavSim sim(nav::GridWorld(1, 1));
    bt::LeafRegistry registry;
    sim.register_leaves(registry);
    std::map<std::string, bt::BtNode> known;
    auto lookup = [&](const std::string& id) -> const bt::BtNode* {
        const auto it = known.find(id);
        return it == known.end() ? nullptr : &it->second;
    };
    int issues = 0;
    for (const auto& file : files) {
        std::ifstream in(file);
        if (!in) {
            std::cout << file << ": cannot read file\n";
            ++issues;
            continue;
        }
        std::ostringstream text;
        text << in.rdbuf();
        auto found = xml::validate_xml(text.str(), registry, lookup);
        if (!check_leaves) {
            std::erase_if(found, [](const xml::ValidationIssue& i) {
                return i.code == "UnregisteredLeaf" || i.code == "LeafKindMismatch" || i.code == "MissingPortSource";
            });
        }
        for (const auto& i : found) {
            std::cout << file << ": " << i.to_string() << "\n";
        }
        issues += static_cast<int>(found.size());
        if (found.empty() || !check_leaves) {
            try {
                auto doc = xml::parse_bt_xml(text.str(), lookup, file);
                for (auto& [id, tree] : doc.trees) {
                    known.insert_or_assign(id, std::move(tree));
                }
            } catch (const xml::BtXmlError&) {
            }
        }
    }
    std::cout << files.size() << " file(s), " << issues << " issue(s)\n";
    return issues == 0 ? app::kExitOk : app::kExitFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App cli{"Hierarchical state machines supervising behavior trees"};
    cli.require_subcommand(1);

    std::optional<std::uint16_t> bt_port;
    std::optional<std::uint16_t> mirror_port;
    std::optional<std::string> world;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> schedule;
    int tick_ms = 100;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--bt-port", bt_port, "BT server port (env HFSMBT_BT_PORT)");
        sub->add_option("--mirror-port", mirror_port, "Mirror port (env HFSMBT_MIRROR_PORT)");
        sub->add_option("--world", world, "World map file")->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "Seed for a random 20x20 world");
        sub->add_option("--schedule", schedule, "Obstacle schedule JSON")->check(CLI::ExistingFile);
        sub->add_option("--tick-ms", tick_ms, "BT tick and executive period")->check(CLI::Range(1, 60000));
    };

    auto* serve = cli.add_subcommand("serve", "Run the BT server, simulator and mirror until interrupted");
    add_common(serve);
    std::string behavior_dir = ".";
    serve->add_option("--behavior-dir", behavior_dir, "Base directory for relative load paths");

    auto* run = cli.add_subcommand("run", "Execute a behavior manifest");
    add_common(run);
    std::string manifest;
    run->add_option("manifest", manifest, "Behavior manifest (YAML)")->required();
    std::string autonomy = "high";
    run->add_option("--autonomy", autonomy, "off, low, high or full")->check(CLI::IsMember({"off", "low", "high", "full"}));
    std::optional<std::string> script;
    run->add_option("--script", script, "Timed operator commands")->check(CLI::ExistingFile);
    bool external = false;
    run->add_flag("--external", external, "Use a server already listening on --bt-port");
    std::optional<std::string> log_path;
    std::optional<std::string> trace_path;
    run->add_option("--log", log_path, "Write the event log (JSON lines)");
    run->add_option("--trace", trace_path, "Write the simulator trace");
    bool quiet = false;
    run->add_flag("-q,--quiet", quiet, "Only report errors");

    auto* validate = cli.add_subcommand("validate", "Check behavior tree files");
    std::vector<std::string> files;
    validate->add_option("files", files, "XML files")->required();
    bool any_leaf = false;
    validate->add_flag("--any-leaf", any_leaf, "Skip leaf registration and port checks");

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return cli.exit(e) == 0 ? 0 : app::kExitManifest;
    }

    if (!bt_port) {
        bt_port = env_port("HFSMBT_BT_PORT");
    }
    if (!mirror_port) {
        mirror_port = env_port("HFSMBT_MIRROR_PORT");
    }
    const app::WorldOptions world_opts{world, seed, schedule};

    if (*serve) {
        sigset_t set;
        sigemptyset(&set);
        sigaddset(&set, SIGINT);
        sigaddset(&set, SIGTERM);
        pthread_sigmask(SIG_BLOCK, &set, nullptr);
        app::ServeOptions o;
        o.bt_port = bt_port.value_or(7801);
        o.mirror_port = mirror_port.value_or(7802);
        o.world = world_opts;
        o.tick = std::chrono::milliseconds(tick_ms);
        o.behavior_dir = behavior_dir;
        return app::serve(o, std::cout, std::cerr, wait_for_signal);
    }
    if (*run) {
        app::RunOptions o;
        o.manifest = manifest;
        o.bt_port = bt_port.value_or(external ? 7801 : 0);
        o.external = external;
        o.mirror_port = mirror_port;
        o.world = world_opts;
        o.tick = std::chrono::milliseconds(tick_ms);
        o.autonomy = *hfsm::parse_autonomy(autonomy);
        o.script = script;
        o.log_path = log_path;
        o.trace_path = trace_path;
        o.quiet = quiet;
        return app::run_behavior(o, std::cout, std::cerr).exit_code;
    }
    return validate_files(files, !any_leaf);
}
