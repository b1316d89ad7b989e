#include "hfsmbt/server/server.hpp"

#include <deque>
#include <filesystem>

#include "hfsmbt/bt/engine.hpp"
#include "hfsmbt/bt/error.hpp"
#include "hfsmbt/xml/bt_xml.hpp"

namespace hfsmbt::server {

using namespace std::chrono_literals;

struct BtServer::Connection {
    LineSocket socket;
    std::thread reader;
    std::thread writer;

    std::mutex mutex;
    std::condition_variable cv;
    std::deque<Message> outbox;
    std::size_t feedback_queued = 0;
    std::uint64_t dropped = 0;
    bool closing = false;
    std::atomic<bool> finished{false};
};

struct BtServer::Execution {
    std::string id;
    std::string behavior;
    PoseList goals;
    std::weak_ptr<Connection> conn;
    std::atomic<bool> cancel{false};
    std::mutex mutex;
    std::condition_variable cv;
};

BtServer::BtServer(const bt::LeafRegistry& registry, ServerConfig config, TickHooks hooks)
    : registry_(registry), config_(std::move(config)), hooks_(std::move(hooks)) {}

BtServer::~BtServer() { stop(); }

void BtServer::set_tap(WireTap tap) {
    std::lock_guard lock(tap_mutex_);
    tap_ = std::move(tap);
}

void BtServer::start() {
    listener_ = std::make_unique<Listener>(config_.host, config_.port);
    port_ = listener_->port();
    running_ = true;
    accept_thread_ = std::thread([this] { accept_loop(); });
}

void BtServer::stop() {
    {
        std::lock_guard lock(exec_mutex_);
        if (execution_) {
            execution_->cancel = true;
            execution_->cv.notify_all();
        }
    }
    if (exec_thread_.joinable()) {
        exec_thread_.join();
    }
    if (!running_.exchange(false)) {
        return;
    }
    if (accept_thread_.joinable()) {
        accept_thread_.join();
    }
    std::list<std::shared_ptr<Connection>> conns;
    {
        std::lock_guard lock(conn_mutex_);
        conns.swap(connections_);
    }
    for (auto& c : conns) {
        if (c->reader.joinable()) {
            c->reader.join();
        }
    }
    if (listener_) {
        listener_->close();
    }
}

void BtServer::accept_loop() {
    while (running_) {
        std::optional<LineSocket> sock;
        try {
            sock = listener_->accept(50ms);
        } catch (const TransportError&) {
            break;
        }
        std::lock_guard lock(conn_mutex_);
        for (auto it = connections_.begin(); it != connections_.end();) {
            if ((*it)->finished) {
                (*it)->reader.join();
                it = connections_.erase(it);
            } else {
                ++it;
            }
        }
        if (!sock) {
            continue;
        }
        auto conn = std::make_shared<Connection>();
        conn->socket = std::move(*sock);
        connections_.push_back(conn);
        conn->reader = std::thread([this, conn] { serve(conn); });
    }
}

void BtServer::send(Connection& conn, const Message& msg, bool droppable) {
    {
        std::lock_guard lock(conn.mutex);
        if (conn.closing) {
            return;
        }
        if (droppable) {
            if (conn.feedback_queued >= config_.feedback_capacity) {
                for (auto it = conn.outbox.begin(); it != conn.outbox.end(); ++it) {
                    if (it->type == MessageType::ExecuteFeedback) {
                        conn.outbox.erase(it);
                        --conn.feedback_queued;
                        ++conn.dropped;
                        break;
                    }
                }
            }
            ++conn.feedback_queued;
        }
        conn.outbox.push_back(msg);
    }
    conn.cv.notify_all();
}

void BtServer::serve(const std::shared_ptr<Connection>& conn) {
    conn->writer = std::thread([this, conn] {
        while (true) {
            Message msg;
            {
                std::unique_lock lock(conn->mutex);
                conn->cv.wait(lock, [&] { return !conn->outbox.empty() || conn->closing; });
                if (conn->outbox.empty()) {
                    return;
                }
                msg = std::move(conn->outbox.front());
                conn->outbox.pop_front();
                if (msg.type == MessageType::ExecuteFeedback) {
                    --conn->feedback_queued;
                    msg.feedback_dropped = conn->dropped;
                }
            }
            const std::string line = encode(msg);
            {
                std::lock_guard lock(tap_mutex_);
                if (tap_) {
                    tap_(true, line);
                }
            }
            try {
                conn->socket.send_line(line);
            } catch (const TransportError&) {
                std::lock_guard lock(conn->mutex);
                conn->outbox.clear();
                conn->feedback_queued = 0;
            }
        }
    });

    try {
        while (running_) {
            auto line = conn->socket.read_line(50ms);
            if (!line) {
                continue;
            }
            {
                std::lock_guard lock(tap_mutex_);
                if (tap_) {
                    tap_(false, *line);
                }
            }
            Message msg;
            try {
                msg = decode(*line);
            } catch (const ProtocolError& e) {
                send(*conn, Message::reject("", e.what()), false);
                continue;
            }
            dispatch(conn, msg);
        }
    } catch (const TransportError&) {
        // Peer went away.
    }
    finish_connection(conn);
}

void BtServer::finish_connection(const std::shared_ptr<Connection>& conn) {
    cancel_execution({}, conn.get());
    {
        std::lock_guard lock(conn->mutex);
        conn->closing = true;
    }
    conn->cv.notify_all();
    if (conn->writer.joinable()) {
        conn->writer.join();
    }
    conn->socket.shutdown();
    conn->socket.close();
    conn->finished = true;
}

void BtServer::dispatch(const std::shared_ptr<Connection>& conn, const Message& msg) {
    switch (msg.type) {
        case MessageType::LoadGoal:
            send(*conn, handle_load(msg), false);
            break;
        case MessageType::ExecuteGoal:
            start_execution(conn, msg);
            break;
        case MessageType::ExecuteCancel:
            cancel_execution(msg.id, conn.get());
            break;
        default:
            send(*conn, Message::reject(msg.id, std::string("unexpected message type ") + std::string(to_string(msg.type))),
                 false);
    }
}

Message BtServer::handle_load(const Message& goal) {
    Message result;
    result.type = MessageType::LoadResult;
    result.id = goal.id;
    std::lock_guard lock(store_mutex_);
    const xml::TreeLookup lookup = [this](const std::string& id) -> const bt::BtNode* {
        auto it = trees_.find(id);
        return it == trees_.end() ? nullptr : &it->second;
    };
    for (const auto& file : goal.files) {
        std::filesystem::path path(file);
        if (path.is_relative() && !config_.behavior_dir.empty()) {
            path = std::filesystem::path(config_.behavior_dir) / path;
        }
        try {
            const auto doc = xml::load_bt_file(path.string(), lookup);
            const auto issues = xml::validate(doc, registry_, lookup);
            if (!issues.empty()) {
                std::string text;
                for (const auto& issue : issues) {
                    text += (text.empty() ? "" : "; ") + issue.to_string();
                }
                result.errors.push_back({file, text});
                continue;
            }
            for (const auto& [id, tree] : doc.trees) {
                trees_.insert_or_assign(id, tree);
                result.loaded.push_back(id);
            }
        } catch (const xml::BtXmlError& e) {
            result.errors.push_back({file, e.what()});
        }
    }
    return result;
}

std::vector<std::string> BtServer::behaviors() const {
    std::lock_guard lock(store_mutex_);
    std::vector<std::string> out;
    for (const auto& [id, _] : trees_) {
        out.push_back(id);
    }
    return out;
}

void BtServer::start_execution(const std::shared_ptr<Connection>& conn, const Message& goal) {
    std::lock_guard lock(exec_mutex_);
    if (busy_) {
        send(*conn, Message::reject(goal.id, "busy"), false);
        return;
    }
    {
        std::lock_guard store(store_mutex_);
        if (!trees_.contains(goal.behavior_name)) {
            send(*conn, Message::result(goal.id, BtOutcome::Failure, "UnknownBehavior(" + goal.behavior_name + ")"),
                 false);
            return;
        }
    }
    if (exec_thread_.joinable()) {
        exec_thread_.join();
    }
    auto ex = std::make_shared<Execution>();
    ex->id = goal.id;
    ex->behavior = goal.behavior_name;
    ex->goals = goal.goals;
    ex->conn = conn;
    execution_ = ex;
    busy_ = true;
    exec_thread_ = std::thread([this, ex] { run_execution(ex); });
}

void BtServer::cancel_execution(const std::string& id, const Connection* owner) {
    std::lock_guard lock(exec_mutex_);
    if (!execution_) {
        return;
    }
    const auto conn = execution_->conn.lock();
    if (conn.get() != owner || (!id.empty() && execution_->id != id)) {
        return;
    }
    execution_->cancel = true;
    execution_->cv.notify_all();
}

void BtServer::run_execution(const std::shared_ptr<Execution>& ex) {
    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
    };
    auto deliver = [&](const Message& m, bool droppable) {
        if (auto conn = ex->conn.lock()) {
            send(*conn, m, droppable);
        }
    };

    BtOutcome outcome = BtOutcome::Failure;
    std::string error;
    try {
        std::map<std::string, bt::BtNode> snapshot;
        {
            std::lock_guard lock(store_mutex_);
            snapshot = trees_;
        }
        bt::BtNode tree = xml::instantiate(ex->behavior, [&](const std::string& id) -> const bt::BtNode* {
            auto it = snapshot.find(id);
            return it == snapshot.end() ? nullptr : &it->second;
        });
        if (ex->goals.size() == 1) {
            blackboard_.set("goal", ex->goals.front());
        } else if (ex->goals.size() > 1) {
            blackboard_.set("goals", ex->goals);
            blackboard_.set("goal", ex->goals.front());
        }

        bt::TreeExecutor exec(std::move(tree), blackboard_, registry_, nullptr, &ex->cancel);
        auto next = start;
        while (true) {
            if (ex->cancel) {
                exec.halt();
                outcome = BtOutcome::Canceled;
                break;
            }
            bt::NodeStatus status;
            try {
                if (hooks_.before) {
                    hooks_.before(blackboard_);
                }
                status = exec.tick();
                if (hooks_.after) {
                    hooks_.after(blackboard_);
                }
            } catch (const bt::BtError& e) {
                exec.halt();
                error = e.what();
                break;
            }
            Message fb;
            fb.type = MessageType::ExecuteFeedback;
            fb.id = ex->id;
            fb.active_nodes = bt::running_leaf_paths(exec.tree());
            if (auto pose = blackboard_.find("robot_pose")) {
                if (const auto* p = std::get_if<Pose>(&*pose)) {
                    fb.robot_pose = *p;
                }
            }
            fb.elapsed_ms = elapsed();
            deliver(fb, true);
            if (status == bt::NodeStatus::Success) {
                outcome = BtOutcome::Success;
                break;
            }
            if (status == bt::NodeStatus::Failure) {
                outcome = BtOutcome::Failure;
                break;
            }
            next += config_.tick_period;
            std::unique_lock lock(ex->mutex);
            ex->cv.wait_until(lock, next, [&] { return ex->cancel.load(); });
        }
    } catch (const xml::BtXmlError& e) {
        error = e.what();
    }

    std::lock_guard lock(exec_mutex_);
    deliver(Message::result(ex->id, outcome, error), false);
    execution_.reset();
    busy_ = false;
}

}  // namespace hfsmbt::server
