#include "hfsmbt/server/client.hpp"

#include <unistd.h>

namespace hfsmbt::server {

BtClient::BtClient(const std::string& host, std::uint16_t port, std::chrono::milliseconds connect_timeout)
    : socket_(LineSocket::connect(host, port, connect_timeout)),
      tag_(std::to_string(::getpid()) + "-" + std::to_string(reinterpret_cast<std::uintptr_t>(this) & 0xffff)) {}

std::string BtClient::next_id(const std::string& prefix) {
    return prefix + "-" + tag_ + "-" + std::to_string(++counter_);
}

void BtClient::send(const Message& m) {
    const std::string line = encode(m);
    if (tap_) {
        tap_(true, line);
    }
    socket_.send_line(line);
}

std::optional<Message> BtClient::poll() { return wait(std::chrono::milliseconds(0)); }

std::optional<Message> BtClient::wait(std::chrono::milliseconds timeout) {
    auto line = socket_.read_line(timeout);
    if (!line) {
        return std::nullopt;
    }
    if (tap_) {
        tap_(false, *line);
    }
    try {
        return decode(*line);
    } catch (const ProtocolError& e) {
        throw TransportError(std::string("unreadable server message: ") + e.what());
    }
}

Message BtClient::load(const std::vector<std::string>& files, std::chrono::milliseconds timeout) {
    const std::string id = next_id("load");
    send(Message::load_goal(id, files));
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    while (std::chrono::steady_clock::now() < deadline) {
        const auto left =
            std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        auto m = wait(left);
        if (m && m->id == id && (m->type == MessageType::LoadResult || m->type == MessageType::Reject)) {
            return *m;
        }
    }
    throw TransportError("no load result within " + std::to_string(timeout.count()) + " ms");
}

Message BtClient::execute(const std::string& behavior, const PoseList& goals,
                          const std::function<bool(const Message&)>& on_feedback, std::chrono::milliseconds timeout) {
    const std::string id = next_id("exec");
    send(Message::execute_goal(id, behavior, goals));
    bool canceled = false;
    auto last = std::chrono::steady_clock::now();
    while (true) {
        auto m = wait(std::chrono::milliseconds(20));
        const auto now = std::chrono::steady_clock::now();
        if (!m) {
            if (now - last > timeout) {
                throw TransportError("no message from server within " + std::to_string(timeout.count()) + " ms");
            }
            continue;
        }
        last = now;
        if (m->id != id) {
            continue;
        }
        if (m->type == MessageType::ExecuteResult || m->type == MessageType::Reject) {
            return *m;
        }
        if (m->type == MessageType::ExecuteFeedback && on_feedback && on_feedback(*m) && !canceled) {
            canceled = true;
            send(Message::cancel(id));
        }
    }
}

}  // namespace hfsmbt::server
