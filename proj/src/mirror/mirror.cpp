#include "hfsmbt/mirror/mirror.hpp"

#include <boost/asio.hpp>
#include <boost/beast.hpp>
#include <boost/beast/websocket.hpp>
#include <condition_variable>
#include <deque>
#include <future>
#include <set>
#include <thread>

#include "hfsmbt/server/net.hpp"

namespace hfsmbt::mirror {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;
using hfsm::EventKind;

nlohmann::json to_json(const Snapshot& s) {
    return {{"type", "snapshot"},
            {"seq", s.seq},
            {"active", s.active},
            {"autonomy", std::string(hfsm::to_string(s.autonomy))},
            {"last_feedback", s.last_feedback ? hfsm::to_json(*s.last_feedback) : nlohmann::json(nullptr)}};
}

namespace {

struct Frame {
    std::shared_ptr<const std::string> text;
    bool control = true;
};

nlohmann::json error_frame(const std::string& message, const std::string& received) {
    return {{"type", "error"}, {"error", message}, {"received", received}};
}

}  // namespace

class Session;

struct MirrorServer::Impl {
    hfsm::CommandQueue& commands;
    WorldText world;
    MirrorConfig config;

    asio::io_context ioc;
    std::optional<asio::executor_work_guard<asio::io_context::executor_type>> work;
    std::optional<tcp::acceptor> acceptor;
    std::thread thread;
    std::uint16_t bound = 0;

    // Touched on the io thread only.
    std::set<std::shared_ptr<Session>> sessions;

    mutable std::mutex snap_mutex;
    Snapshot snap;
    ActiveTracker tracker;

    Impl(hfsm::CommandQueue& q, WorldText w, MirrorConfig c) : commands(q), world(std::move(w)), config(c) {}

    void do_accept();
    void attach(const std::shared_ptr<Session>& s);
    void detach(const std::shared_ptr<Session>& s) { sessions.erase(s); }
    void broadcast(const Frame& f);
};

class Session : public std::enable_shared_from_this<Session> {
public:
    Session(tcp::socket socket, MirrorServer::Impl& owner) : stream_(std::move(socket)), owner_(owner) {}

    void start() { read_request(); }

    void enqueue(Frame f) {
        if (!ws_ || closing_) {
            return;
        }
        if (f.control) {
            if (++controls_ > owner_.config.control_capacity) {
                shutdown();
                return;
            }
        } else if (++feedbacks_ > owner_.config.feedback_capacity) {
            // Oldest queued feedback that is not currently being written.
            for (auto it = queue_.begin() + (writing_ ? 1 : 0); it != queue_.end(); ++it) {
                if (!it->control) {
                    queue_.erase(it);
                    --feedbacks_;
                    break;
                }
            }
        }
        queue_.push_back(std::move(f));
        write_next();
    }

    void shutdown() {
        if (closing_) {
            return;
        }
        closing_ = true;
        owner_.detach(shared_from_this());
        if (ws_) {
            beast::get_lowest_layer(*ws_).cancel();
            beast::get_lowest_layer(*ws_).close();
        } else {
            stream_.close();
        }
    }

private:
    void read_request() {
        http::async_read(stream_, buffer_, request_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) {
                self->stream_.close();
                return;
            }
            self->route();
        });
    }

    void route() {
        if (websocket::is_upgrade(request_)) {
            if (request_.target() != "/mirror") {
                respond(http::status::not_found, "no such endpoint\n");
                return;
            }
            ws_.emplace(std::move(stream_));
            ws_->set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
            ws_->text(true);
            ws_->async_accept(request_, [self = shared_from_this()](beast::error_code ec) {
                if (ec) {
                    return;
                }
                self->owner_.attach(self);
                self->read_frame();
            });
            return;
        }
        if (request_.method() == http::verb::get && request_.target() == "/world") {
            respond(http::status::ok, owner_.world ? owner_.world() : std::string());
            return;
        }
        respond(http::status::not_found, "no such endpoint\n");
    }

    void respond(http::status status, std::string body) {
        auto res = std::make_shared<http::response<http::string_body>>(status, request_.version());
        res->set(http::field::content_type, "text/plain");
        res->set(http::field::access_control_allow_origin, "*");
        res->keep_alive(false);
        res->body() = std::move(body);
        res->prepare_payload();
        http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code, std::size_t) {
            beast::error_code ignored;
            self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
        });
    }

    void read_frame() {
        ws_->async_read(in_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) {
                self->shutdown();
                return;
            }
            const auto text = beast::buffers_to_string(self->in_.data());
            self->in_.consume(self->in_.size());
            self->handle(text);
            self->read_frame();
        });
    }

    void handle(const std::string& text) {
        try {
            owner_.commands.push(hfsm::command_from_json(nlohmann::json::parse(text)));
        } catch (const std::exception& e) {
            enqueue({std::make_shared<const std::string>(error_frame(e.what(), text).dump()), true});
        }
    }

    void write_next() {
        if (writing_ || queue_.empty() || closing_) {
            return;
        }
        writing_ = true;
        auto text = queue_.front().text;
        ws_->async_write(asio::buffer(*text), [self = shared_from_this(), text](beast::error_code ec, std::size_t) {
            self->writing_ = false;
            if (ec) {
                self->shutdown();
                return;
            }
            if (self->queue_.front().control) {
                --self->controls_;
            } else {
                --self->feedbacks_;
            }
            self->queue_.pop_front();
            self->write_next();
        });
    }

    beast::tcp_stream stream_;
    std::optional<websocket::stream<beast::tcp_stream>> ws_;
    MirrorServer::Impl& owner_;
    beast::flat_buffer buffer_;
    beast::flat_buffer in_;
    http::request<http::string_body> request_;
    std::deque<Frame> queue_;
    std::size_t controls_ = 0;
    std::size_t feedbacks_ = 0;
    bool writing_ = false;
    bool closing_ = false;
};

void MirrorServer::Impl::do_accept() {
    acceptor->async_accept([this](beast::error_code ec, tcp::socket socket) {
        if (ec) {
            return;
        }
        std::make_shared<Session>(std::move(socket), *this)->start();
        do_accept();
    });
}

void MirrorServer::Impl::attach(const std::shared_ptr<Session>& s) {
    sessions.insert(s);
    std::string text;
    {
        std::lock_guard lock(snap_mutex);
        text = to_json(snap).dump();
    }
    s->enqueue({std::make_shared<const std::string>(std::move(text)), true});
}

void MirrorServer::Impl::broadcast(const Frame& f) {
    // Sessions may detach while being fed.
    const auto targets = sessions;
    for (const auto& s : targets) {
        s->enqueue(f);
    }
}

MirrorServer::MirrorServer(hfsm::CommandQueue& commands, WorldText world, MirrorConfig config,
                           hfsm::AutonomyLevel initial)
    : impl_(std::make_unique<Impl>(commands, std::move(world), std::move(config))) {
    impl_->snap.autonomy = initial;
}

MirrorServer::~MirrorServer() { stop(); }

void MirrorServer::start() {
    auto& im = *impl_;
    beast::error_code ec;
    const auto address = asio::ip::make_address(im.config.host, ec);
    if (ec) {
        throw server::TransportError("bad mirror host " + im.config.host);
    }
    im.acceptor.emplace(im.ioc);
    const tcp::endpoint ep(address, im.config.port);
    im.acceptor->open(ep.protocol(), ec);
    if (!ec) {
        im.acceptor->set_option(asio::socket_base::reuse_address(true), ec);
        im.acceptor->bind(ep, ec);
        if (ec == asio::error::address_in_use) {
            im.acceptor.reset();
            throw server::PortInUse(im.config.port);
        }
    }
    if (!ec) {
        im.acceptor->listen(asio::socket_base::max_listen_connections, ec);
    }
    if (ec) {
        im.acceptor.reset();
        throw server::TransportError("mirror listen: " + ec.message());
    }
    im.bound = im.acceptor->local_endpoint().port();
    im.work.emplace(im.ioc.get_executor());
    im.do_accept();
    im.thread = std::thread([&im] { im.ioc.run(); });
}

void MirrorServer::stop() {
    auto& im = *impl_;
    if (!im.thread.joinable()) {
        return;
    }
    asio::post(im.ioc, [&im] {
        beast::error_code ignored;
        im.acceptor->close(ignored);
        const auto all = im.sessions;
        for (const auto& s : all) {
            s->shutdown();
        }
        im.work.reset();
        // Connections that never sent a request are abandoned here.
        im.ioc.stop();
    });
    im.thread.join();
}

std::uint16_t MirrorServer::port() const { return impl_->bound; }

void MirrorServer::publish(const hfsm::MirrorEvent& e) {
    auto& im = *impl_;
    {
        std::lock_guard lock(im.snap_mutex);
        im.snap.seq = e.seq;
        im.tracker.apply(e);
        im.snap.active = im.tracker.active();
        if (e.kind == EventKind::AutonomyChanged) {
            im.snap.autonomy = e.level;
        } else if (e.kind == EventKind::BtFeedback) {
            im.snap.last_feedback = e;
        }
    }
    Frame f{std::make_shared<const std::string>(hfsm::to_json(e).dump()), hfsm::is_control_event(e.kind)};
    asio::post(im.ioc, [&im, f] { im.broadcast(f); });
}

Snapshot MirrorServer::snapshot() const {
    std::lock_guard lock(impl_->snap_mutex);
    return impl_->snap;
}

std::size_t MirrorServer::clients() const {
    std::promise<std::size_t> count;
    auto fut = count.get_future();
    if (!impl_->thread.joinable()) {
        return 0;
    }
    asio::post(impl_->ioc, [&] { count.set_value(impl_->sessions.size()); });
    return fut.get();
}

// Client.

struct MirrorClient::Impl {
    asio::io_context ioc;
    websocket::stream<beast::tcp_stream> ws{ioc};
    beast::flat_buffer in;
    std::deque<std::string> outbox;
    bool writing = false;
    std::thread thread;

    mutable std::mutex mutex;
    std::condition_variable cv;
    std::deque<std::string> frames;
    bool closed = false;

    void read() {
        ws.async_read(in, [this](beast::error_code ec, std::size_t) {
            std::lock_guard lock(mutex);
            if (ec) {
                closed = true;
                cv.notify_all();
                return;
            }
            frames.push_back(beast::buffers_to_string(in.data()));
            in.consume(in.size());
            cv.notify_all();
            read();
        });
    }

    void write() {
        if (writing || outbox.empty()) {
            return;
        }
        writing = true;
        ws.async_write(asio::buffer(outbox.front()), [this](beast::error_code ec, std::size_t) {
            writing = false;
            outbox.pop_front();
            if (!ec) {
                write();
            }
        });
    }
};

MirrorClient::MirrorClient(const std::string& host, std::uint16_t port) : impl_(std::make_unique<Impl>()) {
    auto& im = *impl_;
    try {
        tcp::resolver resolver(im.ioc);
        beast::get_lowest_layer(im.ws).connect(resolver.resolve(host, std::to_string(port)));
        im.ws.text(true);
        im.ws.handshake(host + ":" + std::to_string(port), "/mirror");
    } catch (const boost::system::system_error& e) {
        throw server::TransportError(std::string("mirror connect: ") + e.what());
    }
    im.read();
    im.thread = std::thread([&im] { im.ioc.run(); });
}

MirrorClient::~MirrorClient() { close(); }

void MirrorClient::send(const std::string& text) {
    auto& im = *impl_;
    asio::post(im.ioc, [&im, text] {
        im.outbox.push_back(text);
        im.write();
    });
}

std::optional<nlohmann::json> MirrorClient::next(std::chrono::milliseconds timeout) {
    std::unique_lock lock(impl_->mutex);
    impl_->cv.wait_for(lock, timeout, [&] { return !impl_->frames.empty() || impl_->closed; });
    if (impl_->frames.empty()) {
        return std::nullopt;
    }
    auto text = std::move(impl_->frames.front());
    impl_->frames.pop_front();
    return nlohmann::json::parse(text);
}

bool MirrorClient::closed() const {
    std::lock_guard lock(impl_->mutex);
    return impl_->closed;
}

void MirrorClient::close() {
    auto& im = *impl_;
    if (!im.thread.joinable()) {
        return;
    }
    asio::post(im.ioc, [&im] {
        beast::error_code ignored;
        beast::get_lowest_layer(im.ws).socket().shutdown(tcp::socket::shutdown_both, ignored);
        beast::get_lowest_layer(im.ws).close();
    });
    im.thread.join();
}

std::string fetch_world(const std::string& host, std::uint16_t port) {
    try {
        asio::io_context ioc;
        tcp::resolver resolver(ioc);
        beast::tcp_stream stream(ioc);
        stream.connect(resolver.resolve(host, std::to_string(port)));
        http::request<http::empty_body> req(http::verb::get, "/world", 11);
        req.set(http::field::host, host);
        http::write(stream, req);
        beast::flat_buffer buffer;
        http::response<http::string_body> res;
        http::read(stream, buffer, res);
        if (res.result() != http::status::ok) {
            throw server::TransportError("GET /world: " + std::to_string(res.result_int()));
        }
        return res.body();
    } catch (const boost::system::system_error& e) {
        throw server::TransportError(std::string("GET /world: ") + e.what());
    }
}

}  // namespace hfsmbt::mirror
