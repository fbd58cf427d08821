#include "footsim/server.hpp"

#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <deque>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

namespace footsim {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

std::uint16_t default_port() {
    const char* env = std::getenv(kPortEnv);
    if (!env || !*env) return kDefaultPort;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1 || v > 65535) throw Error(std::string(kPortEnv) + " is not a valid port: " + env);
    return static_cast<std::uint16_t>(v);
}

namespace {

class Connection : public std::enable_shared_from_this<Connection> {
public:
    Connection(tcp::socket socket, const ServerConfig& cfg)
        : ws_(std::move(socket)), session_(cfg.scenario, cfg.policies), cfg_(cfg) {}

    void start() {
        ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
        ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
            if (ec) return;
            self->sim_ = std::thread([self] { self->run_loop(); });
            self->read();
        });
    }

    void shutdown() {
        alive_ = false;
        if (sim_.joinable()) sim_.join();
    }

    void close_socket() {
        beast::error_code ec;
        beast::get_lowest_layer(ws_).socket().close(ec);
    }

private:
    void read() {
        ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) {
                self->alive_ = false;
                return;
            }
            const std::string text = beast::buffers_to_string(self->buffer_.data());
            self->buffer_.consume(self->buffer_.size());
            if (auto err = self->session_.submit_text(text)) self->enqueue(std::move(*err));
            self->read();
        });
    }

    // Runs on the I/O thread.
    void enqueue(std::string msg) {
        if (!alive_) return;
        // A slow client loses its oldest queued messages, never the newest.
        while (queue_.size() >= cfg_.queue_limit && queue_.size() > 1) queue_.erase(queue_.begin() + 1);
        queue_.push_back(std::move(msg));
        if (queue_.size() == 1) write();
    }

    void write() {
        ws_.text(true);
        ws_.async_write(asio::buffer(queue_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
            if (ec) {
                self->alive_ = false;
                return;
            }
            self->queue_.pop_front();
            if (!self->queue_.empty()) self->write();
        });
    }

    void run_loop() {
        using clock = std::chrono::steady_clock;
        const auto period = cfg_.tick_rate > 0.0 ? std::chrono::duration_cast<clock::duration>(
                                                       std::chrono::duration<double>(1.0 / cfg_.tick_rate))
                                                 : clock::duration::zero();
        auto next = clock::now();
        while (alive_) {
            std::vector<std::string> out = session_.tick();
            asio::post(ws_.get_executor(), [self = shared_from_this(), out = std::move(out)]() mutable {
                for (std::string& m : out) self->enqueue(std::move(m));
            });
            if (cfg_.stop_when_finished && session_.scenario().finished()) break;
            if (period > clock::duration::zero()) {
                next += period;
                std::this_thread::sleep_until(next);
            }
        }
    }

    websocket::stream<beast::tcp_stream> ws_;
    beast::flat_buffer buffer_;
    std::deque<std::string> queue_;
    Session session_;
    const ServerConfig& cfg_;
    std::thread sim_;
    std::atomic<bool> alive_{true};
};

}  // namespace

struct SessionServer::Impl {
    explicit Impl(ServerConfig c) : cfg(std::move(c)), acceptor(ioc) {}

    void accept() {
        acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
            if (ec) return;
            auto conn = std::make_shared<Connection>(std::move(socket), cfg);
            {
                std::lock_guard lock(mu);
                connections.push_back(conn);
            }
            conn->start();
            accept();
        });
    }

    ServerConfig cfg;
    asio::io_context ioc;
    tcp::acceptor acceptor;
    std::thread io_thread;
    std::mutex mu;
    std::condition_variable cv;
    bool running{false};
    std::vector<std::shared_ptr<Connection>> connections;
};

SessionServer::SessionServer(ServerConfig cfg) : impl_(std::make_unique<Impl>(std::move(cfg))) {
    // Fail on a bad scenario before any client connects.
    make_scenario(impl_->cfg.scenario, impl_->cfg.policies);
    if (impl_->cfg.queue_limit < 1) throw Error("server queue limit must be at least 1");
    if (!(impl_->cfg.tick_rate >= 0.0)) throw Error("server tick rate must be non-negative");
}

SessionServer::~SessionServer() { stop(); }

std::uint16_t SessionServer::start() {
    Impl& m = *impl_;
    beast::error_code ec;
    const auto address = asio::ip::make_address(m.cfg.address, ec);
    if (ec) throw Error("invalid listen address " + m.cfg.address);
    const tcp::endpoint ep{address, m.cfg.port};
    m.acceptor.open(ep.protocol(), ec);
    if (!ec) m.acceptor.set_option(asio::socket_base::reuse_address(true), ec);
    if (!ec) m.acceptor.bind(ep, ec);
    if (!ec) m.acceptor.listen(asio::socket_base::max_listen_connections, ec);
    if (ec) throw Error("cannot listen on " + m.cfg.address + ":" + std::to_string(m.cfg.port) + ": " + ec.message());
    m.running = true;
    m.accept();
    m.io_thread = std::thread([&m] { m.ioc.run(); });
    return m.acceptor.local_endpoint().port();
}

void SessionServer::wait() {
    std::unique_lock lock(impl_->mu);
    impl_->cv.wait(lock, [&] { return !impl_->running; });
}

void SessionServer::stop() {
    Impl& m = *impl_;
    {
        std::lock_guard lock(m.mu);
        if (!m.running && !m.io_thread.joinable()) return;
        m.running = false;
    }
    m.cv.notify_all();
    // Stop the I/O thread first so no handler starts a session meanwhile.
    asio::post(m.ioc, [&m] {
        beast::error_code ec;
        m.acceptor.close(ec);
        for (auto& c : m.connections) c->close_socket();
        m.ioc.stop();
    });
    if (m.io_thread.joinable()) m.io_thread.join();
    for (auto& c : m.connections) c->shutdown();
    m.connections.clear();
}

}  // namespace footsim
