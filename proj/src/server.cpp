#include "flow/server.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <deque>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <json.hpp>

#include "flow/session.hpp"

namespace flow::service {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

std::uint16_t default_port(std::uint16_t fallback) {
    const char* env = std::getenv("FLOW_PORT");
    if (!env || !*env) return fallback;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 0 || v > 65535) return fallback;
    return static_cast<std::uint16_t>(v);
}

namespace {

std::string_view mime_type(const std::filesystem::path& p) {
    const std::string ext = p.extension().string();
    if (ext == ".html") return "text/html; charset=utf-8";
    if (ext == ".js" || ext == ".mjs") return "text/javascript";
    if (ext == ".css") return "text/css";
    if (ext == ".json") return "application/json";
    if (ext == ".svg") return "image/svg+xml";
    if (ext == ".png") return "image/png";
    return "application/octet-stream";
}

std::filesystem::path record_path_for(const std::filesystem::path& base, int n) {
    if (n == 1) return base;
    std::filesystem::path p = base;
    p.replace_filename(base.stem().string() + "." + std::to_string(n) + base.extension().string());
    return p;
}

/// A websocket connection driving one Session: reads inbound frames, paces steps with a timer.
class SocketSession : public std::enable_shared_from_this<SocketSession> {
public:
    SocketSession(tcp::socket socket, SessionConfig config, double tick_hz)
        : ws_(std::move(socket)),
          timer_(ws_.get_executor()),
          period_(std::chrono::duration_cast<std::chrono::steady_clock::duration>(
              std::chrono::duration<double>(1.0 / tick_hz))),
          config_(std::move(config)) {}

    void start(http::request<http::string_body> req) {
        ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
        ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) { self->on_accept(ec); });
    }

private:
    void on_accept(beast::error_code ec) {
        if (ec) return;
        try {
            session_.emplace(config_);
        } catch (const std::exception& e) {
            closing_ = true;
            enqueue(nlohmann::ordered_json{{"type", "error"}, {"code", "SceneUnavailable"}, {"message", e.what()}}
                        .dump());
            return;
        }
        do_read();
        next_tick_ = std::chrono::steady_clock::now() + period_;
        schedule_tick();
    }

    void do_read() {
        ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
            self->on_read(ec);
        });
    }

    void on_read(beast::error_code ec) {
        if (ec) {
            timer_.cancel();
            return;
        }
        const std::string frame = beast::buffers_to_string(buffer_.data());
        buffer_.consume(buffer_.size());
        for (auto& out : session_->on_message(frame, ws_.got_text())) enqueue(std::move(out));
        if (session_->should_close()) {
            closing_ = true;
            timer_.cancel();
            if (!writing_) do_close();
            return;
        }
        do_read();
    }

    void schedule_tick() {
        timer_.expires_at(next_tick_);
        timer_.async_wait([self = shared_from_this()](beast::error_code ec) { self->on_tick(ec); });
    }

    void on_tick(beast::error_code ec) {
        if (ec || closing_) return;
        if (auto frame = session_->tick()) enqueue(std::move(*frame));
        next_tick_ += period_;
        schedule_tick();
    }

    void enqueue(std::string frame) {
        outbox_.push_back(std::move(frame));
        if (!writing_) write_next();
    }

    void write_next() {
        writing_ = true;
        ws_.text(true);
        ws_.async_write(net::buffer(outbox_.front()),
                        [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_write(ec); });
    }

    void on_write(beast::error_code ec) {
        writing_ = false;
        if (ec) {
            timer_.cancel();
            return;
        }
        outbox_.pop_front();
        if (!outbox_.empty()) {
            write_next();
        } else if (closing_) {
            do_close();
        }
    }

    void do_close() {
        ws_.async_close(websocket::close_reason(websocket::close_code::policy_error, "too many malformed frames"),
                        [self = shared_from_this()](beast::error_code) {});
    }

    websocket::stream<beast::tcp_stream> ws_;
    net::steady_timer timer_;
    std::chrono::steady_clock::duration period_;
    std::chrono::steady_clock::time_point next_tick_;
    SessionConfig config_;
    std::optional<Session> session_;
    beast::flat_buffer buffer_;
    std::deque<std::string> outbox_;
    bool writing_ = false;
    bool closing_ = false;
};

/// Plain HTTP until an upgrade request for /session arrives.
class HttpConnection : public std::enable_shared_from_this<HttpConnection> {
public:
    using SessionFactory = std::function<SessionConfig()>;

    HttpConnection(tcp::socket socket, std::filesystem::path assets, SessionFactory factory, double tick_hz)
        : stream_(std::move(socket)), assets_(std::move(assets)), factory_(std::move(factory)), tick_hz_(tick_hz) {}

    void start() { do_read(); }

private:
    void do_read() {
        req_ = {};
        stream_.expires_after(std::chrono::seconds(30));
        http::async_read(stream_, buffer_, req_,
                         [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_read(ec); });
    }

    void on_read(beast::error_code ec) {
        if (ec) return;
        const std::string target(req_.target());
        const std::string path = target.substr(0, target.find('?'));
        if (websocket::is_upgrade(req_)) {
            if (path == "/session") {
                stream_.expires_never();
                std::make_shared<SocketSession>(stream_.release_socket(), factory_(), tick_hz_)
                    ->start(std::move(req_));
                return;
            }
            return respond(http::status::not_found, "text/plain", "no websocket endpoint here\n");
        }
        if (req_.method() != http::verb::get && req_.method() != http::verb::head)
            return respond(http::status::method_not_allowed, "text/plain", "GET only\n");
        serve_file(path);
    }

    void serve_file(const std::string& path) {
        std::string rel = path == "/" ? "index.html" : path.substr(1);
        if (rel.find("..") != std::string::npos || assets_.empty())
            return respond(http::status::not_found, "text/plain", "not found\n");
        const std::filesystem::path file = assets_ / rel;
        std::error_code fec;
        if (!std::filesystem::is_regular_file(file, fec))
            return respond(http::status::not_found, "text/plain", "not found\n");
        try {
            respond(http::status::ok, mime_type(file), read_file(file));
        } catch (const std::exception&) {
            respond(http::status::internal_server_error, "text/plain", "read error\n");
        }
    }

    void respond(http::status status, std::string_view type, std::string body) {
        auto res = std::make_shared<http::response<http::string_body>>(status, req_.version());
        res->set(http::field::server, "flow");
        res->set(http::field::content_type, beast::string_view(type.data(), type.size()));
        res->keep_alive(req_.keep_alive());
        if (req_.method() != http::verb::head) res->body() = std::move(body);
        res->prepare_payload();
        http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code ec, std::size_t) {
            if (ec) return;
            if (res->keep_alive()) {
                self->do_read();
            } else {
                beast::error_code ignored;
                self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
            }
        });
    }

    beast::tcp_stream stream_;
    beast::flat_buffer buffer_;
    http::request<http::string_body> req_;
    std::filesystem::path assets_;
    SessionFactory factory_;
    double tick_hz_;
};

}  // namespace

struct Server::Impl {
    ServeOptions options;
    net::io_context accept_ioc;
    tcp::acceptor acceptor{accept_ioc};
    std::mutex mutex;
    std::vector<std::thread> threads;
    std::vector<std::shared_ptr<net::io_context>> contexts;
    std::atomic<int> sessions{0};
    std::atomic<bool> stopping{false};

    void do_accept() {
        auto ioc = std::make_shared<net::io_context>();
        acceptor.async_accept(*ioc, [this, ioc](beast::error_code ec, tcp::socket socket) {
            if (stopping) return;
            if (!ec) launch(ioc, std::move(socket));
            do_accept();
        });
    }

    SessionConfig next_session_config() {
        SessionConfig c{options.scene_file, options.mode, std::nullopt};
        const int n = ++sessions;
        if (options.record_file) c.record_file = record_path_for(*options.record_file, n);
        return c;
    }

    void launch(std::shared_ptr<net::io_context> ioc, tcp::socket socket) {
        std::make_shared<HttpConnection>(std::move(socket), options.assets_dir,
                                         [this] { return next_session_config(); }, options.tick_hz)
            ->start();
        std::lock_guard lock(mutex);
        contexts.push_back(ioc);
        threads.emplace_back([ioc] { ioc->run(); });
    }
};

Server::Server(ServeOptions options) : impl_(std::make_unique<Impl>()) {
    if (!(options.tick_hz > 0.0)) throw std::invalid_argument("tick rate must be positive");
    load_scene(options.scene_file, options.mode);  // fail fast on a broken scene
    impl_->options = std::move(options);
    const tcp::endpoint endpoint(net::ip::make_address(impl_->options.address), impl_->options.port);
    impl_->acceptor.open(endpoint.protocol());
    impl_->acceptor.set_option(net::socket_base::reuse_address(true));
    impl_->acceptor.bind(endpoint);
    impl_->acceptor.listen();
}

Server::~Server() { stop(); }

std::uint16_t Server::port() const { return impl_->acceptor.local_endpoint().port(); }

void Server::run() {
    impl_->do_accept();
    impl_->accept_ioc.run();
}

void Server::stop() {
    if (impl_->stopping.exchange(true)) return;
    net::post(impl_->accept_ioc, [this] {
        beast::error_code ignored;
        impl_->acceptor.close(ignored);
    });
    impl_->accept_ioc.stop();
    std::vector<std::thread> threads;
    {
        std::lock_guard lock(impl_->mutex);
        for (auto& ioc : impl_->contexts) ioc->stop();
        threads = std::move(impl_->threads);
    }
    for (auto& t : threads)
        if (t.joinable()) t.join();
}

}  // namespace flow::service
