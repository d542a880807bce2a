#pragma once

// HTTP + websocket front end: flow/1 sessions on /session, static client assets on /.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "flow/scene_file.hpp"

namespace flow::service {

struct ServeOptions {
    std::filesystem::path scene_file;
    ScriptingMode mode = ScriptingMode::Graph;
    std::string address = "127.0.0.1";
    std::uint16_t port = 8080;  // 0 picks a free port
    double tick_hz = 50.0;
    std::filesystem::path assets_dir;
    /// The first session records to this path, later ones to "<stem>.<n><ext>".
    std::optional<std::filesystem::path> record_file;
};

class Server {
public:
    /// Binds immediately and checks that the scene loads; throws on failure.
    explicit Server(ServeOptions options);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    std::uint16_t port() const;
    /// Accepts connections until stop(); each connection runs on its own thread.
    void run();
    /// Thread-safe. Closes the listener and every open connection, then returns.
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Port from FLOW_PORT, or `fallback` when unset or unparsable.
std::uint16_t default_port(std::uint16_t fallback = 8080);

}  // namespace flow::service
