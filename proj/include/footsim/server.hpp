#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "footsim/session.hpp"

namespace footsim {

inline constexpr std::uint16_t kDefaultPort = 8765;
inline constexpr const char* kPortEnv = "FOOTSIM_PORT";

/// Port from FOOTSIM_PORT, else kDefaultPort. Throws on a malformed value.
std::uint16_t default_port();

struct ServerConfig {
    std::string address{"127.0.0.1"};
    /// 0 picks a free port.
    std::uint16_t port{kDefaultPort};
    ScenarioConfig scenario;
    PolicySet policies;
    /// Ticks per second of each session loop; 0 runs as fast as possible.
    double tick_rate{30.0};
    /// Outgoing messages buffered per client before old frames are dropped.
    std::size_t queue_limit{256};
    /// Sessions stop once their scenario finishes.
    bool stop_when_finished{false};
};

/// WebSocket server. Each connection gets its own session and simulation
/// thread; socket I/O runs on a separate thread.
class SessionServer {
public:
    explicit SessionServer(ServerConfig cfg);
    ~SessionServer();
    SessionServer(const SessionServer&) = delete;
    SessionServer& operator=(const SessionServer&) = delete;

    /// Binds and starts serving; returns the bound port.
    std::uint16_t start();
    /// Blocks until stop() is called from another thread or a signal handler.
    void wait();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace footsim
