#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fedrun::fl {

// One ordered, reliable, bidirectional frame stream between the coordinator
// and a site. Frames are the fully framed wire bytes from encode().
class Session {
public:
    virtual ~Session() = default;
    virtual void send_frame(std::span<const uint8_t> frame) = 0;
    // timeout_ms < 0 blocks; 0 polls. nullopt = nothing available / peer gone.
    virtual std::optional<std::vector<uint8_t>> recv_frame(int timeout_ms) = 0;
    virtual uint64_t bytes_sent() const = 0;
};

class CoordinatorTransport {
public:
    virtual ~CoordinatorTransport() = default;
    // coordinator-side sessions for n peers in a stable order
    virtual std::vector<Session*> await_connections(size_t n, int timeout_ms) = 0;
    // in-memory: run registered site handlers over their pending frames
    virtual void pump() {}
    // true when pump() completes all site-side work synchronously
    virtual bool instant() const = 0;
};

// Single-threaded deterministic transport: delivery is a queue push, and
// pump() drives each registered site handler in registration order.
class MemoryHub final : public CoordinatorTransport {
public:
    MemoryHub();
    ~MemoryHub() override;

    Session& register_site(const std::string& site_id);
    using FrameHandler = std::function<void(std::span<const uint8_t>)>;
    void set_handler(const std::string& site_id, FrameHandler handler);

    std::vector<Session*> await_connections(size_t n, int timeout_ms) override;
    void pump() override;
    bool instant() const override { return true; }

    // instrumentation: every frame a party actually put on the wire
    const std::vector<std::vector<uint8_t>>& frames_from_site(const std::string& site_id) const;
    const std::vector<std::vector<uint8_t>>& frames_to_site(const std::string& site_id) const;
    Session& site_session(const std::string& site_id);

private:
    struct Pipe;
    std::vector<std::unique_ptr<Pipe>> pipes_;
    Pipe& find(const std::string& site_id) const;
};

// TCP transport; frames are length-prefixed on the stream. The listener
// accepts site connections, tcp_connect opens the site side.
class TcpListener final : public CoordinatorTransport {
public:
    explicit TcpListener(const std::string& listen_addr);  // "host:port", port 0 picks one
    ~TcpListener() override;

    std::string bound_address() const;
    std::vector<Session*> await_connections(size_t n, int timeout_ms) override;
    bool instant() const override { return false; }

private:
    int listen_fd_ = -1;
    std::string bound_;
    std::vector<std::unique_ptr<Session>> sessions_;
};

std::unique_ptr<Session> tcp_connect(const std::string& addr, int timeout_ms = 10000);

}  // namespace fedrun::fl
