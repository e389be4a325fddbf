#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <cstring>
#include <stdexcept>

#include "fedrun/errors.hpp"
#include "fedrun/fl/transport.hpp"

namespace fedrun::fl {

namespace {

int64_t now_ms() {
    using namespace std::chrono;
    return duration_cast<milliseconds>(steady_clock::now().time_since_epoch()).count();
}

std::pair<std::string, uint16_t> parse_addr(const std::string& addr) {
    size_t colon = addr.rfind(':');
    if (colon == std::string::npos) throw ConfigError("address must be host:port, got " + addr);
    std::string host = addr.substr(0, colon);
    int port = std::stoi(addr.substr(colon + 1));
    if (port < 0 || port > 65535) throw ConfigError("port out of range in " + addr);
    return {host, static_cast<uint16_t>(port)};
}

class TcpSession final : public Session {
public:
    explicit TcpSession(int fd) : fd_(fd) {
        int one = 1;
        setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    }
    ~TcpSession() override {
        if (fd_ >= 0) ::close(fd_);
    }

    void send_frame(std::span<const uint8_t> frame) override {
        size_t sent = 0;
        while (sent < frame.size()) {
            ssize_t n = ::send(fd_, frame.data() + sent, frame.size() - sent, MSG_NOSIGNAL);
            if (n <= 0) throw TrainingError("tcp send failed");
            sent += static_cast<size_t>(n);
        }
        bytes_ += frame.size();
    }

    std::optional<std::vector<uint8_t>> recv_frame(int timeout_ms) override {
        uint8_t head[4];
        if (!read_exact(head, 4, timeout_ms)) return std::nullopt;
        uint32_t len = static_cast<uint32_t>(head[0]) << 24 | static_cast<uint32_t>(head[1]) << 16 |
                       static_cast<uint32_t>(head[2]) << 8 | head[3];
        if (len > (64u << 20)) return std::nullopt;  // poisoned stream; drop the peer
        std::vector<uint8_t> frame(4 + len);
        std::memcpy(frame.data(), head, 4);
        // once a header arrived, finish the frame even under a 0 timeout
        if (!read_exact(frame.data() + 4, len, timeout_ms < 0 ? -1 : 10000)) return std::nullopt;
        return frame;
    }

    uint64_t bytes_sent() const override { return bytes_; }

private:
    bool read_exact(uint8_t* dst, size_t n, int timeout_ms) {
        size_t got = 0;
        int64_t deadline = timeout_ms >= 0 ? now_ms() + timeout_ms : -1;
        while (got < n) {
            if (deadline >= 0) {
                int64_t left = deadline - now_ms();
                if (left < 0) return false;
                pollfd p{fd_, POLLIN, 0};
                int pr = ::poll(&p, 1, static_cast<int>(left));
                if (pr <= 0) return false;
            }
            ssize_t r = ::recv(fd_, dst + got, n - got, 0);
            if (r <= 0) return false;  // closed or error = dropout
            got += static_cast<size_t>(r);
        }
        return true;
    }

    int fd_;
    uint64_t bytes_ = 0;
};

}  // namespace

TcpListener::TcpListener(const std::string& listen_addr) {
    auto [host, port] = parse_addr(listen_addr);
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw ConfigError("cannot create listen socket");
    int one = 1;
    setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);

    sockaddr_in sa{};
    sa.sin_family = AF_INET;
    sa.sin_port = htons(port);
    if (inet_pton(AF_INET, host.c_str(), &sa.sin_addr) != 1)
        throw ConfigError("bad listen host " + host);
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&sa), sizeof sa) != 0)
        throw ConfigError("cannot bind " + listen_addr);
    if (::listen(listen_fd_, 16) != 0) throw ConfigError("cannot listen on " + listen_addr);

    sockaddr_in bound{};
    socklen_t blen = sizeof bound;
    getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&bound), &blen);
    char buf[64];
    inet_ntop(AF_INET, &bound.sin_addr, buf, sizeof buf);
    bound_ = std::string(buf) + ":" + std::to_string(ntohs(bound.sin_port));
}

TcpListener::~TcpListener() {
    if (listen_fd_ >= 0) ::close(listen_fd_);
}

std::string TcpListener::bound_address() const { return bound_; }

std::vector<Session*> TcpListener::await_connections(size_t n, int timeout_ms) {
    int64_t deadline = timeout_ms >= 0 ? now_ms() + timeout_ms : -1;
    while (sessions_.size() < n) {
        if (deadline >= 0) {
            int64_t left = deadline - now_ms();
            if (left < 0) break;
            pollfd p{listen_fd_, POLLIN, 0};
            if (::poll(&p, 1, static_cast<int>(left)) <= 0) break;
        }
        int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0) break;
        sessions_.push_back(std::make_unique<TcpSession>(fd));
    }
    std::vector<Session*> out;
    for (auto& s : sessions_) out.push_back(s.get());
    return out;
}

std::unique_ptr<Session> tcp_connect(const std::string& addr, int timeout_ms) {
    auto [host, port] = parse_addr(addr);
    int64_t deadline = now_ms() + timeout_ms;
    while (true) {
        int fd = ::socket(AF_INET, SOCK_STREAM, 0);
        if (fd < 0) throw ConfigError("cannot create socket");
        sockaddr_in sa{};
        sa.sin_family = AF_INET;
        sa.sin_port = htons(port);
        if (inet_pton(AF_INET, host.c_str(), &sa.sin_addr) != 1) {
            ::close(fd);
            throw ConfigError("bad host " + host);
        }
        if (::connect(fd, reinterpret_cast<sockaddr*>(&sa), sizeof sa) == 0)
            return std::make_unique<TcpSession>(fd);
        ::close(fd);
        if (now_ms() > deadline) throw ConfigError("connect timeout to " + addr);
        ::usleep(20000);
    }
}

}  // namespace fedrun::fl
