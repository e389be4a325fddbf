#include <stdexcept>

#include "fedrun/fl/transport.hpp"

namespace fedrun::fl {

namespace {

class MemoryEndpoint final : public Session {
public:
    MemoryEndpoint(std::deque<std::vector<uint8_t>>* out, std::deque<std::vector<uint8_t>>* in,
                   std::vector<std::vector<uint8_t>>* sent_log)
        : out_(out), in_(in), sent_log_(sent_log) {}

    void send_frame(std::span<const uint8_t> frame) override {
        std::vector<uint8_t> copy(frame.begin(), frame.end());
        bytes_ += copy.size();
        sent_log_->push_back(copy);
        out_->push_back(std::move(copy));
    }

    std::optional<std::vector<uint8_t>> recv_frame(int /*timeout_ms*/) override {
        if (in_->empty()) return std::nullopt;
        std::vector<uint8_t> f = std::move(in_->front());
        in_->pop_front();
        return f;
    }

    uint64_t bytes_sent() const override { return bytes_; }

private:
    std::deque<std::vector<uint8_t>>* out_;
    std::deque<std::vector<uint8_t>>* in_;
    std::vector<std::vector<uint8_t>>* sent_log_;
    uint64_t bytes_ = 0;
};

}  // namespace

struct MemoryHub::Pipe {
    std::string site_id;
    std::deque<std::vector<uint8_t>> to_site, to_coord;
    std::vector<std::vector<uint8_t>> sent_by_site, sent_by_coord;
    std::unique_ptr<MemoryEndpoint> coord_side, site_side;
    FrameHandler handler;
};

MemoryHub::MemoryHub() = default;
MemoryHub::~MemoryHub() = default;

Session& MemoryHub::register_site(const std::string& site_id) {
    auto pipe = std::make_unique<Pipe>();
    pipe->site_id = site_id;
    pipe->coord_side =
        std::make_unique<MemoryEndpoint>(&pipe->to_site, &pipe->to_coord, &pipe->sent_by_coord);
    pipe->site_side =
        std::make_unique<MemoryEndpoint>(&pipe->to_coord, &pipe->to_site, &pipe->sent_by_site);
    pipes_.push_back(std::move(pipe));
    return *pipes_.back()->site_side;
}

MemoryHub::Pipe& MemoryHub::find(const std::string& site_id) const {
    for (const auto& p : pipes_)
        if (p->site_id == site_id) return *p;
    throw std::out_of_range("unknown site: " + site_id);
}

void MemoryHub::set_handler(const std::string& site_id, FrameHandler handler) {
    find(site_id).handler = std::move(handler);
}

std::vector<Session*> MemoryHub::await_connections(size_t n, int /*timeout_ms*/) {
    std::vector<Session*> out;
    for (size_t i = 0; i < n && i < pipes_.size(); ++i) out.push_back(pipes_[i]->coord_side.get());
    return out;
}

void MemoryHub::pump() {
    // registration order; each site drains its inbox fully before the next
    for (const auto& p : pipes_) {
        while (!p->to_site.empty()) {
            std::vector<uint8_t> frame = std::move(p->to_site.front());
            p->to_site.pop_front();
            if (p->handler) p->handler(frame);
        }
    }
}

const std::vector<std::vector<uint8_t>>& MemoryHub::frames_from_site(
    const std::string& site_id) const {
    return find(site_id).sent_by_site;
}

const std::vector<std::vector<uint8_t>>& MemoryHub::frames_to_site(
    const std::string& site_id) const {
    return find(site_id).sent_by_coord;
}

Session& MemoryHub::site_session(const std::string& site_id) { return *find(site_id).site_side; }

}  // namespace fedrun::fl
