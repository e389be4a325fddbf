#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fedrun/agg/aggregate.hpp"
#include "fedrun/gov/policy.hpp"
#include "fedrun/nn/param_vector.hpp"

namespace fedrun::fl {

constexpr uint8_t kProtocolVersion = 0x01;

struct Join {
    std::string site_id;
};

struct GlobalModel {
    uint32_t round = 0;
    nn::ParamVector params;
    std::array<uint8_t, 32> psi_digest{};
};

struct Update {
    uint32_t round = 0;
    agg::ClientUpdate update;
};

struct MetricsMsg {
    uint32_t round = 0;
    std::string site_id;
    double val_roc_auc = 0.0;
    double val_balanced_accuracy = 0.0;
};

struct Stop {
    std::string reason;
};

struct Message {
    std::string study_id;
    std::variant<Join, GlobalModel, Update, MetricsMsg, Stop> body;

    template <typename T>
    const T* as() const {
        return std::get_if<T>(&body);
    }
};

// Frame layout: u32 big-endian length of everything that follows, then one
// version byte (0x01), one message tag byte, and the payload. decode() is the
// exact inverse and never crashes on malformed bytes; every failure names
// the byte offset.
std::vector<uint8_t> encode(const Message& msg);
Message decode(std::span<const uint8_t> frame);

const char* message_kind(const Message& msg);

// (subject, action, resource, round) triple used by the policy gate
gov::Request message_request(const Message& msg, const std::string& self_site_for_broadcasts);

}  // namespace fedrun::fl
