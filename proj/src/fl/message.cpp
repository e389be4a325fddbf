#include "fedrun/fl/message.hpp"

#include "fedrun/encoding.hpp"

namespace fedrun::fl {

namespace {

enum Tag : uint8_t {
    kJoin = 1,
    kGlobalModel = 2,
    kUpdate = 3,
    kMetrics = 4,
    kStop = 5,
};

// guards against absurd allocations when decoding fuzzed frames
constexpr size_t kMaxFrame = 64u << 20;
constexpr size_t kMaxLayoutEntries = 4096;
constexpr uint64_t kMaxValues = 16u << 20;

void encode_params(std::vector<uint8_t>& out, const nn::ParamVector& p) {
    const auto& entries = p.layout->entries();
    put_u32(out, static_cast<uint32_t>(entries.size()));
    for (const auto& e : entries) {
        put_str(out, e.name);
        put_u32(out, static_cast<uint32_t>(e.offset));
        put_u8(out, e.trainable ? 1 : 0);
        put_u8(out, static_cast<uint8_t>(e.shape.size()));
        for (size_t d : e.shape) put_u32(out, static_cast<uint32_t>(d));
    }
    put_u64(out, p.values.size());
    for (float v : p.values) put_f32(out, v);
}

nn::ParamVector decode_params(ByteReader& r) {
    uint32_t n_entries = r.u32();
    if (!r.ok() || n_entries > kMaxLayoutEntries)
        throw ProtocolError("bad layout entry count", r.offset());
    std::vector<nn::TensorSpec> specs;
    size_t expect_offset = 0;
    for (uint32_t i = 0; i < n_entries; ++i) {
        nn::TensorSpec s;
        s.name = r.str();
        s.offset = r.u32();
        s.trainable = r.u8() != 0;
        uint8_t rank = r.u8();
        if (!r.ok() || rank > 8) throw ProtocolError("bad tensor rank", r.offset());
        for (uint8_t d = 0; d < rank; ++d) s.shape.push_back(r.u32());
        if (!r.ok()) throw ProtocolError("truncated layout entry", r.offset());
        if (s.offset != expect_offset) throw ProtocolError("layout offsets not contiguous", r.offset());
        expect_offset += s.size();
        specs.push_back(std::move(s));
    }
    uint64_t n_values = r.u64();
    if (!r.ok() || n_values != expect_offset || n_values > kMaxValues)
        throw ProtocolError("value count does not match layout", r.offset());
    std::vector<float> values(n_values);
    for (uint64_t i = 0; i < n_values; ++i) values[i] = r.f32();
    if (!r.ok()) throw ProtocolError("truncated parameter values", r.offset());
    return nn::ParamVector(std::make_shared<nn::Layout>(std::move(specs)), std::move(values));
}

}  // namespace

std::vector<uint8_t> encode(const Message& msg) {
    std::vector<uint8_t> body;
    put_u8(body, kProtocolVersion);
    uint8_t tag = 0;
    std::vector<uint8_t> payload;
    put_str(payload, msg.study_id);

    if (const auto* j = msg.as<Join>()) {
        tag = kJoin;
        put_str(payload, j->site_id);
    } else if (const auto* g = msg.as<GlobalModel>()) {
        tag = kGlobalModel;
        put_u32(payload, g->round);
        payload.insert(payload.end(), g->psi_digest.begin(), g->psi_digest.end());
        encode_params(payload, g->params);
    } else if (const auto* u = msg.as<Update>()) {
        tag = kUpdate;
        put_u32(payload, u->round);
        put_str(payload, u->update.site_id);
        put_u64(payload, u->update.n_samples);
        put_f64(payload, u->update.sum_nll);
        put_f64(payload, u->update.reg_value);
        encode_params(payload, u->update.params);
    } else if (const auto* m = msg.as<MetricsMsg>()) {
        tag = kMetrics;
        put_u32(payload, m->round);
        put_str(payload, m->site_id);
        put_f64(payload, m->val_roc_auc);
        put_f64(payload, m->val_balanced_accuracy);
    } else if (const auto* s = msg.as<Stop>()) {
        tag = kStop;
        put_str(payload, s->reason);
    }
    put_u8(body, tag);
    body.insert(body.end(), payload.begin(), payload.end());

    std::vector<uint8_t> frame;
    put_u32(frame, static_cast<uint32_t>(body.size()));
    frame.insert(frame.end(), body.begin(), body.end());
    return frame;
}

Message decode(std::span<const uint8_t> frame) {
    ByteReader r(frame);
    uint32_t len = r.u32();
    if (!r.ok()) throw ProtocolError("frame shorter than length header", r.offset());
    if (len > kMaxFrame) throw ProtocolError("frame length exceeds limit", 0);
    if (len != frame.size() - 4)
        throw ProtocolError("frame length mismatch", 0);
    uint8_t version = r.u8();
    if (version != kProtocolVersion) throw ProtocolError("unsupported protocol version", 4);
    uint8_t tag = r.u8();

    Message msg;
    msg.study_id = r.str();
    if (!r.ok()) throw ProtocolError("truncated study id", r.offset());

    switch (tag) {
        case kJoin: {
            Join j;
            j.site_id = r.str();
            if (!r.ok()) throw ProtocolError("truncated join", r.offset());
            msg.body = std::move(j);
            break;
        }
        case kGlobalModel: {
            GlobalModel g;
            g.round = r.u32();
            r.bytes(g.psi_digest.data(), g.psi_digest.size());
            if (!r.ok()) throw ProtocolError("truncated global model header", r.offset());
            g.params = decode_params(r);
            msg.body = std::move(g);
            break;
        }
        case kUpdate: {
            Update u;
            u.round = r.u32();
            u.update.site_id = r.str();
            u.update.n_samples = r.u64();
            u.update.sum_nll = r.f64();
            u.update.reg_value = r.f64();
            if (!r.ok()) throw ProtocolError("truncated update header", r.offset());
            u.update.params = decode_params(r);
            msg.body = std::move(u);
            break;
        }
        case kMetrics: {
            MetricsMsg m;
            m.round = r.u32();
            m.site_id = r.str();
            m.val_roc_auc = r.f64();
            m.val_balanced_accuracy = r.f64();
            if (!r.ok()) throw ProtocolError("truncated metrics", r.offset());
            msg.body = std::move(m);
            break;
        }
        case kStop: {
            Stop s;
            s.reason = r.str();
            if (!r.ok()) throw ProtocolError("truncated stop", r.offset());
            msg.body = std::move(s);
            break;
        }
        default:
            throw ProtocolError("unknown message tag", 5);
    }
    if (r.remaining() != 0) throw ProtocolError("trailing bytes after message", r.offset());
    return msg;
}

const char* message_kind(const Message& msg) {
    if (msg.as<Join>()) return "join";
    if (msg.as<GlobalModel>()) return "global_model";
    if (msg.as<Update>()) return "update";
    if (msg.as<MetricsMsg>()) return "metrics";
    return "stop";
}

gov::Request message_request(const Message& msg, const std::string& self_site_for_broadcasts) {
    gov::Request q;
    q.resource = msg.study_id;
    if (const auto* j = msg.as<Join>()) {
        q.subject = j->site_id;
        q.action = gov::Action::join_study;
    } else if (const auto* g = msg.as<GlobalModel>()) {
        // a broadcast is the receiving site exercising its pull_model grant
        q.subject = self_site_for_broadcasts;
        q.action = gov::Action::pull_model;
        q.round = g->round;
    } else if (const auto* u = msg.as<Update>()) {
        q.subject = u->update.site_id;
        q.action = gov::Action::push_update;
        q.round = u->round;
    } else if (const auto* m = msg.as<MetricsMsg>()) {
        q.subject = m->site_id;
        q.action = gov::Action::read_metrics;
        q.round = m->round;
    } else {
        q.subject = self_site_for_broadcasts;
        q.action = gov::Action::pull_model;
    }
    return q;
}

}  // namespace fedrun::fl
