#include "fedrun/gov/audit.hpp"

#include <nlohmann/json.hpp>

#include "fedrun/encoding.hpp"

namespace fedrun::gov {

std::vector<uint8_t> encode_event(const AuditEvent& e) {
    std::vector<uint8_t> out;
    put_str(out, e.kind);
    put_str(out, e.subject);
    put_str(out, e.action);
    put_str(out, e.resource);
    put_str(out, e.effect);
    put_str(out, e.rule_id);
    put_u64(out, static_cast<uint64_t>(e.timestamp_ms));
    put_u8(out, e.round ? 1 : 0);
    put_u32(out, e.round.value_or(0));
    return out;
}

AuditEvent decode_event(std::span<const uint8_t> payload) {
    ByteReader r(payload);
    AuditEvent e;
    e.kind = r.str();
    e.subject = r.str();
    e.action = r.str();
    e.resource = r.str();
    e.effect = r.str();
    e.rule_id = r.str();
    e.timestamp_ms = static_cast<int64_t>(r.u64());
    uint8_t has_round = r.u8();
    uint32_t round = r.u32();
    if (has_round) e.round = round;
    if (!r.ok() || r.remaining() != 0)
        throw ProtocolError("malformed audit event payload", r.offset());
    return e;
}

crypto::Hash256 record_hash(const crypto::Hash256& prev, uint64_t seq,
                            std::span<const uint8_t> payload) {
    std::vector<uint8_t> buf;
    buf.insert(buf.end(), prev.begin(), prev.end());
    put_u64(buf, seq);
    buf.insert(buf.end(), payload.begin(), payload.end());
    return crypto::sha256(buf);
}

AuditLog::AuditLog(crypto::SigningKey key, std::filesystem::path file) : key_(key) {
    if (!file.empty()) {
        out_.open(file, std::ios::trunc);
        if (!out_) throw ConfigError("cannot open audit log " + file.string());
    }
}

const AuditRecord& AuditLog::append(const AuditEvent& event) {
    std::lock_guard lock(mu_);
    AuditRecord rec;
    rec.seq = records_.size();
    rec.prev_hash = records_.empty() ? crypto::Hash256{} : records_.back().hash;
    rec.payload = encode_event(event);
    rec.hash = record_hash(rec.prev_hash, rec.seq, rec.payload);
    rec.signature = key_.sign(rec.hash);
    if (out_.is_open()) {
        out_ << record_to_line(rec) << '\n';
        out_.flush();
        if (!out_) throw TrainingError("audit log write failed");
    }
    records_.push_back(std::move(rec));
    return records_.back();
}

const char* break_reason_name(BreakReason r) {
    switch (r) {
        case BreakReason::hash: return "hash";
        case BreakReason::signature: return "signature";
        case BreakReason::sequence: return "sequence";
    }
    return "?";
}

VerifyResult verify_chain(std::span<const AuditRecord> records, const crypto::PublicKey& pub) {
    crypto::Hash256 prev{};
    for (size_t i = 0; i < records.size(); ++i) {
        const AuditRecord& r = records[i];
        if (r.seq != i) return {false, i, BreakReason::sequence};
        if (r.prev_hash != prev) return {false, i, BreakReason::hash};
        if (record_hash(r.prev_hash, r.seq, r.payload) != r.hash)
            return {false, i, BreakReason::hash};
        if (!crypto::verify_signature(std::span(r.hash.data(), r.hash.size()), r.signature, pub))
            return {false, i, BreakReason::signature};
        prev = r.hash;
    }
    return {};
}

std::string record_to_line(const AuditRecord& rec) {
    nlohmann::ordered_json o;
    o["seq"] = rec.seq;
    o["prev"] = to_hex(rec.prev_hash);
    o["payload"] = to_base64(rec.payload);
    o["hash"] = to_hex(rec.hash);
    o["sig"] = to_hex(std::span(rec.signature.data(), rec.signature.size()));
    return o.dump();
}

// Strict line parse: exact field set, canonical hex/base64 (a decoded value
// must re-encode to the stored string, so non-canonical encodings of the same
// bytes cannot slip through).
static std::optional<AuditRecord> parse_line(const std::string& line) {
    nlohmann::json o = nlohmann::json::parse(line, nullptr, false);
    if (o.is_discarded() || !o.is_object() || o.size() != 5) return std::nullopt;
    if (!o.contains("seq") || !o.contains("prev") || !o.contains("payload") ||
        !o.contains("hash") || !o.contains("sig"))
        return std::nullopt;
    if (!o["seq"].is_number_unsigned()) return std::nullopt;

    AuditRecord rec;
    rec.seq = o["seq"].get<uint64_t>();
    auto get_hex = [&](const char* key, uint8_t* dst, size_t n) {
        if (!o[key].is_string()) return false;
        std::string s = o[key].get<std::string>();
        auto bytes = from_hex(s);
        if (!bytes || bytes->size() != n) return false;
        std::copy(bytes->begin(), bytes->end(), dst);
        return true;
    };
    if (!get_hex("prev", rec.prev_hash.data(), 32)) return std::nullopt;
    if (!get_hex("hash", rec.hash.data(), 32)) return std::nullopt;
    if (!get_hex("sig", rec.signature.data(), 64)) return std::nullopt;
    if (!o["payload"].is_string()) return std::nullopt;
    std::string b64 = o["payload"].get<std::string>();
    auto payload = from_base64(b64);
    if (!payload || to_base64(*payload) != b64) return std::nullopt;
    rec.payload = std::move(*payload);
    return rec;
}

VerifyResult verify_audit_file(const std::filesystem::path& path, const crypto::PublicKey& pub) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open audit log " + path.string());
    std::vector<AuditRecord> records;
    std::string line;
    size_t index = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto rec = parse_line(line);
        if (!rec) return {false, index, BreakReason::hash};
        records.push_back(std::move(*rec));
        ++index;
    }
    return verify_chain(records, pub);
}

std::vector<AuditRecord> load_audit_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open audit log " + path.string());
    std::vector<AuditRecord> records;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto rec = parse_line(line);
        if (!rec) throw ParseError("malformed audit record", line_no);
        records.push_back(std::move(*rec));
    }
    return records;
}

crypto::PublicKey load_public_key_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open key file " + path.string());
    std::string hex;
    in >> hex;
    auto bytes = from_hex(hex);
    if (!bytes || bytes->size() != 32)
        throw ConfigError("key file must hold 32 bytes of lowercase hex");
    crypto::PublicKey pub;
    std::copy(bytes->begin(), bytes->end(), pub.begin());
    return pub;
}

void write_public_key_file(const std::filesystem::path& path, const crypto::PublicKey& pub) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write key file " + path.string());
    out << to_hex(pub) << '\n';
}

}  // namespace fedrun::gov
