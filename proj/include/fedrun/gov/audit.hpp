#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fedrun/crypto.hpp"
#include "fedrun/errors.hpp"
#include "fedrun/gov/policy.hpp"

namespace fedrun::gov {

// One audited event. kind is one of: decision, join, broadcast, update,
// aggregation, round_abort, completion. Decision events carry the effect and
// the rule that produced it.
struct AuditEvent {
    std::string kind;
    std::string subject;
    std::string action;
    std::string resource;
    std::string effect;   // "permit" / "deny" / "" when not a decision
    std::string rule_id;  // "" when not a decision
    int64_t timestamp_ms = 0;
    std::optional<uint32_t> round;
};

// Canonical payload bytes: length-prefixed strings in fixed field order
// (kind, subject, action, resource, effect, rule_id), then the timestamp as
// a big-endian u64 and the round as a presence byte plus big-endian u32.
std::vector<uint8_t> encode_event(const AuditEvent& event);
AuditEvent decode_event(std::span<const uint8_t> payload);  // throws ProtocolError

struct AuditRecord {
    uint64_t seq = 0;
    crypto::Hash256 prev_hash{};  // all-zero for the genesis record
    std::vector<uint8_t> payload;
    crypto::Hash256 hash{};  // SHA-256(prev_hash || seq_be || payload)
    crypto::Signature signature{};
};

crypto::Hash256 record_hash(const crypto::Hash256& prev, uint64_t seq,
                            std::span<const uint8_t> payload);

// Append-only signed log. Records are kept in memory and, when a path is
// given, mirrored to disk one JSON line per record:
//   {"seq":N,"prev":"<hex>","payload":"<base64>","hash":"<hex>","sig":"<hex>"}
// Appends are serialized; existing records are never exposed for mutation.
class AuditLog {
public:
    explicit AuditLog(crypto::SigningKey key, std::filesystem::path file = {});

    const AuditRecord& append(const AuditEvent& event);

    const std::vector<AuditRecord>& records() const { return records_; }
    size_t size() const { return records_.size(); }
    const crypto::PublicKey& public_key() const { return key_.pub; }

private:
    crypto::SigningKey key_;
    std::vector<AuditRecord> records_;
    std::ofstream out_;
    std::mutex mu_;
};

enum class BreakReason : uint8_t { hash, signature, sequence };
const char* break_reason_name(BreakReason r);

struct VerifyResult {
    bool ok = true;
    uint64_t first_bad_seq = 0;
    BreakReason reason = BreakReason::hash;
};

// Full-chain verification; reports the first inconsistency.
VerifyResult verify_chain(std::span<const AuditRecord> records, const crypto::PublicKey& pub);

std::string record_to_line(const AuditRecord& rec);

// File-level verification: any line that fails strict parsing (lowercase hex,
// canonical base64, exact field set) breaks the chain at that position.
VerifyResult verify_audit_file(const std::filesystem::path& path, const crypto::PublicKey& pub);

// Strict load for tooling; throws ParseError on any malformed line.
std::vector<AuditRecord> load_audit_file(const std::filesystem::path& path);

crypto::PublicKey load_public_key_file(const std::filesystem::path& path);
void write_public_key_file(const std::filesystem::path& path, const crypto::PublicKey& pub);

}  // namespace fedrun::gov
