#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace fedrun::crypto {

using Hash256 = std::array<uint8_t, 32>;
using Signature = std::array<uint8_t, 64>;
using PublicKey = std::array<uint8_t, 32>;

Hash256 sha256(std::span<const uint8_t> data);

// Ed25519 signing keypair. Signatures are deterministic, so identically
// seeded runs produce identical audit files.
struct SigningKey {
    std::array<uint8_t, 64> secret{};
    PublicKey pub{};

    static SigningKey generate();
    static SigningKey from_seed(const std::array<uint8_t, 32>& seed);
    static SigningKey from_seed64(uint64_t seed);

    Signature sign(std::span<const uint8_t> msg) const;
};

bool verify_signature(std::span<const uint8_t> msg, const Signature& sig, const PublicKey& pub);

}  // namespace fedrun::crypto
