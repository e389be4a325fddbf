#include "fedrun/crypto.hpp"

#include <sodium.h>

#include <mutex>
#include <stdexcept>

#include "fedrun/rng.hpp"

namespace fedrun::crypto {

static void ensure_sodium() {
    static std::once_flag flag;
    std::call_once(flag, [] {
        if (sodium_init() < 0) throw std::runtime_error("libsodium initialization failed");
    });
}

Hash256 sha256(std::span<const uint8_t> data) {
    ensure_sodium();
    Hash256 out;
    crypto_hash_sha256(out.data(), data.data(), data.size());
    return out;
}

SigningKey SigningKey::generate() {
    ensure_sodium();
    SigningKey k;
    crypto_sign_keypair(k.pub.data(), k.secret.data());
    return k;
}

SigningKey SigningKey::from_seed(const std::array<uint8_t, 32>& seed) {
    ensure_sodium();
    SigningKey k;
    crypto_sign_seed_keypair(k.pub.data(), k.secret.data(), seed.data());
    return k;
}

SigningKey SigningKey::from_seed64(uint64_t seed) {
    std::array<uint8_t, 32> s{};
    uint64_t x = seed;
    for (size_t i = 0; i < 4; ++i) {
        x = splitmix64(x);
        for (size_t b = 0; b < 8; ++b) s[i * 8 + b] = static_cast<uint8_t>(x >> (8 * b));
    }
    return from_seed(s);
}

Signature SigningKey::sign(std::span<const uint8_t> msg) const {
    ensure_sodium();
    Signature sig;
    crypto_sign_detached(sig.data(), nullptr, msg.data(), msg.size(), secret.data());
    return sig;
}

bool verify_signature(std::span<const uint8_t> msg, const Signature& sig, const PublicKey& pub) {
    ensure_sodium();
    return crypto_sign_verify_detached(sig.data(), msg.data(), msg.size(), pub.data()) == 0;
}

}  // namespace fedrun::crypto
