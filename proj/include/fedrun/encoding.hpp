#pragma once

#include <cstdint>
#include <cstring>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fedrun {

// --- big-endian primitives -------------------------------------------------

inline void put_u8(std::vector<uint8_t>& out, uint8_t v) { out.push_back(v); }

inline void put_u16(std::vector<uint8_t>& out, uint16_t v) {
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v));
}

inline void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v >> 24));
    out.push_back(static_cast<uint8_t>(v >> 16));
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v));
}

inline void put_u64(std::vector<uint8_t>& out, uint64_t v) {
    put_u32(out, static_cast<uint32_t>(v >> 32));
    put_u32(out, static_cast<uint32_t>(v));
}

inline void put_f32(std::vector<uint8_t>& out, float v) {
    uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(out, bits);
}

inline void put_f64(std::vector<uint8_t>& out, double v) {
    uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(out, bits);
}

// length-prefixed string (u16 length)
inline void put_str(std::vector<uint8_t>& out, std::string_view s) {
    put_u16(out, static_cast<uint16_t>(s.size()));
    out.insert(out.end(), s.begin(), s.end());
}

// Bounds-checked big-endian reader. Callers translate failure into their own
// error type with the offending offset.
class ByteReader {
public:
    explicit ByteReader(std::span<const uint8_t> buf) : buf_(buf) {}

    size_t offset() const { return pos_; }
    size_t remaining() const { return buf_.size() - pos_; }
    bool ok() const { return ok_; }

    uint8_t u8() {
        if (!need(1)) return 0;
        return buf_[pos_++];
    }
    uint16_t u16() {
        if (!need(2)) return 0;
        uint16_t v = static_cast<uint16_t>(buf_[pos_] << 8 | buf_[pos_ + 1]);
        pos_ += 2;
        return v;
    }
    uint32_t u32() {
        if (!need(4)) return 0;
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v = v << 8 | buf_[pos_ + i];
        pos_ += 4;
        return v;
    }
    uint64_t u64() {
        uint64_t hi = u32();
        uint64_t lo = u32();
        return hi << 32 | lo;
    }
    float f32() {
        uint32_t bits = u32();
        float v;
        std::memcpy(&v, &bits, 4);
        return v;
    }
    double f64() {
        uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }
    std::string str() {
        uint16_t n = u16();
        if (!need(n)) return {};
        std::string s(reinterpret_cast<const char*>(buf_.data()) + pos_, n);
        pos_ += n;
        return s;
    }
    void bytes(uint8_t* dst, size_t n) {
        if (!need(n)) return;
        std::memcpy(dst, buf_.data() + pos_, n);
        pos_ += n;
    }

private:
    bool need(size_t n) {
        if (!ok_ || buf_.size() - pos_ < n) {
            ok_ = false;
            return false;
        }
        return true;
    }

    std::span<const uint8_t> buf_;
    size_t pos_ = 0;
    bool ok_ = true;
};

// --- hex / base64 ------------------------------------------------------------
// Strict decoders: hex must be lowercase, base64 must be canonical (re-encoding
// the decoded bytes reproduces the input). Tamper detection relies on this.

std::string to_hex(std::span<const uint8_t> bytes);
std::optional<std::vector<uint8_t>> from_hex(std::string_view hex);

std::string to_base64(std::span<const uint8_t> bytes);
std::optional<std::vector<uint8_t>> from_base64(std::string_view b64);

}  // namespace fedrun
