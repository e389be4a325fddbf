#include "fedrun/encoding.hpp"

namespace fedrun {

static const char kHex[] = "0123456789abcdef";

std::string to_hex(std::span<const uint8_t> bytes) {
    std::string out;
    out.reserve(bytes.size() * 2);
    for (uint8_t b : bytes) {
        out.push_back(kHex[b >> 4]);
        out.push_back(kHex[b & 0xf]);
    }
    return out;
}

static int hex_val(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;  // uppercase rejected: stored hex is canonical lowercase
}

std::optional<std::vector<uint8_t>> from_hex(std::string_view hex) {
    if (hex.size() % 2 != 0) return std::nullopt;
    std::vector<uint8_t> out(hex.size() / 2);
    for (size_t i = 0; i < out.size(); ++i) {
        int hi = hex_val(hex[2 * i]);
        int lo = hex_val(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) return std::nullopt;
        out[i] = static_cast<uint8_t>(hi << 4 | lo);
    }
    return out;
}

static const char kB64[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string to_base64(std::span<const uint8_t> bytes) {
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    size_t i = 0;
    for (; i + 3 <= bytes.size(); i += 3) {
        uint32_t v = bytes[i] << 16 | bytes[i + 1] << 8 | bytes[i + 2];
        out.push_back(kB64[v >> 18 & 63]);
        out.push_back(kB64[v >> 12 & 63]);
        out.push_back(kB64[v >> 6 & 63]);
        out.push_back(kB64[v & 63]);
    }
    size_t rem = bytes.size() - i;
    if (rem == 1) {
        uint32_t v = bytes[i] << 16;
        out.push_back(kB64[v >> 18 & 63]);
        out.push_back(kB64[v >> 12 & 63]);
        out.push_back('=');
        out.push_back('=');
    } else if (rem == 2) {
        uint32_t v = bytes[i] << 16 | bytes[i + 1] << 8;
        out.push_back(kB64[v >> 18 & 63]);
        out.push_back(kB64[v >> 12 & 63]);
        out.push_back(kB64[v >> 6 & 63]);
        out.push_back('=');
    }
    return out;
}

std::optional<std::vector<uint8_t>> from_base64(std::string_view b64) {
    if (b64.size() % 4 != 0) return std::nullopt;
    static int table[256];
    static bool init = [] {
        for (int& t : table) t = -1;
        for (int i = 0; i < 64; ++i) table[static_cast<uint8_t>(kB64[i])] = i;
        return true;
    }();
    (void)init;

    std::vector<uint8_t> out;
    out.reserve(b64.size() / 4 * 3);
    for (size_t i = 0; i < b64.size(); i += 4) {
        bool last = i + 4 == b64.size();
        int pad = 0;
        int v[4];
        for (int j = 0; j < 4; ++j) {
            char c = b64[i + j];
            if (c == '=') {
                if (!last || j < 2) return std::nullopt;
                pad++;
                v[j] = 0;
            } else {
                if (pad > 0) return std::nullopt;  // '=' only at the end
                v[j] = table[static_cast<uint8_t>(c)];
                if (v[j] < 0) return std::nullopt;
            }
        }
        uint32_t q = v[0] << 18 | v[1] << 12 | v[2] << 6 | v[3];
        out.push_back(static_cast<uint8_t>(q >> 16));
        if (pad < 2) out.push_back(static_cast<uint8_t>(q >> 8));
        if (pad < 1) out.push_back(static_cast<uint8_t>(q));
        // canonical form: unused padding bits must be zero
        if (pad == 2 && (q & 0xffff)) return std::nullopt;
        if (pad == 1 && (q & 0xff)) return std::nullopt;
    }
    return out;
}

}  // namespace fedrun
