#include "tcids/prf.hpp"

#include <array>
#include <cstddef>

namespace tcids {

namespace {

inline std::uint64_t rotl64(std::uint64_t x, int b) {
    return (x << b) | (x >> (64 - b));
}

inline std::uint64_t load_le64(const std::uint8_t* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) {
        v = (v << 8) | p[i];
    }
    return v;
}

inline void store_le64(std::uint8_t* p, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        p[i] = static_cast<std::uint8_t>(v >> (8 * i));
    }
}

struct SipState {
    std::uint64_t v0, v1, v2, v3;

    explicit SipState(const Key128& key)
        : v0(0x736f6d6570736575ULL ^ key.k0),
          v1(0x646f72616e646f6dULL ^ key.k1),
          v2(0x6c7967656e657261ULL ^ key.k0),
          v3(0x7465646279746573ULL ^ key.k1) {}

    void round() {
        v0 += v1;
        v1 = rotl64(v1, 13);
        v1 ^= v0;
        v0 = rotl64(v0, 32);
        v2 += v3;
        v3 = rotl64(v3, 16);
        v3 ^= v2;
        v0 += v3;
        v3 = rotl64(v3, 21);
        v3 ^= v0;
        v2 += v1;
        v1 = rotl64(v1, 17);
        v1 ^= v2;
        v2 = rotl64(v2, 32);
    }
};

int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

std::uint64_t siphash24(const Key128& key, std::span<const std::uint8_t> msg) {
    SipState s(key);
    const std::size_t len = msg.size();
    const std::size_t full = len - (len % 8);

    for (std::size_t i = 0; i < full; i += 8) {
        const std::uint64_t m = load_le64(msg.data() + i);
        s.v3 ^= m;
        s.round();
        s.round();
        s.v0 ^= m;
    }

    std::uint64_t b = static_cast<std::uint64_t>(len & 0xff) << 56;
    for (std::size_t i = 0; i < len % 8; ++i) {
        b |= static_cast<std::uint64_t>(msg[full + i]) << (8 * i);
    }
    s.v3 ^= b;
    s.round();
    s.round();
    s.v0 ^= b;

    s.v2 ^= 0xff;
    s.round();
    s.round();
    s.round();
    s.round();
    return s.v0 ^ s.v1 ^ s.v2 ^ s.v3;
}

std::uint64_t prf64(const Key128& key, std::uint64_t a, std::uint64_t b) {
    std::array<std::uint8_t, 16> msg;
    store_le64(msg.data(), a);
    store_le64(msg.data() + 8, b);
    return siphash24(key, msg);
}

std::uint64_t prf64(const Key128& key, std::uint64_t a, std::uint64_t b,
                    std::uint64_t c) {
    std::array<std::uint8_t, 24> msg;
    store_le64(msg.data(), a);
    store_le64(msg.data() + 8, b);
    store_le64(msg.data() + 16, c);
    return siphash24(key, msg);
}

std::string to_hex(const Key128& key) {
    static const char* digits = "0123456789abcdef";
    std::array<std::uint8_t, 16> bytes;
    store_le64(bytes.data(), key.k0);
    store_le64(bytes.data() + 8, key.k1);
    std::string out;
    out.reserve(32);
    for (std::uint8_t b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xf]);
    }
    return out;
}

std::optional<Key128> key_from_hex(std::string_view hex) {
    if (hex.size() != 32) return std::nullopt;
    std::array<std::uint8_t, 16> bytes;
    for (std::size_t i = 0; i < 16; ++i) {
        const int hi = hex_nibble(hex[2 * i]);
        const int lo = hex_nibble(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) return std::nullopt;
        bytes[i] = static_cast<std::uint8_t>((hi << 4) | lo);
    }
    Key128 key;
    key.k0 = load_le64(bytes.data());
    key.k1 = load_le64(bytes.data() + 8);
    return key;
}

std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t label) {
    const Key128 key{master ^ 0x9e3779b97f4a7c15ULL, 0xd1b54a32d192ed03ULL};
    return prf64(key, label, 0);
}

}  // namespace tcids
