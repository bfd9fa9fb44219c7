#pragma once

// Keyed 64-bit PRF (SipHash-2-4) used for interval selection and seed
// updates. Not a cryptographic-strength claim: the protocol only needs
// deterministic, key-dependent unpredictability at simulation fidelity.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace tcids {

struct Key128 {
    std::uint64_t k0 = 0;
    std::uint64_t k1 = 0;

    friend bool operator==(const Key128&, const Key128&) = default;
};

/// SipHash-2-4 of an arbitrary byte message.
std::uint64_t siphash24(const Key128& key, std::span<const std::uint8_t> msg);

/// PRF over two / three 64-bit words (little-endian packed).
std::uint64_t prf64(const Key128& key, std::uint64_t a, std::uint64_t b);
std::uint64_t prf64(const Key128& key, std::uint64_t a, std::uint64_t b,
                    std::uint64_t c);

/// 32-hex-char encoding, byte order matching the SipHash reference key
/// layout ("000102...0f" -> k0 = 0x0706050403020100).
std::string to_hex(const Key128& key);
std::optional<Key128> key_from_hex(std::string_view hex);

/// Stable per-stream sub-seed derivation for reproducible experiments.
std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t label);

}  // namespace tcids
