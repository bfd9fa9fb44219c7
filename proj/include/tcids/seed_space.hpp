#pragma once

// Modular seed arithmetic. Seeds live in 0..S-1 where S is either an
// explicit modulus (2 <= S <= 2^64-1) or the full 64-bit ring (S = 2^64,
// which does not fit in a uint64_t and is tracked as modulus 0 internally).

#include <cstdint>
#include <stdexcept>

namespace tcids {

class SeedSpace {
public:
    // Full 64-bit ring by default; reduction is the identity.
    constexpr SeedSpace() = default;

    static SeedSpace mod(std::uint64_t modulus) {
        if (modulus < 2) {
            throw std::invalid_argument("seed_space: modulus must be >= 2");
        }
        return SeedSpace(modulus);
    }

    static constexpr SeedSpace full64() { return SeedSpace(0); }

    constexpr bool is_full64() const { return modulus_ == 0; }

    // 0 means 2^64.
    constexpr std::uint64_t modulus_or_zero() const { return modulus_; }

    constexpr std::uint64_t max_seed() const {
        return is_full64() ? ~0ULL : modulus_ - 1;
    }

    constexpr bool contains(std::uint64_t s) const {
        return is_full64() || s < modulus_;
    }

    constexpr std::uint64_t reduce(std::uint64_t v) const {
        return is_full64() ? v : v % modulus_;
    }

    // (a + b) mod S, exact for the full ring via natural wraparound.
    constexpr std::uint64_t add(std::uint64_t a, std::uint64_t b) const {
        if (is_full64()) return a + b;
        const auto wide = static_cast<unsigned __int128>(a) + b;
        return static_cast<std::uint64_t>(wide % modulus_);
    }

    friend constexpr bool operator==(const SeedSpace&, const SeedSpace&) = default;

private:
    constexpr explicit SeedSpace(std::uint64_t m) : modulus_(m) {}

    std::uint64_t modulus_ = 0;
};

}  // namespace tcids
