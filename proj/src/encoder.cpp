#include "tcids/encoder.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace tcids {

namespace {

// Rehash attempts before falling back to the (s+1) step. The fallback is
// unreachable for any realistic seed space (miss probability S^-128).
constexpr std::uint64_t kMaxRehash = 128;

}  // namespace

void EncoderConfig::validate() const {
    if (alphabet_size == 0) {
        throw std::invalid_argument("encoder.alphabet_size must be >= 1");
    }
    if (tick < 1) {
        throw std::invalid_argument("encoder.tick must be >= 1");
    }
    if (levels < 2) {
        throw std::invalid_argument(
            "encoder.levels must be >= 2: a single interval duration makes "
            "every seed's pulse stream identical");
    }
    if (!seed_space.contains(s0)) {
        throw std::invalid_argument("encoder.s0 must lie in 0..S-1");
    }
    if (const auto* affine = std::get_if<AffineOffsets>(&o_family)) {
        if (affine->offsets.size() != alphabet_size) {
            throw std::invalid_argument(
                "encoder.o_family.offsets must have one entry per symbol");
        }
        const std::uint64_t max_offset = seed_space.max_seed();
        std::unordered_set<std::uint64_t> seen;
        seen.reserve(affine->offsets.size());
        for (std::uint64_t a : affine->offsets) {
            if (a == 0 || a > max_offset) {
                throw std::invalid_argument(
                    "encoder.o_family.offsets entries must be in 1..S-1");
            }
            if (!seen.insert(a).second) {
                throw std::invalid_argument(
                    "encoder.o_family.offsets must be pairwise distinct");
            }
        }
        // Distinct nonzero offsets only exist for N <= S-1.
        if (!seed_space.is_full64() &&
            alphabet_size > seed_space.modulus_or_zero() - 1) {
            throw std::invalid_argument(
                "encoder.alphabet_size must be <= S-1 for affine seed updates");
        }
    }
}

Tick g_interval(const EncoderConfig& cfg, Seed s, std::uint64_t n) {
    const std::uint64_t k = cfg.levels;
    std::uint64_t level;
    switch (cfg.g_family.kind) {
        case GFamilyKind::PrfKeyed:
            level = prf64(cfg.g_family.key, s, n) % k;
            break;
        case GFamilyKind::ModularTest:
            level = (s % k + n % k) % k;
            break;
        default:
            throw std::logic_error("unknown interval family");
    }
    return cfg.tick * static_cast<Tick>(level + 1);
}

Seed apply_seed_update(const OFamily& fam, const SeedSpace& space, Seed s,
                       Symbol x) {
    if (const auto* affine = std::get_if<AffineOffsets>(&fam)) {
        return space.add(s, affine->offsets.at(x));
    }
    const auto& prf = std::get<PrfSeedMap>(fam);
    for (std::uint64_t i = 0; i < kMaxRehash; ++i) {
        const Seed r = space.reduce(prf64(prf.key, x, s, i));
        if (r != s) return r;
    }
    return space.add(s, 1);
}

Seed seed_update(const EncoderConfig& cfg, Seed s, Symbol x) {
    if (x >= cfg.alphabet_size) {
        throw std::invalid_argument("symbol outside alphabet");
    }
    return apply_seed_update(cfg.o_family, cfg.seed_space, s, x);
}

Codeword build_codeword(const EncoderConfig& cfg, std::span<const Event> events,
                        Tick horizon) {
    if (horizon <= cfg.t0) {
        throw std::invalid_argument("horizon must lie strictly after t0");
    }
    Tick prev = cfg.t0;
    for (const Event& ev : events) {
        if (ev.t <= prev) {
            throw std::invalid_argument(
                prev == cfg.t0 && ev.t <= cfg.t0
                    ? "event at or before t0"
                    : "event times must strictly increase");
        }
        if (ev.t >= horizon) {
            throw std::invalid_argument("event at or beyond the horizon");
        }
        if (ev.x >= cfg.alphabet_size) {
            throw std::invalid_argument("event symbol outside alphabet");
        }
        prev = ev.t;
    }

    Codeword pulses;
    Seed s = cfg.s0;
    Tick epoch_start = cfg.t0;
    for (std::size_t k = 0; k <= events.size(); ++k) {
        const Tick epoch_end = (k < events.size()) ? events[k].t : horizon;
        std::uint64_t n = 0;
        Tick tau = epoch_start + g_interval(cfg, s, 0);
        while (tau < epoch_end) {
            pulses.push_back(tau);
            ++n;
            tau += g_interval(cfg, s, n);
        }
        if (k < events.size()) {
            s = seed_update(cfg, s, events[k].x);
            epoch_start = events[k].t;
        }
    }
    return pulses;
}

TimeEncoder::TimeEncoder(EncoderConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    s_ = cfg_.s0;
    count_ = 0;
    epoch_start_ = cfg_.t0;
    next_pulse_ = cfg_.t0 + g_interval(cfg_, s_, 0);
}

void TimeEncoder::on_message(const Event& ev) {
    if (ev.t <= epoch_start_) {
        throw std::invalid_argument("message tick must strictly increase");
    }
    if (next_pulse_ < ev.t) {
        throw std::logic_error(
            "pulse scheduled at tick " + std::to_string(next_pulse_) +
            " was never driven before message at " + std::to_string(ev.t));
    }
    s_ = seed_update(cfg_, s_, ev.x);
    count_ = 0;
    epoch_start_ = ev.t;
    next_pulse_ = ev.t + g_interval(cfg_, s_, 0);
}

std::optional<Tick> TimeEncoder::on_tick(Tick now) {
    if (now != next_pulse_) {
        return std::nullopt;
    }
    ++count_;
    next_pulse_ += g_interval(cfg_, s_, count_);
    return now;
}

}  // namespace tcids
