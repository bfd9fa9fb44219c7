#pragma once

/**
 * @file encoder.hpp
 * @brief Causal time-code construction: interval family, seed updates,
 *        batch codeword builder and the incremental pulse encoder.
 *
 * The sender annotates a payload message stream with a pulse train on a
 * side channel. Pulses are spaced by intervals drawn from a seed-indexed
 * family g(s, n); every payload message rekeys the seed through a
 * per-symbol update map O_x and restarts the interval counter. The
 * resulting pulse-time set ("codeword") is a deterministic function of
 * the message history, so a receiver replaying the same construction can
 * authenticate the payload stream against the pulses it observes.
 *
 * Two equivalent constructions are provided:
 *  - build_codeword(): whole-trace batch form over a fixed time window;
 *  - TimeEncoder: incremental interrupt-style state machine driven by
 *    ticks and message arrivals.
 * Their equivalence is a test obligation, not an implementation detail.
 *
 * All times are integer ticks. Pulse matching downstream relies on exact
 * tick equality, so nothing here is ever expressed in real-valued time.
 */

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "tcids/prf.hpp"
#include "tcids/seed_space.hpp"

namespace tcids {

using Tick = std::int64_t;
using Seed = std::uint64_t;
using Symbol = std::uint32_t;

/// A timestamped payload message. Ticks strictly increase in a sequence
/// and every tick lies strictly after the configured time origin.
struct Event {
    Tick t = 0;
    Symbol x = 0;

    friend bool operator==(const Event&, const Event&) = default;
};

/// Interval family selector.
///  - PrfKeyed: g(s, n) = tick * (1 + PRF(key, s, n) mod K). Distinct
///    seeds give statistically independent interval streams.
///  - ModularTest: g(s, n) = tick * (((s + n) mod K) + 1). Deliberately
///    shift-degenerate (every seed pair matches under some shift); it is
///    the required negative fixture for the correlation checker.
enum class GFamilyKind { PrfKeyed, ModularTest };

struct GFamilySpec {
    GFamilyKind kind = GFamilyKind::PrfKeyed;
    Key128 key{};

    friend bool operator==(const GFamilySpec&, const GFamilySpec&) = default;
};

/// Seed update by affine shift: O_x(s) = (s + offsets[x]) mod S.
/// Invertible and fixed-point free when every offset is in 1..S-1;
/// per-seed injective across symbols when offsets are pairwise distinct.
struct AffineOffsets {
    std::vector<std::uint64_t> offsets;

    friend bool operator==(const AffineOffsets&, const AffineOffsets&) = default;
};

/// Seed update through the keyed PRF: O_x(s) = PRF(key, x, s) mod S with
/// deterministic re-hashing while the result would equal s. Fixed-point
/// free but not invertible, so distinct seeds can collide after an
/// update; that makes permanent-escape events observable at small S.
struct PrfSeedMap {
    Key128 key{};

    friend bool operator==(const PrfSeedMap&, const PrfSeedMap&) = default;
};

using OFamily = std::variant<AffineOffsets, PrfSeedMap>;

/// Full encoder parameterisation shared by sender and receiver. These
/// values are public protocol parameters, not secrets.
struct EncoderConfig {
    std::uint32_t alphabet_size = 0;  ///< N: symbols are 0..N-1
    Tick tick = 1;                    ///< grid unit of every interval
    std::uint32_t levels = 0;         ///< K: interval durations tick..K*tick
    SeedSpace seed_space;             ///< seeds live in 0..S-1
    GFamilySpec g_family;
    OFamily o_family;
    Seed s0 = 0;
    Tick t0 = 0;

    /// Throws std::invalid_argument naming the offending field.
    /// Rejects levels < 2 (a single interval duration makes every seed's
    /// stream identical) and affine offset sets that are zero, repeated,
    /// or out of range (those break deletion/tamper detectability).
    void validate() const;
};

/// Interval of the pulse train: value in {tick, 2*tick, ..., K*tick}.
/// Total and deterministic on valid inputs.
Tick g_interval(const EncoderConfig& cfg, Seed s, std::uint64_t n);

/// Applies the configured per-symbol seed update map.
Seed seed_update(const EncoderConfig& cfg, Seed s, Symbol x);

/// Seed update on an explicit family, without requiring a validated
/// config. Used by the analysis checkers so that deliberately broken
/// families can be scanned.
Seed apply_seed_update(const OFamily& fam, const SeedSpace& space, Seed s,
                       Symbol x);

/// Strictly increasing pulse ticks; the side-channel content.
using Codeword = std::vector<Tick>;

/// Batch construction of the codeword for `events` over [t0, horizon).
///
/// Epoch k starts at the k-th event (epoch 0 at t0 with seed s0) and emits
/// pulses at t_k + sum_{i=0..n} g(s_k, i) while strictly below the next
/// event time (the horizon bounds the last epoch). The strict inequality
/// guarantees no pulse ever shares a tick with a payload event.
///
/// Throws std::invalid_argument for non-increasing event times or events
/// outside (t0, horizon).
Codeword build_codeword(const EncoderConfig& cfg, std::span<const Event> events,
                        Tick horizon);

/// Value snapshot of the incremental encoder, comparable across
/// instances (used for receiver/sender convergence checks).
struct EncoderSnapshot {
    Seed s = 0;
    std::uint64_t count = 0;
    Tick epoch_start = 0;
    Tick next_pulse = 0;

    friend bool operator==(const EncoderSnapshot&, const EncoderSnapshot&) = default;
};

/**
 * @brief Incremental pulse encoder.
 *
 * Caller contract: inputs are applied in tick order. on_tick(now) emits a
 * pulse exactly when now equals the scheduled pulse tick; a message at
 * tick t must be applied before on_tick(t), which silently discards a
 * pulse that was pending for that same tick (matching the batch rule that
 * a pulse never coincides with an event).
 */
class TimeEncoder {
public:
    /// Validates the config (invalid configs are rejected here).
    explicit TimeEncoder(EncoderConfig cfg);

    /// Rekeys the seed and restarts the epoch at ev.t.
    /// Throws std::invalid_argument if ev.t is not strictly after the
    /// current epoch start, std::logic_error if a pulse strictly before
    /// ev.t was never emitted (driver bug).
    void on_message(const Event& ev);

    /// Emits the scheduled pulse when now matches it, otherwise no-op.
    std::optional<Tick> on_tick(Tick now);

    const EncoderConfig& config() const { return cfg_; }
    Seed seed() const { return s_; }
    std::uint64_t pulse_count() const { return count_; }
    Tick epoch_start() const { return epoch_start_; }
    Tick next_pulse() const { return next_pulse_; }

    EncoderSnapshot snapshot() const {
        return {s_, count_, epoch_start_, next_pulse_};
    }

private:
    EncoderConfig cfg_;
    Seed s_ = 0;
    std::uint64_t count_ = 0;
    Tick epoch_start_ = 0;
    Tick next_pulse_ = 0;
};

}  // namespace tcids
