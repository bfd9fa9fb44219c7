#pragma once

/**
 * @file simulation.hpp
 * @brief Discrete-event harness: stochastic source, attacker strategies
 *        on the two channels, and full scenario runs with trace capture.
 *
 * Channel model: the attacker has full read/write power over the payload
 * channel (tamper, delete, inject) but can only ADD pulses to the side
 * channel — honest pulses always reach the receiver at their original
 * ticks. apply_attack() constructs delivered streams by union only, so
 * that constraint holds for every expressible attack.
 */

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "tcids/encoder.hpp"
#include "tcids/verifier.hpp"

namespace tcids::sim {

using tcids::Codeword;
using tcids::EncoderConfig;
using tcids::Event;
using tcids::Symbol;
using tcids::Tick;

/// Inter-arrival law for the payload source, on the tick grid.
struct GapSpec {
    enum class Kind { Geometric, Fixed };
    Kind kind = Kind::Geometric;
    double mean = 20.0;  ///< Geometric: mean gap in ticks, >= 1
    Tick fixed = 1;      ///< Fixed: constant gap in ticks, >= 1
};

struct SourceSpec {
    std::vector<double> symbol_dist;  ///< must sum to 1 within 1e-12
    GapSpec gap;
    std::size_t count = 0;  ///< number of events to draw

    void validate(std::uint32_t alphabet_size) const;
};

/// Draws `spec.count` events with i.i.d. symbols and independent gaps,
/// starting strictly after cfg.t0. Reproducible from rng_seed.
std::vector<Event> generate_source(const SourceSpec& spec,
                                   const EncoderConfig& cfg,
                                   std::uint64_t rng_seed);

// ---------------------------------------------------------------------------
// Attacker strategies
// ---------------------------------------------------------------------------

struct NoAttack {};

/// Replace the symbol of event `index`, keeping its tick. A nullopt
/// replacement draws uniformly from the alphabet minus the original.
struct TamperAttack {
    std::size_t index = 0;
    std::optional<Symbol> replacement;
};

/// Remove event `index` from the payload channel.
struct DeleteAttack {
    std::size_t index = 0;
};

enum class InjectPulses {
    None,            ///< inject the message only
    SelfConsistent,  ///< also emit every pulse the receiver will expect
};

/// Insert a forged event (time, symbol). A self-consistent attacker forks
/// the public encoder state at injection time and adds exactly the pulses
/// the receiver's mirror will expect from then on; the sender's honest
/// pulses still arrive and are what eventually betray the fork.
struct InjectAttack {
    Tick time = 0;
    Symbol symbol = 0;
    InjectPulses pulses = InjectPulses::SelfConsistent;
};

/// Self-consistent injection that stops emitting compensation pulses
/// after `persist_ticks` ticks past the injection time.
struct AdaptiveInjectAttack {
    Tick time = 0;
    Symbol symbol = 0;
    Tick persist_ticks = 0;
};

using AttackSpec = std::variant<NoAttack, TamperAttack, DeleteAttack,
                                InjectAttack, AdaptiveInjectAttack>;

/// Payload and pulse streams as the receiver sees them, plus seed-chain
/// bookkeeping used by the detection-probability analysis.
struct DeliveredStreams {
    std::vector<Event> events;
    std::vector<Tick> pulses;  ///< superset of the honest pulses
    std::optional<Tick> attack_tick;
    /// Tamper only: the honest and forged seed updates collided at the
    /// attacked event itself (the change is invisible in the seed chain).
    bool seed_collision_at_attack = false;
    /// First post-attack shared event (1-based) at which the delivered
    /// seed chain rejoined the honest one; permanent escape follows.
    std::optional<std::size_t> first_reconverge_boundary;
};

DeliveredStreams apply_attack(const EncoderConfig& cfg,
                              std::span<const Event> source_events,
                              std::span<const Tick> honest_pulses,
                              const AttackSpec& attack, Tick horizon,
                              std::uint64_t rng_seed);

// ---------------------------------------------------------------------------
// Scenario runs
// ---------------------------------------------------------------------------

enum class RunOutcome {
    Detected,       ///< anomaly latched within the window
    Clean,          ///< delivered streams identical to the honest ones
    Escaped,        ///< effective attack, receiver state rejoined the sender's
    Indeterminate,  ///< divergence still pending when the window closed
};

struct Trace {
    std::vector<Event> source_events;
    std::vector<Event> delivered_events;
    Codeword honest_pulses;
    std::vector<Tick> delivered_pulses;
    Verdict verdict;
    std::optional<Tick> attack_tick;
    bool attack_effective = false;
    bool state_converged = false;  ///< receiver mirror == sender state at horizon
    bool seed_collision_at_attack = false;
    std::optional<std::size_t> first_reconverge_boundary;
    std::size_t attacker_pulse_count = 0;  ///< pulses the attacker had to emit
    Tick horizon = 0;

    RunOutcome outcome() const;
};

/// Full pipeline: draw source, encode, attack, deliver in tick order
/// (pulse before message on a shared tick), flush at the horizon.
/// Deterministic given rng_seed.
Trace run_scenario(const EncoderConfig& cfg, const SourceSpec& source,
                   const AttackSpec& attack, Tick horizon,
                   std::uint64_t rng_seed);

/// Injection-and-abandon experiment: a self-consistent attacker injects a
/// random symbol at (or at the first free tick after) `inject_time`,
/// compensates for `persist_ticks`, then goes silent. The trace records
/// whether the abandonment was caught and how many pulses the attacker
/// had to emit while hidden.
Trace trap_experiment(const EncoderConfig& cfg, Tick inject_time,
                      Tick persist_ticks, const SourceSpec& source,
                      Tick horizon, std::uint64_t rng_seed);

/// First tick strictly below `horizon` at which two sorted pulse streams
/// differ (mismatched element or one stream running out). nullopt when
/// they agree everywhere below the horizon.
std::optional<Tick> first_stream_divergence(std::span<const Tick> a,
                                            std::span<const Tick> b,
                                            Tick horizon);

}  // namespace tcids::sim
