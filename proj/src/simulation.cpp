#include "tcids/simulation.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <random>
#include <stdexcept>

namespace tcids::sim {

namespace {

double unit_real(std::mt19937_64& g) {
    return (static_cast<double>(g() >> 11) + 0.5) * 0x1.0p-53;
}

std::uint64_t bounded(std::mt19937_64& g, std::uint64_t n) {
    // Multiply-shift; bias below n / 2^64 is irrelevant at this fidelity.
    const auto wide = static_cast<unsigned __int128>(g()) * n;
    return static_cast<std::uint64_t>(wide >> 64);
}

Tick sample_gap(const GapSpec& gap, std::mt19937_64& g) {
    if (gap.kind == GapSpec::Kind::Fixed) return gap.fixed;
    if (gap.mean <= 1.0) return 1;
    // Geometric on {1, 2, ...} with the requested mean.
    const double p = 1.0 / gap.mean;
    const double k = std::floor(std::log(unit_real(g)) / std::log1p(-p));
    return 1 + static_cast<Tick>(std::min(k, 1.0e15));
}

Symbol sample_symbol(const std::vector<double>& dist, std::mt19937_64& g) {
    const double u = unit_real(g);
    double acc = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        acc += dist[i];
        if (u < acc) return static_cast<Symbol>(i);
    }
    return static_cast<Symbol>(dist.size() - 1);
}

Seed fold_seeds(const EncoderConfig& cfg, std::span<const Event> events,
                std::size_t n) {
    Seed s = cfg.s0;
    for (std::size_t i = 0; i < n; ++i) {
        s = seed_update(cfg, s, events[i].x);
    }
    return s;
}

// Walks the honest and delivered seed chains over the shared post-attack
// events and records the first boundary at which they rejoin.
void track_seed_chains(DeliveredStreams& out, const EncoderConfig& cfg,
                       std::span<const Event> source_events,
                       Seed honest_at_attack, Seed delivered_at_attack,
                       std::size_t first_shared_index) {
    out.seed_collision_at_attack = honest_at_attack == delivered_at_attack;
    if (out.seed_collision_at_attack) return;
    Seed h = honest_at_attack;
    Seed d = delivered_at_attack;
    for (std::size_t j = first_shared_index; j < source_events.size(); ++j) {
        h = seed_update(cfg, h, source_events[j].x);
        d = seed_update(cfg, d, source_events[j].x);
        if (h == d) {
            out.first_reconverge_boundary = j - first_shared_index + 1;
            return;
        }
    }
}

std::vector<Tick> union_pulses(std::span<const Tick> honest,
                               std::span<const Tick> added) {
    std::vector<Tick> merged(honest.begin(), honest.end());
    merged.insert(merged.end(), added.begin(), added.end());
    std::sort(merged.begin(), merged.end());
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
    return merged;
}

DeliveredStreams inject_impl(const EncoderConfig& cfg,
                             std::span<const Event> source_events,
                             std::span<const Tick> honest_pulses, Tick time,
                             Symbol symbol, bool with_pulses, Tick window_end,
                             Tick horizon) {
    if (time <= cfg.t0 || time >= horizon) {
        throw std::invalid_argument("inject: time must lie in (t0, horizon)");
    }
    if (symbol >= cfg.alphabet_size) {
        throw std::invalid_argument("inject: symbol outside alphabet");
    }

    DeliveredStreams out;
    out.attack_tick = time;

    const auto at = std::lower_bound(
        source_events.begin(), source_events.end(), time,
        [](const Event& e, Tick t) { return e.t < t; });
    if (at != source_events.end() && at->t == time) {
        if (at->x != symbol) {
            throw std::invalid_argument(
                "inject: tick already carries a different symbol");
        }
        // Forged event indistinguishable from the honest one: a no-op.
        out.events.assign(source_events.begin(), source_events.end());
        out.pulses.assign(honest_pulses.begin(), honest_pulses.end());
        return out;
    }

    out.events.assign(source_events.begin(), at);
    out.events.push_back({time, symbol});
    out.events.insert(out.events.end(), at, source_events.end());

    std::vector<Tick> added;
    if (with_pulses) {
        // The receiver will expect the codeword of the delivered events;
        // the attacker emits whatever part of it the sender will not.
        const Codeword fork = build_codeword(cfg, out.events, horizon);
        for (Tick p : fork) {
            if (p > time && p <= window_end &&
                !std::binary_search(honest_pulses.begin(), honest_pulses.end(),
                                    p)) {
                added.push_back(p);
            }
        }
    }
    out.pulses = union_pulses(honest_pulses, added);

    const std::size_t inserted_at =
        static_cast<std::size_t>(at - source_events.begin());
    const Seed pre = fold_seeds(cfg, source_events, inserted_at);
    track_seed_chains(out, cfg, source_events, pre,
                      seed_update(cfg, pre, symbol), inserted_at);
    return out;
}

}  // namespace

void SourceSpec::validate(std::uint32_t alphabet_size) const {
    if (symbol_dist.size() != alphabet_size) {
        throw std::invalid_argument(
            "source.symbol_dist must have one entry per symbol");
    }
    double sum = 0.0;
    for (double p : symbol_dist) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
            throw std::invalid_argument(
                "source.symbol_dist entries must be finite and >= 0");
        }
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        throw std::invalid_argument("source.symbol_dist must sum to 1");
    }
    if (gap.kind == GapSpec::Kind::Geometric &&
        !(gap.mean >= 1.0 && std::isfinite(gap.mean))) {
        throw std::invalid_argument("source.gap.mean must be >= 1");
    }
    if (gap.kind == GapSpec::Kind::Fixed && gap.fixed < 1) {
        throw std::invalid_argument("source.gap.fixed must be >= 1");
    }
}

std::vector<Event> generate_source(const SourceSpec& spec,
                                   const EncoderConfig& cfg,
                                   std::uint64_t rng_seed) {
    spec.validate(cfg.alphabet_size);
    std::mt19937_64 rng(rng_seed);
    std::vector<Event> events;
    events.reserve(spec.count);
    Tick t = cfg.t0;
    for (std::size_t i = 0; i < spec.count; ++i) {
        t += sample_gap(spec.gap, rng);
        events.push_back({t, sample_symbol(spec.symbol_dist, rng)});
    }
    return events;
}

DeliveredStreams apply_attack(const EncoderConfig& cfg,
                              std::span<const Event> source_events,
                              std::span<const Tick> honest_pulses,
                              const AttackSpec& attack, Tick horizon,
                              std::uint64_t rng_seed) {
    DeliveredStreams out;

    if (std::holds_alternative<NoAttack>(attack)) {
        out.events.assign(source_events.begin(), source_events.end());
        out.pulses.assign(honest_pulses.begin(), honest_pulses.end());
        return out;
    }

    if (const auto* tamper = std::get_if<TamperAttack>(&attack)) {
        if (tamper->index >= source_events.size()) {
            throw std::invalid_argument("tamper: index outside the sequence");
        }
        const Event original = source_events[tamper->index];
        Symbol forged;
        if (tamper->replacement) {
            forged = *tamper->replacement;
            if (forged >= cfg.alphabet_size) {
                throw std::invalid_argument("tamper: symbol outside alphabet");
            }
        } else {
            if (cfg.alphabet_size < 2) {
                throw std::invalid_argument(
                    "tamper: random replacement needs an alphabet of >= 2");
            }
            std::mt19937_64 rng(rng_seed);
            forged = static_cast<Symbol>(bounded(rng, cfg.alphabet_size - 1));
            if (forged >= original.x) ++forged;
        }
        out.events.assign(source_events.begin(), source_events.end());
        out.events[tamper->index].x = forged;
        out.pulses.assign(honest_pulses.begin(), honest_pulses.end());
        out.attack_tick = original.t;

        const Seed pre = fold_seeds(cfg, source_events, tamper->index);
        track_seed_chains(out, cfg, source_events,
                          seed_update(cfg, pre, original.x),
                          seed_update(cfg, pre, forged), tamper->index + 1);
        return out;
    }

    if (const auto* del = std::get_if<DeleteAttack>(&attack)) {
        if (del->index >= source_events.size()) {
            throw std::invalid_argument("delete: index outside the sequence");
        }
        out.events.assign(source_events.begin(), source_events.end());
        out.events.erase(out.events.begin() +
                         static_cast<std::ptrdiff_t>(del->index));
        out.pulses.assign(honest_pulses.begin(), honest_pulses.end());
        out.attack_tick = source_events[del->index].t;

        const Seed pre = fold_seeds(cfg, source_events, del->index);
        track_seed_chains(out, cfg, source_events,
                          seed_update(cfg, pre, source_events[del->index].x),
                          pre, del->index + 1);
        return out;
    }

    if (const auto* inj = std::get_if<InjectAttack>(&attack)) {
        return inject_impl(cfg, source_events, honest_pulses, inj->time,
                           inj->symbol,
                           inj->pulses == InjectPulses::SelfConsistent, horizon,
                           horizon);
    }

    const auto& adaptive = std::get<AdaptiveInjectAttack>(attack);
    if (adaptive.persist_ticks < 0) {
        throw std::invalid_argument("inject: persist_ticks must be >= 0");
    }
    return inject_impl(cfg, source_events, honest_pulses, adaptive.time,
                       adaptive.symbol, true,
                       adaptive.time + adaptive.persist_ticks, horizon);
}

RunOutcome Trace::outcome() const {
    if (verdict.detected) return RunOutcome::Detected;
    if (!attack_effective) return RunOutcome::Clean;
    return state_converged ? RunOutcome::Escaped : RunOutcome::Indeterminate;
}

Trace run_scenario(const EncoderConfig& cfg, const SourceSpec& source,
                   const AttackSpec& attack, Tick horizon,
                   std::uint64_t rng_seed) {
    cfg.validate();
    if (horizon <= cfg.t0) {
        throw std::invalid_argument("horizon must lie strictly after t0");
    }

    auto events = generate_source(source, cfg, derive_stream_seed(rng_seed, 1));
    std::erase_if(events, [&](const Event& e) { return e.t >= horizon; });

    Codeword honest = build_codeword(cfg, events, horizon);
    DeliveredStreams ds = apply_attack(cfg, events, honest, attack, horizon,
                                       derive_stream_seed(rng_seed, 2));
    assert(std::includes(ds.pulses.begin(), ds.pulses.end(), honest.begin(),
                         honest.end()));

    // Tick-ordered delivery, pulse before message on a shared tick so a
    // forged coincidence has to survive both checks.
    Verifier verifier(cfg);
    std::size_t pi = 0;
    std::size_t ei = 0;
    while (pi < ds.pulses.size() || ei < ds.events.size()) {
        const bool pulse_next =
            pi < ds.pulses.size() &&
            (ei >= ds.events.size() || ds.pulses[pi] <= ds.events[ei].t);
        if (pulse_next) {
            verifier.on_pulse(ds.pulses[pi++]);
        } else {
            verifier.on_message(ds.events[ei++]);
        }
    }
    verifier.flush(horizon);

    // Sender state at the horizon, replayed through the incremental encoder.
    TimeEncoder sender(cfg);
    for (const Event& ev : events) {
        while (sender.next_pulse() < ev.t) {
            sender.on_tick(sender.next_pulse());
        }
        sender.on_message(ev);
    }
    while (sender.next_pulse() < horizon) {
        sender.on_tick(sender.next_pulse());
    }

    Trace tr;
    tr.source_events = std::move(events);
    tr.delivered_events = std::move(ds.events);
    tr.honest_pulses = std::move(honest);
    tr.delivered_pulses = std::move(ds.pulses);
    tr.verdict = verifier.verdict();
    tr.attack_tick = ds.attack_tick;
    tr.attack_effective = tr.delivered_events != tr.source_events ||
                          tr.delivered_pulses != tr.honest_pulses;
    tr.state_converged = !tr.verdict.detected &&
                         verifier.mirror().snapshot() == sender.snapshot();
    tr.seed_collision_at_attack = ds.seed_collision_at_attack;
    tr.first_reconverge_boundary = ds.first_reconverge_boundary;
    tr.attacker_pulse_count =
        tr.delivered_pulses.size() - tr.honest_pulses.size();
    tr.horizon = horizon;
    return tr;
}

Trace trap_experiment(const EncoderConfig& cfg, Tick inject_time,
                      Tick persist_ticks, const SourceSpec& source,
                      Tick horizon, std::uint64_t rng_seed) {
    cfg.validate();
    if (inject_time <= cfg.t0) {
        throw std::invalid_argument("trap: inject_time must lie after t0");
    }
    if (persist_ticks < 0) {
        throw std::invalid_argument("trap: persist_ticks must be >= 0");
    }

    std::mt19937_64 rng(derive_stream_seed(rng_seed, 3));
    const auto symbol = static_cast<Symbol>(bounded(rng, cfg.alphabet_size));

    // Same draw run_scenario will use, so tick conflicts can be resolved
    // up front: the attacker transmits at the first tick at or after the
    // requested time that is free or carries her exact symbol already.
    auto events = generate_source(source, cfg, derive_stream_seed(rng_seed, 1));
    std::erase_if(events, [&](const Event& e) { return e.t >= horizon; });
    Tick time = inject_time;
    auto conflicting = [&](Tick t) {
        const auto it = std::lower_bound(
            events.begin(), events.end(), t,
            [](const Event& e, Tick tt) { return e.t < tt; });
        return it != events.end() && it->t == t && it->x != symbol;
    };
    while (time < horizon && conflicting(time)) {
        ++time;
    }
    if (time >= horizon) {
        throw std::invalid_argument(
            "trap: no usable injection tick before the horizon");
    }

    return run_scenario(cfg, source,
                        AdaptiveInjectAttack{time, symbol, persist_ticks},
                        horizon, rng_seed);
}

std::optional<Tick> first_stream_divergence(std::span<const Tick> a,
                                            std::span<const Tick> b,
                                            Tick horizon) {
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i] != b[i]) {
            const Tick d = std::min(a[i], b[i]);
            return d < horizon ? std::optional<Tick>(d) : std::nullopt;
        }
    }
    if (a.size() != b.size()) {
        const Tick d = (a.size() > n) ? a[n] : b[n];
        return d < horizon ? std::optional<Tick>(d) : std::nullopt;
    }
    return std::nullopt;
}

}  // namespace tcids::sim
