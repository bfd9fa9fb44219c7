// Acceptance suite: runs every exit criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tcids/analysis.hpp"
#include "tcids/encoder.hpp"
#include "tcids/prf.hpp"
#include "tcids/simulation.hpp"
#include "tcids/verifier.hpp"

#include "stream_oracle.hpp"

using namespace tcids;
using analysis::Rational;

namespace {

struct CriterionResult {
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                             start_)
            .count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

// --------------------------------------------------------------------------
// Shared generators
// --------------------------------------------------------------------------

EncoderConfig random_config(std::mt19937_64& rng) {
    static const std::uint32_t level_choices[] = {2, 4, 8};
    EncoderConfig cfg;
    cfg.alphabet_size = 2 + static_cast<std::uint32_t>(rng() % 7);
    cfg.tick = 1;
    cfg.levels = level_choices[rng() % 3];
    cfg.seed_space = (rng() % 2 == 0) ? SeedSpace::mod(16) : SeedSpace::full64();
    cfg.g_family.kind =
        (rng() % 5 == 0) ? GFamilyKind::ModularTest : GFamilyKind::PrfKeyed;
    cfg.g_family.key = {rng(), rng()};
    if (rng() % 2 == 0) {
        AffineOffsets affine;
        for (std::uint32_t i = 0; i < cfg.alphabet_size; ++i) {
            affine.offsets.push_back(i + 1);
        }
        cfg.o_family = std::move(affine);
    } else {
        cfg.o_family = PrfSeedMap{{rng(), rng()}};
    }
    cfg.s0 = cfg.seed_space.reduce(rng());
    cfg.t0 = static_cast<Tick>(rng() % 5);
    return cfg;
}

std::vector<Event> random_events(std::mt19937_64& rng, const EncoderConfig& cfg,
                                 Tick horizon, std::size_t max_count) {
    std::vector<Event> events;
    Tick t = cfg.t0;
    for (std::size_t i = 0; i < max_count; ++i) {
        t += 1 + static_cast<Tick>(rng() % 60);
        if (t >= horizon) break;
        events.push_back({t, static_cast<Symbol>(rng() % cfg.alphabet_size)});
    }
    return events;
}

// First tick at which the infinite codewords of two event lists differ,
// searched over doubling windows. The seed chains of the two lists are
// guaranteed split, so a difference must exist.
Tick find_codeword_difference(const EncoderConfig& cfg,
                              const std::vector<Event>& a,
                              const std::vector<Event>& b, Tick start_horizon) {
    Tick window = start_horizon;
    for (int attempt = 0; attempt < 16; ++attempt) {
        const auto ca = build_codeword(cfg, a, window);
        const auto cb = build_codeword(cfg, b, window);
        const auto div = sim::first_stream_divergence(ca, cb, window);
        if (div) return *div;
        window *= 2;
    }
    return -1;
}

// --------------------------------------------------------------------------
// C1: batch and incremental constructions agree
// --------------------------------------------------------------------------

CriterionResult criterion_encoder_equivalence() {
    Timer timer;
    const std::size_t instances = 1000;
    std::size_t matched = 0;
    std::mt19937_64 rng(0xC1);
    for (std::size_t i = 0; i < instances; ++i) {
        const EncoderConfig cfg = random_config(rng);
        const Tick horizon =
            cfg.t0 + 100 + static_cast<Tick>(rng() % 9900);  // <= 10^4 ticks
        const auto events = random_events(rng, cfg, horizon, rng() % 51);

        const Codeword batch = build_codeword(cfg, events, horizon);

        TimeEncoder enc(cfg);
        Codeword incremental;
        std::size_t next_event = 0;
        for (Tick now = cfg.t0 + 1; now < horizon; ++now) {
            if (next_event < events.size() && events[next_event].t == now) {
                enc.on_message(events[next_event++]);
            }
            if (const auto pulse = enc.on_tick(now)) {
                incremental.push_back(*pulse);
            }
        }
        if (batch == incremental) ++matched;
    }
    const double secs = timer.seconds();
    CriterionResult r;
    r.name = "encoder-equivalence";
    r.passed = matched == instances && secs < 10.0;
    std::ostringstream os;
    os << matched << "/" << instances << " codewords identical";
    r.detail = os.str();
    r.seconds = secs;
    return r;
}

// --------------------------------------------------------------------------
// C2: honest runs never alarm
// --------------------------------------------------------------------------

CriterionResult criterion_honest_completeness() {
    Timer timer;
    const std::size_t runs = 10000;
    std::size_t clean = 0;
    for (std::size_t i = 0; i < runs; ++i) {
        EncoderConfig cfg;
        cfg.alphabet_size = 4;
        cfg.tick = 1;
        cfg.levels = (i % 2 == 0) ? 4 : 8;
        cfg.seed_space = SeedSpace::mod(16);
        cfg.g_family = {GFamilyKind::PrfKeyed, Key128{0xC2, i % 7}};
        if (i % 2 == 0) {
            cfg.o_family = AffineOffsets{{1, 2, 3, 4}};
        } else {
            cfg.o_family = PrfSeedMap{Key128{0xC2C2, 0x11}};
        }
        cfg.s0 = static_cast<Seed>(i % 16);
        cfg.t0 = 0;

        sim::SourceSpec source;
        source.symbol_dist.assign(4, 0.25);
        source.gap.mean = 25.0;
        source.count = 30;

        const auto tr =
            sim::run_scenario(cfg, source, sim::NoAttack{}, 1500, 0xC2000 + i);
        if (!tr.verdict.detected) ++clean;
    }
    const double secs = timer.seconds();
    CriterionResult r;
    r.name = "honest-completeness";
    r.passed = clean == runs && secs < 30.0;
    std::ostringstream os;
    os << clean << "/" << runs << " honest runs without false alarm";
    r.detail = os.str();
    r.seconds = secs;
    return r;
}

// --------------------------------------------------------------------------
// C3: deleting the last event always changes the codeword and is caught
//     whenever the divergent pulse lies inside the window
// --------------------------------------------------------------------------

CriterionResult criterion_deletion() {
    Timer timer;
    const std::size_t instances = 1000;
    std::size_t changed = 0;
    std::size_t detected = 0;
    std::size_t divergent_in_window = 0;
    std::size_t truncated_ok = 0;
    std::size_t truncated = 0;
    std::mt19937_64 rng(0xC3);
    CriterionResult r;
    r.name = "deletion-detection";

    for (std::size_t i = 0; i < instances; ++i) {
        EncoderConfig cfg = random_config(rng);
        cfg.t0 = 0;
        // Deletion detectability presupposes an interval family without
        // shift-matched seed streams; the modular fixture violates that
        // on purpose, so these instances use the keyed family.
        cfg.g_family.kind = GFamilyKind::PrfKeyed;
        sim::SourceSpec source;
        source.symbol_dist.assign(cfg.alphabet_size,
                                  1.0 / cfg.alphabet_size);
        source.gap.mean = 20.0;
        source.count = 10;
        const Tick horizon = 2500;

        const auto tr = sim::run_scenario(
            cfg, source, sim::DeleteAttack{source.count - 1}, horizon,
            0xC3000 + i);

        // Infinite codewords must differ (fixed-point-free seed updates).
        if (find_codeword_difference(cfg, tr.source_events,
                                     tr.delivered_events, horizon) >= 0) {
            ++changed;
        }

        const auto expected = tcids_test::expected_pulse_stream(cfg, tr);
        const auto div = sim::first_stream_divergence(tr.delivered_pulses,
                                                      expected, horizon);
        if (div) {
            ++divergent_in_window;
            if (tr.verdict.detected &&
                *tr.verdict.detection_tick == *div) {
                ++detected;
            }
        } else {
            ++truncated;
            if (!tr.verdict.detected &&
                tr.outcome() == sim::RunOutcome::Indeterminate) {
                ++truncated_ok;
            }
        }
    }
    const double secs = timer.seconds();
    r.passed = changed == instances && detected == divergent_in_window &&
               truncated_ok == truncated && secs < 30.0;
    std::ostringstream os;
    os << changed << "/" << instances << " codewords changed; " << detected
       << "/" << divergent_in_window
       << " divergent runs detected at the divergence tick; " << truncated
       << " truncated runs reported indeterminate";
    r.detail = os.str();
    r.seconds = secs;
    return r;
}

// --------------------------------------------------------------------------
// C4: last-symbol tampering always changes the codeword (affine);
//     tamper-time seed collisions appear at the random-map rate at S=16
// --------------------------------------------------------------------------

CriterionResult criterion_tampering() {
    Timer timer;
    const std::size_t instances = 1000;
    std::size_t changed = 0;
    std::mt19937_64 rng(0xC4);
    for (std::size_t i = 0; i < instances; ++i) {
        EncoderConfig cfg = random_config(rng);
        cfg.g_family.kind = GFamilyKind::PrfKeyed;  // see deletion criterion
        cfg.o_family = AffineOffsets{};
        auto& offsets = std::get<AffineOffsets>(cfg.o_family).offsets;
        for (std::uint32_t k = 0; k < cfg.alphabet_size; ++k) {
            offsets.push_back(k + 1);
        }
        const Tick horizon = 1500;
        auto events = random_events(rng, cfg, horizon, 10);
        if (events.empty()) {
            events.push_back({cfg.t0 + 3, 0});
        }
        auto forged = events;
        forged.back().x = static_cast<Symbol>(
            (forged.back().x + 1 + rng() % (cfg.alphabet_size - 1)) %
            cfg.alphabet_size);
        if (find_codeword_difference(cfg, events, forged, horizon) >= 0) {
            ++changed;
        }
    }

    // PRF seed map at S=16: collision of the honest and forged updates.
    EncoderConfig prf_cfg;
    prf_cfg.alphabet_size = 4;
    prf_cfg.tick = 1;
    prf_cfg.levels = 4;
    prf_cfg.seed_space = SeedSpace::mod(16);
    prf_cfg.g_family = {GFamilyKind::PrfKeyed, Key128{0xC4C4, 0x01}};
    prf_cfg.o_family = PrfSeedMap{Key128{0xC4C4, 0x02}};
    prf_cfg.s0 = 3;
    sim::SourceSpec source;
    source.symbol_dist.assign(4, 0.25);
    source.gap.kind = sim::GapSpec::Kind::Fixed;
    source.gap.fixed = 6;
    source.count = 3;

    const std::size_t trials = 10000;
    const auto est = analysis::monte_carlo_detection(
        prf_cfg, source, sim::TamperAttack{1, {}}, trials, 60, 0xC4AA);
    const double freq = static_cast<double>(est.seed_collisions_at_attack) /
                        static_cast<double>(trials);
    const double expected = 1.0 / 16.0;
    const double sigma =
        std::sqrt(expected * (1.0 - expected) / static_cast<double>(trials));
    const bool collision_ok = std::abs(freq - expected) <= 3.0 * sigma;

    CriterionResult r;
    r.name = "tamper-detection";
    r.passed = changed == instances && collision_ok;
    std::ostringstream os;
    os << changed << "/" << instances
       << " forged codewords differ; seed-collision rate " << freq << " vs "
       << expected << " (3-sigma " << 3.0 * sigma << ")";
    r.detail = os.str();
    r.seconds = timer.seconds();
    return r;
}

// --------------------------------------------------------------------------
// C5: empirical first-boundary survival matches the gap DP; the DP
//     matches exhaustive enumeration exactly
// --------------------------------------------------------------------------

void enumerate_pulse_sets(Tick gap, long long levels, Tick pos, Rational prob,
                          std::vector<Tick>& current,
                          std::map<std::vector<Tick>, Rational>& acc) {
    const Tick need = gap - pos;
    long long leaving;
    if (need <= 1) {
        leaving = levels;
    } else if (need > levels) {
        leaving = 0;
    } else {
        leaving = levels - need + 1;
    }
    if (leaving > 0) {
        acc[current] = acc[current] + prob * Rational::ratio(leaving, levels);
    }
    for (Tick j = 1; j <= levels && pos + j < gap; ++j) {
        current.push_back(pos + j);
        enumerate_pulse_sets(gap, levels, pos + j,
                             prob * Rational::ratio(1, levels), current, acc);
        current.pop_back();
    }
}

Rational gap_agreement_by_enumeration(Tick gap, long long levels) {
    std::map<std::vector<Tick>, Rational> sets;
    std::vector<Tick> current;
    enumerate_pulse_sets(gap, levels, 0, Rational{1}, current, sets);
    Rational agreement{0};
    for (const auto& [set, mass] : sets) {
        agreement = agreement + mass * mass;
    }
    return agreement;
}

CriterionResult criterion_gap_probabilities() {
    Timer timer;
    bool all_ok = true;
    double worst_z = 0.0;
    std::ostringstream failures;

    for (std::uint32_t levels : {2u, 4u, 8u}) {
        for (Tick gap = 2; gap <= 10; ++gap) {
            EncoderConfig cfg;
            cfg.alphabet_size = 4;
            cfg.tick = 1;
            cfg.levels = levels;
            cfg.seed_space = SeedSpace::mod(16);
            cfg.g_family = {GFamilyKind::PrfKeyed,
                            Key128{0xC500 + levels, static_cast<std::uint64_t>(gap)}};
            cfg.o_family = AffineOffsets{{1, 2, 3, 4}};
            cfg.s0 = 7;

            sim::SourceSpec source;
            source.symbol_dist.assign(4, 0.25);
            source.gap.kind = sim::GapSpec::Kind::Fixed;
            source.gap.fixed = gap;
            source.count = 3;

            const std::size_t trials = 10000;
            const Tick horizon = 4 * gap + Tick{levels} + 10;
            const auto est = analysis::monte_carlo_detection(
                cfg, source, sim::TamperAttack{1, {}}, trials, horizon,
                0xC5000 + 100 * levels + static_cast<std::uint64_t>(gap));

            const double predicted = analysis::gap_agreement_prob(gap, levels);
            const double freq = est.undetected_frequency(0);
            const double sigma = std::sqrt(
                predicted * (1.0 - predicted) / static_cast<double>(trials));
            const double z = std::abs(freq - predicted) / sigma;
            worst_z = std::max(worst_z, z);
            if (z > 3.0) {
                all_ok = false;
                failures << " [K=" << levels << " G=" << gap << " freq=" << freq
                         << " dp=" << predicted << "]";
            }
        }
    }

    bool dp_exact = true;
    for (long long levels = 2; levels <= 4; ++levels) {
        for (Tick gap = 0; gap <= 8; ++gap) {
            const auto exact = analysis::gap_agreement_prob_exact(
                gap, static_cast<std::uint32_t>(levels));
            if (!(exact == gap_agreement_by_enumeration(gap, levels))) {
                dp_exact = false;
            }
        }
    }

    const double secs = timer.seconds();
    CriterionResult r;
    r.name = "gap-survival-probabilities";
    r.passed = all_ok && dp_exact && secs < 120.0;
    std::ostringstream os;
    os << "27 (K, G) combos within 3 sigma (worst z = " << worst_z
       << "); DP == enumeration " << (dp_exact ? "exactly" : "FAILED")
       << failures.str();
    r.detail = os.str();
    r.seconds = secs;
    return r;
}

// --------------------------------------------------------------------------
// C6: invertible seed updates leave no escape path; tree decays
//     geometrically
// --------------------------------------------------------------------------

CriterionResult criterion_no_escape_when_invertible() {
    Timer timer;
    EncoderConfig cfg;
    cfg.alphabet_size = 4;
    cfg.tick = 1;
    cfg.levels = 4;
    cfg.seed_space = SeedSpace::mod(16);
    cfg.g_family = {GFamilyKind::PrfKeyed, Key128{0xC6, 0x01}};
    cfg.o_family = AffineOffsets{{1, 2, 3, 4}};
    cfg.s0 = 9;

    sim::SourceSpec source;
    source.symbol_dist.assign(4, 0.25);
    source.gap.kind = sim::GapSpec::Kind::Fixed;
    source.gap.fixed = 5;
    source.count = 6;

    const std::size_t trials = 10000;
    const auto est = analysis::monte_carlo_detection(
        cfg, source, sim::TamperAttack{1, {}}, trials, 80, 0xC600);
    std::size_t reconvergences = 0;
    for (std::size_t c : est.reconverged_at_boundary) reconvergences += c;

    bool tree_ok = true;
    for (const double p : {0.65, 0.9}) {
        const std::size_t depth = 50;
        const auto tree = analysis::tree_undetected_prob(
            {std::vector<double>(depth, p), std::vector<double>(depth, 0.0)});
        if (tree.permanent_escape != 0.0) tree_ok = false;
        if (std::abs(tree.undetected_by_level.back() - std::pow(p, depth)) >
            1e-12) {
            tree_ok = false;
        }
    }

    CriterionResult r;
    r.name = "invertible-no-escape";
    r.passed = est.escaped == 0 && est.seed_collisions_at_attack == 0 &&
               reconvergences == 0 && tree_ok;
    std::ostringstream os;
    os << est.escaped << " escapes, " << est.seed_collisions_at_attack
       << " seed collisions, " << reconvergences << " reconvergences over "
       << trials << " tamper trials; geometric tree decay "
       << (tree_ok ? "within 1e-12" : "FAILED");
    r.detail = os.str();
    r.seconds = timer.seconds();
    return r;
}

// --------------------------------------------------------------------------
// C7: the shift-correlation checker finds every planted violation and
//     none in the PRF family
// --------------------------------------------------------------------------

CriterionResult criterion_correlation_checker() {
    Timer timer;
    EncoderConfig modular;
    modular.alphabet_size = 4;
    modular.tick = 1;
    modular.levels = 4;
    modular.seed_space = SeedSpace::mod(16);
    modular.g_family = {GFamilyKind::ModularTest, {}};
    modular.o_family = AffineOffsets{{1, 2, 3, 4}};

    std::vector<std::pair<Seed, Seed>> pairs;
    for (Seed a = 0; a < 16; ++a) {
        for (Seed b = a + 1; b < 16; ++b) pairs.emplace_back(a, b);
    }
    const auto modular_report =
        analysis::scan_shift_correlation(modular, pairs, 64, 64);
    std::size_t found = 0;
    for (const auto& [a, b] : pairs) {
        const std::uint64_t shift = (a + 4 - b % 4) % 4;
        const bool hit = std::any_of(
            modular_report.violations.begin(), modular_report.violations.end(),
            [&](const analysis::CorrelationViolation& v) {
                return v.s_a == a && v.s_b == b && v.shift == shift;
            });
        if (hit) ++found;
    }

    EncoderConfig prf = modular;
    prf.g_family = {GFamilyKind::PrfKeyed, Key128{0xC7, 0x07}};
    prf.seed_space = SeedSpace::full64();
    std::mt19937_64 rng(0xC7C7);
    std::vector<std::pair<Seed, Seed>> prf_pairs;
    while (prf_pairs.size() < 100) {
        const Seed a = rng();
        const Seed b = rng();
        if (a != b) prf_pairs.emplace_back(a, b);
    }
    const auto prf_report =
        analysis::scan_shift_correlation(prf, prf_pairs, 64, 64);

    CriterionResult r;
    r.name = "correlation-checker-power";
    r.passed = found == pairs.size() && prf_report.violations.empty();
    std::ostringstream os;
    os << found << "/" << pairs.size()
       << " planted violations found; PRF family violations: "
       << prf_report.violations.size() << "/100 pairs";
    r.detail = os.str();
    r.seconds = timer.seconds();
    return r;
}

// --------------------------------------------------------------------------
// C8: pairing map round-trip accuracy
// --------------------------------------------------------------------------

CriterionResult criterion_pairing_map() {
    Timer timer;
    std::mt19937_64 rng(0xC8);
    long double worst = 0.0L;
    bool index_ok = true;
    for (int i = 0; i < 1000; ++i) {
        const long double t = 20.0L * static_cast<long double>(rng()) /
                              static_cast<long double>(~0ULL);
        const std::uint64_t n = rng() % 11;
        const auto decoded =
            analysis::decode_time_index(analysis::encode_time_index(t, n));
        if (decoded.n != n) index_ok = false;
        worst = std::max(worst, std::abs(decoded.t - t));
    }
    CriterionResult r;
    r.name = "pairing-map-round-trip";
    r.passed = index_ok && worst < 1e-9L;
    std::ostringstream os;
    os << "max |t' - t| = " << static_cast<double>(worst)
       << (index_ok ? ", indices exact" : ", index mismatch");
    r.detail = os.str();
    r.seconds = timer.seconds();
    return r;
}

// --------------------------------------------------------------------------
// C9: a self-consistent injector who stops compensating is caught at the
//     first stream divergence; the attacker's pulse cost is quantified
// --------------------------------------------------------------------------

CriterionResult criterion_trap() {
    Timer timer;
    EncoderConfig cfg;
    cfg.alphabet_size = 4;
    cfg.tick = 1;
    cfg.levels = 4;
    cfg.seed_space = SeedSpace::mod(16);
    cfg.g_family = {GFamilyKind::PrfKeyed, Key128{0xC9, 0x09}};
    cfg.o_family = AffineOffsets{{1, 2, 3, 4}};
    cfg.s0 = 2;

    sim::SourceSpec source;
    source.symbol_dist.assign(4, 0.25);
    source.gap.mean = 25.0;
    source.count = 6;

    const Tick horizon = 700;
    std::size_t divergent = 0;
    std::size_t caught_at_divergence = 0;
    std::size_t consistent_runs = 0;
    std::size_t effective_runs = 0;
    std::size_t total_cost = 0;
    std::size_t max_cost = 0;
    std::size_t cost_mismatch = 0;

    for (std::uint64_t i = 0; i < 1000; ++i) {
        // Half abandon instantly, half compensate for a while first.
        const Tick persist = (i % 2 == 0) ? 0 : static_cast<Tick>(40 + i % 120);
        const auto tr = sim::trap_experiment(cfg, 60 + static_cast<Tick>(i % 90),
                                             persist, source, horizon,
                                             0xC9000 + i);
        if (!tr.attack_effective) continue;
        ++effective_runs;
        total_cost += tr.attacker_pulse_count;
        max_cost = std::max(max_cost, tr.attacker_pulse_count);
        if (tr.attacker_pulse_count !=
            tr.delivered_pulses.size() - tr.honest_pulses.size()) {
            ++cost_mismatch;
        }

        const auto expected = tcids_test::expected_pulse_stream(cfg, tr);
        const auto div = sim::first_stream_divergence(tr.delivered_pulses,
                                                      expected, horizon);
        if (div) {
            ++divergent;
            if (tr.verdict.detected && *tr.verdict.detection_tick == *div) {
                ++caught_at_divergence;
            }
        } else if (!tr.verdict.detected) {
            ++consistent_runs;
        }
    }

    CriterionResult r;
    r.name = "trap-abandonment-detection";
    r.passed = divergent > 0 && caught_at_divergence == divergent &&
               cost_mismatch == 0;
    std::ostringstream os;
    os << caught_at_divergence << "/" << divergent
       << " divergent runs detected at the divergence tick; "
       << consistent_runs << " runs stayed consistent through the horizon; "
       << "attacker cost over " << effective_runs
       << " effective runs: mean "
       << (effective_runs
               ? static_cast<double>(total_cost) /
                     static_cast<double>(effective_runs)
               : 0.0)
       << " pulses, max " << max_cost;
    r.detail = os.str();
    r.seconds = timer.seconds();
    return r;
}

}  // namespace

int main() {
    std::vector<CriterionResult> results;
    results.push_back(criterion_encoder_equivalence());
    results.push_back(criterion_honest_completeness());
    results.push_back(criterion_deletion());
    results.push_back(criterion_tampering());
    results.push_back(criterion_gap_probabilities());
    results.push_back(criterion_no_escape_when_invertible());
    results.push_back(criterion_correlation_checker());
    results.push_back(criterion_pairing_map());
    results.push_back(criterion_trap());

    bool all_passed = true;
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        std::printf("%s  C%zu %s: %s (%.2f s)\n", r.passed ? "PASS" : "FAIL",
                    i + 1, r.name.c_str(), r.detail.c_str(), r.seconds);
        all_passed = all_passed && r.passed;
    }
    std::printf("%s\n", all_passed ? "acceptance: all criteria passed"
                                   : "acceptance: FAILURES present");
    return all_passed ? 0 : 1;
}
