#pragma once

/**
 * @file analysis.hpp
 * @brief Property checkers and detection-probability analysis.
 *
 * Three kinds of tooling live here:
 *  - machine checks of the hypotheses the detection guarantees rest on
 *    (fixed-point freeness of the seed updates, absence of shift-matched
 *    interval streams across seeds);
 *  - analytic detection probabilities: an exact dynamic program for the
 *    probability that two independent interval streams agree across a
 *    message gap, and an evaluator for the level-by-level survival /
 *    permanent-escape tree;
 *  - a Monte Carlo estimator that runs full scenarios and tallies
 *    detection per post-attack message boundary, so the analytic values
 *    can be confronted with the simulator.
 *
 * The shift-correlation check is a finite refutation: it scans interval
 * indices 1..n_max against shifts 0..shift_max. A clean report is
 * evidence, not proof; the modular test family provides guaranteed
 * violations so the checker's power is itself testable.
 */

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tcids/encoder.hpp"
#include "tcids/simulation.hpp"

namespace tcids::analysis {

using tcids::EncoderConfig;
using tcids::OFamily;
using tcids::Seed;
using tcids::SeedSpace;
using tcids::Symbol;
using tcids::Tick;

// ---------------------------------------------------------------------------
// Exact rational arithmetic (small denominators only; used so the gap DP
// can be compared bit-for-bit against exhaustive enumeration).
// ---------------------------------------------------------------------------

struct Rational {
    using Int = __int128;

    Int num = 0;
    Int den = 1;

    Rational() = default;
    Rational(long long n) : num(n), den(1) {}  // NOLINT(google-explicit-constructor)
    static Rational ratio(long long n, long long d);

    Rational operator+(const Rational& o) const;
    Rational operator*(const Rational& o) const;
    friend bool operator==(const Rational&, const Rational&) = default;

    double to_double() const;

private:
    static Rational normalized(Int n, Int d);
};

// ---------------------------------------------------------------------------
// Hypothesis checkers
// ---------------------------------------------------------------------------

struct FixedPointReport {
    bool fixed_point_free = false;
    std::optional<std::pair<Seed, Symbol>> witness;  ///< present on failure
    bool exhaustive = false;
    std::uint64_t seeds_scanned = 0;
};

/// Scans for a seed s with O_x(s) = s. Exhaustive when the seed space has
/// at most `max_exhaustive` seeds, otherwise a declared random sample of
/// `samples` seeds. Accepts a raw family so deliberately broken ones can
/// be scanned.
FixedPointReport check_fixed_point_free(const OFamily& family,
                                        const SeedSpace& space,
                                        std::uint32_t alphabet_size,
                                        std::uint64_t max_exhaustive = 1u << 20,
                                        std::uint64_t samples = 1u << 16,
                                        std::uint64_t rng_seed = 1);
FixedPointReport check_fixed_point_free(const EncoderConfig& cfg);

struct CorrelationViolation {
    Seed s_a = 0;
    Seed s_b = 0;
    std::uint64_t shift = 0;  ///< g(s_a, n) = g(s_b, n + shift) for n in 1..n_max
};

struct CorrelationReport {
    std::string family_id;
    std::size_t pairs_tested = 0;
    std::uint64_t n_max = 0;
    std::uint64_t shift_max = 0;
    std::vector<CorrelationViolation> violations;
};

/// For each distinct seed pair, scans both orientations for a shift that
/// makes the interval streams coincide on indices 1..n_max.
CorrelationReport scan_shift_correlation(
    const EncoderConfig& cfg, std::span<const std::pair<Seed, Seed>> seed_pairs,
    std::uint64_t n_max, std::uint64_t shift_max);

// ---------------------------------------------------------------------------
// Analytic detection probabilities
// ---------------------------------------------------------------------------

/// Probability that two independent interval streams, both restarted at
/// the same origin with uniform intervals on {1..levels}, emit identical
/// pulses strictly inside a gap of `gap` ticks (unit tick). Recursion:
///   A(0) = 1
///   A(g) = Pr[both next intervals land at or past g]
///        + sum_j Pr[both equal j, j < g] * A(g - j)
double gap_agreement_prob(Tick gap, std::uint32_t levels);

/// Same value in exact rationals. Throws std::domain_error when the
/// denominators would overflow ((gap+1) * log2(levels) must stay <= 60).
Rational gap_agreement_prob_exact(Tick gap, std::uint32_t levels);

/// Survival tree: at level i (1-based) an undetected attacker either
/// escapes permanently with probability escape_probs[i-1], stays merely
/// undetected with continue_probs[i-1], or is caught with the remainder.
struct TreeSpec {
    std::vector<double> continue_probs;
    std::vector<double> escape_probs;
};

struct TreeResult {
    /// undetected_by_level[i] = product of continue_probs[0..i].
    std::vector<double> undetected_by_level;
    /// Total probability mass ending in a permanent escape.
    double permanent_escape = 0.0;
};

TreeResult tree_undetected_prob(const TreeSpec& spec);

// ---------------------------------------------------------------------------
// Monte Carlo estimation
// ---------------------------------------------------------------------------

struct DetectionEstimate {
    std::size_t trials = 0;
    std::size_t detected = 0;
    std::size_t escaped = 0;
    std::size_t indeterminate = 0;
    std::size_t clean = 0;
    /// boundary i (0-based) = (i+1)-th source event strictly after the
    /// attack tick. Counts are monotone non-increasing across levels.
    std::vector<std::size_t> boundary_trials;
    std::vector<std::size_t> undetected_by_level;
    /// Seed-chain reconvergences first seen at boundary i.
    std::vector<std::size_t> reconverged_at_boundary;
    /// Tamper runs whose honest and forged seed updates collided.
    std::size_t seed_collisions_at_attack = 0;
    double point_estimate = 0.0;  ///< detection frequency
    double std_error = 0.0;

    double undetected_frequency(std::size_t level) const {
        if (level >= boundary_trials.size() || boundary_trials[level] == 0) {
            return 0.0;
        }
        return static_cast<double>(undetected_by_level[level]) /
               static_cast<double>(boundary_trials[level]);
    }
};

/// Runs `trials` independent scenarios and tallies detection per
/// post-attack message boundary. Every trial draws fresh PRF family keys
/// from the trial stream, so the estimate targets the family-averaged
/// probability (the quantity the analytic DP computes) rather than one
/// keyed instance. Deterministic given rng_seed.
DetectionEstimate monte_carlo_detection(const EncoderConfig& cfg,
                                        const sim::SourceSpec& source,
                                        const sim::AttackSpec& attack,
                                        std::size_t trials, Tick horizon,
                                        std::uint64_t rng_seed,
                                        std::size_t levels = 8);

// ---------------------------------------------------------------------------
// Reference pairing map between (time, index) pairs and single reals
// ---------------------------------------------------------------------------

struct TimeIndex {
    long double t = 0.0L;
    std::uint64_t n = 0;
};

/// y = n + 1 / (1 + e^t) for t >= 0; the fractional part lives in
/// (0, 1/2]. Extended precision throughout: for t near 20 the fractional
/// part is ~2e-9 and a 53-bit mantissa cannot carry it next to n.
long double encode_time_index(long double t, std::uint64_t n);

/// Inverse of encode_time_index. Rejects inputs whose fractional part
/// falls outside (0, 1/2].
TimeIndex decode_time_index(long double y);

}  // namespace tcids::analysis
