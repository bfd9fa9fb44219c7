#include "tcids/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <stdexcept>

namespace tcids::analysis {

namespace {

using Int = Rational::Int;

Int int_abs(Int v) { return v < 0 ? -v : v; }

Int int_gcd(Int a, Int b) {
    a = int_abs(a);
    b = int_abs(b);
    while (b != 0) {
        const Int t = a % b;
        a = b;
        b = t;
    }
    return a;
}

}  // namespace

Rational Rational::normalized(Int n, Int d) {
    if (d == 0) throw std::invalid_argument("rational: zero denominator");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    const Int g = int_gcd(n, d);
    Rational r;
    if (g != 0) {
        r.num = n / g;
        r.den = d / g;
    }
    return r;
}

Rational Rational::ratio(long long n, long long d) { return normalized(n, d); }

Rational Rational::operator+(const Rational& o) const {
    const Int g = int_gcd(den, o.den);
    const Int scaled = o.den / g;
    return normalized(num * scaled + o.num * (den / g), den * scaled);
}

Rational Rational::operator*(const Rational& o) const {
    const Int g1 = int_gcd(int_abs(num), o.den);
    const Int g2 = int_gcd(int_abs(o.num), den);
    Rational r;
    r.num = (num / g1) * (o.num / g2);
    r.den = (den / g2) * (o.den / g1);
    return r;
}

double Rational::to_double() const {
    return static_cast<double>(static_cast<long double>(num) /
                               static_cast<long double>(den));
}

// ---------------------------------------------------------------------------
// Hypothesis checkers
// ---------------------------------------------------------------------------

FixedPointReport check_fixed_point_free(const OFamily& family,
                                        const SeedSpace& space,
                                        std::uint32_t alphabet_size,
                                        std::uint64_t max_exhaustive,
                                        std::uint64_t samples,
                                        std::uint64_t rng_seed) {
    FixedPointReport rep;
    rep.exhaustive =
        !space.is_full64() && space.modulus_or_zero() <= max_exhaustive;

    const auto scan_seed = [&](Seed s) {
        for (Symbol x = 0; x < alphabet_size; ++x) {
            if (apply_seed_update(family, space, s, x) == s) {
                rep.witness = {s, x};
                return false;
            }
        }
        return true;
    };

    if (rep.exhaustive) {
        const std::uint64_t modulus = space.modulus_or_zero();
        for (std::uint64_t s = 0; s < modulus; ++s) {
            ++rep.seeds_scanned;
            if (!scan_seed(s)) return rep;
        }
    } else {
        std::mt19937_64 rng(rng_seed);
        for (std::uint64_t i = 0; i < samples; ++i) {
            ++rep.seeds_scanned;
            if (!scan_seed(space.reduce(rng()))) return rep;
        }
    }
    rep.fixed_point_free = true;
    return rep;
}

FixedPointReport check_fixed_point_free(const EncoderConfig& cfg) {
    return check_fixed_point_free(cfg.o_family, cfg.seed_space,
                                  cfg.alphabet_size);
}

CorrelationReport scan_shift_correlation(
    const EncoderConfig& cfg, std::span<const std::pair<Seed, Seed>> seed_pairs,
    std::uint64_t n_max, std::uint64_t shift_max) {
    if (n_max < 1 || shift_max < 1) {
        throw std::invalid_argument(
            "correlation: n_max and shift_max must be >= 1");
    }
    CorrelationReport rep;
    rep.family_id =
        (cfg.g_family.kind == GFamilyKind::PrfKeyed ? "prf" : "modular-test");
    rep.family_id += "(levels=" + std::to_string(cfg.levels) + ")";
    rep.n_max = n_max;
    rep.shift_max = shift_max;

    const auto scan_direction = [&](Seed a, Seed b, std::uint64_t first_shift) {
        for (std::uint64_t shift = first_shift; shift <= shift_max; ++shift) {
            bool all_match = true;
            for (std::uint64_t n = 1; n <= n_max && all_match; ++n) {
                all_match = g_interval(cfg, a, n) == g_interval(cfg, b, n + shift);
            }
            if (all_match) rep.violations.push_back({a, b, shift});
        }
    };

    for (const auto& [sa, sb] : seed_pairs) {
        if (sa == sb) continue;  // the property ranges over distinct seeds
        ++rep.pairs_tested;
        scan_direction(sa, sb, 0);
        scan_direction(sb, sa, 1);  // shift 0 is symmetric, already covered
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Gap agreement DP
// ---------------------------------------------------------------------------

namespace {

void check_gap_args(Tick gap, std::uint32_t levels) {
    if (gap < 0) throw std::invalid_argument("gap must be >= 0");
    if (levels < 2) throw std::invalid_argument("levels must be >= 2");
}

}  // namespace

double gap_agreement_prob(Tick gap, std::uint32_t levels) {
    check_gap_args(gap, levels);
    const double k = levels;
    std::vector<double> memo(static_cast<std::size_t>(gap) + 1, 0.0);
    memo[0] = 1.0;
    for (Tick g = 1; g <= gap; ++g) {
        const Tick at_or_past = std::max<Tick>(0, Tick{levels} - g + 1);
        double acc = (at_or_past / k) * (at_or_past / k);
        const Tick j_max = std::min<Tick>(levels, g - 1);
        for (Tick j = 1; j <= j_max; ++j) {
            acc += memo[static_cast<std::size_t>(g - j)] / (k * k);
        }
        memo[static_cast<std::size_t>(g)] = acc;
    }
    return memo[static_cast<std::size_t>(gap)];
}

Rational gap_agreement_prob_exact(Tick gap, std::uint32_t levels) {
    check_gap_args(gap, levels);
    // Denominators reach levels^(2(gap+1)); keep them inside __int128.
    const auto bits_per_factor =
        static_cast<std::uint64_t>(std::bit_width(std::uint64_t{levels} - 1));
    if ((static_cast<std::uint64_t>(gap) + 1) * bits_per_factor > 60) {
        throw std::domain_error(
            "gap_agreement_prob_exact: gap too large for exact arithmetic");
    }
    const auto k = static_cast<long long>(levels);
    const Rational inv_k_sq = Rational::ratio(1, k * k);
    std::vector<Rational> memo(static_cast<std::size_t>(gap) + 1);
    memo[0] = Rational{1};
    for (Tick g = 1; g <= gap; ++g) {
        const long long at_or_past = std::max<long long>(0, k - g + 1);
        const Rational tail = Rational::ratio(at_or_past, k);
        Rational acc = tail * tail;
        const Tick j_max = std::min<Tick>(levels, g - 1);
        for (Tick j = 1; j <= j_max; ++j) {
            acc = acc + inv_k_sq * memo[static_cast<std::size_t>(g - j)];
        }
        memo[static_cast<std::size_t>(g)] = acc;
    }
    return memo[static_cast<std::size_t>(gap)];
}

// ---------------------------------------------------------------------------
// Survival tree
// ---------------------------------------------------------------------------

TreeResult tree_undetected_prob(const TreeSpec& spec) {
    if (spec.continue_probs.size() != spec.escape_probs.size()) {
        throw std::invalid_argument(
            "tree: continue_probs and escape_probs must have equal length");
    }
    for (std::size_t i = 0; i < spec.continue_probs.size(); ++i) {
        const double p = spec.continue_probs[i];
        const double q = spec.escape_probs[i];
        if (!(p >= 0.0 && p <= 1.0) || !(q >= 0.0 && q <= 1.0)) {
            throw std::invalid_argument("tree: probabilities must lie in [0,1]");
        }
        if (p + q > 1.0) {
            throw std::invalid_argument(
                "tree: continue + escape mass exceeds 1 at a level");
        }
    }

    TreeResult out;
    out.undetected_by_level.reserve(spec.continue_probs.size());
    double alive = 1.0;
    double escape = 0.0;
    for (std::size_t i = 0; i < spec.continue_probs.size(); ++i) {
        escape += alive * spec.escape_probs[i];
        alive *= spec.continue_probs[i];
        out.undetected_by_level.push_back(alive);
    }
    out.permanent_escape = escape;
    return out;
}

// ---------------------------------------------------------------------------
// Monte Carlo
// ---------------------------------------------------------------------------

DetectionEstimate monte_carlo_detection(const EncoderConfig& cfg,
                                        const sim::SourceSpec& source,
                                        const sim::AttackSpec& attack,
                                        std::size_t trials, Tick horizon,
                                        std::uint64_t rng_seed,
                                        std::size_t levels) {
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    DetectionEstimate est;
    est.trials = trials;
    est.boundary_trials.assign(levels, 0);
    est.undetected_by_level.assign(levels, 0);
    est.reconverged_at_boundary.assign(levels, 0);

    for (std::size_t i = 0; i < trials; ++i) {
        const std::uint64_t trial_seed = derive_stream_seed(rng_seed, i);
        // Fresh family keys per trial: the estimate targets the
        // family-averaged probability the analytic model computes, not
        // one keyed instance (a single key has only finitely many
        // interval streams to average over).
        EncoderConfig trial_cfg = cfg;
        trial_cfg.g_family.key = {derive_stream_seed(trial_seed, 0x67),
                                  derive_stream_seed(trial_seed, 0x68)};
        if (auto* prf = std::get_if<PrfSeedMap>(&trial_cfg.o_family)) {
            prf->key = {derive_stream_seed(trial_seed, 0x6f),
                        derive_stream_seed(trial_seed, 0x70)};
        }
        const sim::Trace tr =
            sim::run_scenario(trial_cfg, source, attack, horizon, trial_seed);
        switch (tr.outcome()) {
            case sim::RunOutcome::Detected: ++est.detected; break;
            case sim::RunOutcome::Escaped: ++est.escaped; break;
            case sim::RunOutcome::Indeterminate: ++est.indeterminate; break;
            case sim::RunOutcome::Clean: ++est.clean; break;
        }
        if (tr.attack_tick && tr.seed_collision_at_attack) {
            ++est.seed_collisions_at_attack;
        }
        if (tr.first_reconverge_boundary &&
            *tr.first_reconverge_boundary <= levels) {
            ++est.reconverged_at_boundary[*tr.first_reconverge_boundary - 1];
        }
        if (tr.attack_tick) {
            std::size_t level = 0;
            for (const Event& ev : tr.source_events) {
                if (ev.t <= *tr.attack_tick) continue;
                if (level >= levels) break;
                ++est.boundary_trials[level];
                if (!tr.verdict.detected || *tr.verdict.detection_tick >= ev.t) {
                    ++est.undetected_by_level[level];
                }
                ++level;
            }
        }
    }

    const double p =
        static_cast<double>(est.detected) / static_cast<double>(trials);
    est.point_estimate = p;
    est.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
    return est;
}

// ---------------------------------------------------------------------------
// Pairing map
// ---------------------------------------------------------------------------

long double encode_time_index(long double t, std::uint64_t n) {
    if (!(t >= 0.0L) || !std::isfinite(t)) {
        throw std::invalid_argument("encode: t must be finite and >= 0");
    }
    return static_cast<long double>(n) + 1.0L / (1.0L + std::exp(t));
}

TimeIndex decode_time_index(long double y) {
    if (!std::isfinite(y) || !(y > 0.0L)) {
        throw std::invalid_argument("decode: input must be finite and positive");
    }
    const long double whole = std::floor(y);
    const long double frac = y - whole;
    if (!(frac > 0.0L) || frac > 0.5L) {
        throw std::invalid_argument(
            "decode: fractional part must lie in (0, 1/2]");
    }
    TimeIndex out;
    out.n = static_cast<std::uint64_t>(whole);
    out.t = std::log(1.0L / frac - 1.0L);
    return out;
}

}  // namespace tcids::analysis
