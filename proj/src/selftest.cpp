#include "tcids/selftest.hpp"

#include <random>
#include <sstream>

#include "tcids/analysis.hpp"
#include "tcids/encoder.hpp"
#include "tcids/simulation.hpp"
#include "tcids/verifier.hpp"

namespace tcids::cli {

namespace {

EncoderConfig base_config(std::uint32_t levels, bool affine, Seed s0) {
    EncoderConfig cfg;
    cfg.alphabet_size = 4;
    cfg.tick = 1;
    cfg.levels = levels;
    cfg.seed_space = SeedSpace::mod(16);
    cfg.g_family = {GFamilyKind::PrfKeyed, Key128{0x1234, 0x5678}};
    if (affine) {
        cfg.o_family = AffineOffsets{{1, 2, 3, 5}};
    } else {
        cfg.o_family = PrfSeedMap{Key128{0x9abc, 0xdef0}};
    }
    cfg.s0 = s0;
    cfg.t0 = 0;
    return cfg;
}

sim::SourceSpec uniform_source(std::size_t count, double mean_gap) {
    sim::SourceSpec spec;
    spec.symbol_dist.assign(4, 0.25);
    spec.gap.kind = sim::GapSpec::Kind::Geometric;
    spec.gap.mean = mean_gap;
    spec.count = count;
    return spec;
}

// Batch construction against the incremental machine, driven tick by tick.
SelfTestResult equivalence_suite() {
    SelfTestResult r{"encoder-equivalence", false, ""};
    const std::size_t instances = 200;
    std::size_t matched = 0;
    for (std::size_t i = 0; i < instances; ++i) {
        const auto cfg = base_config(i % 2 == 0 ? 4 : 8, i % 3 != 0,
                                     static_cast<Seed>(i % 16));
        const Tick horizon = 400 + static_cast<Tick>(i % 7) * 100;
        auto events =
            sim::generate_source(uniform_source(12, 15.0), cfg, 900 + i);
        std::erase_if(events, [&](const Event& e) { return e.t >= horizon; });
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
    r.passed = matched == instances;
    std::ostringstream os;
    os << matched << "/" << instances << " instances identical";
    r.detail = os.str();
    return r;
}

SelfTestResult honest_completeness_suite() {
    SelfTestResult r{"honest-completeness", false, ""};
    const std::size_t runs = 400;
    std::size_t clean = 0;
    for (std::size_t i = 0; i < runs; ++i) {
        const auto cfg = base_config(i % 2 == 0 ? 2 : 4, i % 2 == 0,
                                     static_cast<Seed>(i % 16));
        const auto tr = sim::run_scenario(cfg, uniform_source(20, 25.0),
                                          sim::NoAttack{}, 1000, 7000 + i);
        if (!tr.verdict.detected) ++clean;
    }
    r.passed = clean == runs;
    std::ostringstream os;
    os << clean << "/" << runs << " honest runs without false alarm";
    r.detail = os.str();
    return r;
}

SelfTestResult deletion_suite() {
    SelfTestResult r{"deletion-detection", false, ""};
    const std::size_t runs = 200;
    std::size_t changed = 0;
    std::size_t consistent_verdicts = 0;
    for (std::size_t i = 0; i < runs; ++i) {
        const auto cfg = base_config(4, i % 2 == 0, static_cast<Seed>(i % 16));
        const auto source = uniform_source(10, 20.0);
        const Tick horizon = 2000;
        const auto tr =
            sim::run_scenario(cfg, source,
                              sim::DeleteAttack{source.count - 1}, horizon,
                              11000 + i);
        if (tr.delivered_pulses != tr.honest_pulses ||
            tr.delivered_events != tr.source_events) {
            ++changed;
        }
        const Codeword expected =
            build_codeword(cfg, tr.delivered_events, horizon);
        const auto divergence = sim::first_stream_divergence(
            tr.delivered_pulses, expected, horizon);
        if (divergence.has_value() == tr.verdict.detected) {
            ++consistent_verdicts;
        }
    }
    r.passed = changed == runs && consistent_verdicts == runs;
    std::ostringstream os;
    os << changed << "/" << runs << " deletions altered the streams, "
       << consistent_verdicts << "/" << runs << " verdicts matched divergence";
    r.detail = os.str();
    return r;
}

SelfTestResult fixed_point_suite() {
    SelfTestResult r{"fixed-point", false, ""};
    const SeedSpace space = SeedSpace::mod(16);

    const auto affine_ok = analysis::check_fixed_point_free(
        AffineOffsets{{1, 2, 3, 5}}, space, 4);
    const auto prf_ok = analysis::check_fixed_point_free(
        PrfSeedMap{Key128{0x9abc, 0xdef0}}, space, 4);
    // Negative control: a zero offset admits the fixed point O_0(s) = s.
    const auto broken = analysis::check_fixed_point_free(
        AffineOffsets{{0, 2, 3, 5}}, space, 4);

    r.passed = affine_ok.fixed_point_free && prf_ok.fixed_point_free &&
               !broken.fixed_point_free && broken.witness.has_value();
    std::ostringstream os;
    os << "affine " << (affine_ok.fixed_point_free ? "clear" : "FAILED")
       << ", prf " << (prf_ok.fixed_point_free ? "clear" : "FAILED")
       << ", broken family " << (!broken.fixed_point_free ? "flagged" : "MISSED");
    r.detail = os.str();
    return r;
}

SelfTestResult gap_dp_suite() {
    SelfTestResult r{"gap-probability-dp", false, ""};
    std::size_t checked = 0;
    std::size_t agreed = 0;
    for (std::uint32_t levels = 2; levels <= 4; ++levels) {
        for (Tick gap = 0; gap <= 8; ++gap) {
            ++checked;
            const auto exact = analysis::gap_agreement_prob_exact(gap, levels);
            const double approx = analysis::gap_agreement_prob(gap, levels);
            if (std::abs(approx - exact.to_double()) <= 1e-12) ++agreed;
        }
    }
    // Two frozen anchor values of the recursion.
    const bool anchors =
        analysis::gap_agreement_prob(0, 2) == 1.0 &&
        analysis::gap_agreement_prob(2, 2) == 0.5;
    r.passed = checked == agreed && anchors;
    std::ostringstream os;
    os << agreed << "/" << checked << " gap values match exact arithmetic";
    r.detail = os.str();
    return r;
}

}  // namespace

std::vector<SelfTestResult> run_selftests() {
    return {
        equivalence_suite(),   honest_completeness_suite(), deletion_suite(),
        fixed_point_suite(),   gap_dp_suite(),
    };
}

}  // namespace tcids::cli
