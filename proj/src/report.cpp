#include "tcids/report.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "tcids/version.hpp"

namespace tcids::cli {

namespace {

constexpr const char* kDefaultKeyHex = "000102030405060708090a0b0c0d0e0f";

template <typename T>
T get_as(const json& value, const std::string& path) {
    try {
        return value.get<T>();
    } catch (const json::exception&) {
        throw std::invalid_argument("config: field " + path +
                                    " has the wrong type");
    }
}

const json& require_object(const json& value, const std::string& path) {
    if (!value.is_object()) {
        throw std::invalid_argument("config: field " + path +
                                    " must be an object");
    }
    return value;
}

void expect_keys(const json& obj, const std::string& path,
                 std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        const bool known =
            std::any_of(allowed.begin(), allowed.end(),
                        [&](const char* k) { return it.key() == k; });
        if (!known) {
            throw std::invalid_argument("config: unknown field " + path +
                                        it.key());
        }
    }
}

// Reads obj[key] when present, otherwise records the path as defaulted.
template <typename T>
T field_or_default(const json& obj, const std::string& prefix, const char* key,
                   const T& fallback, std::vector<std::string>& defaults) {
    if (obj.contains(key)) {
        return get_as<T>(obj.at(key), prefix + key);
    }
    defaults.push_back(prefix + key);
    return fallback;
}

Key128 parse_key(const json& obj, const std::string& prefix,
                 std::vector<std::string>& defaults) {
    if (!obj.contains("key")) {
        defaults.push_back(prefix + "key");
        return *key_from_hex(kDefaultKeyHex);
    }
    const auto hex = get_as<std::string>(obj.at("key"), prefix + "key");
    const auto key = key_from_hex(hex);
    if (!key) {
        throw std::invalid_argument("config: field " + prefix +
                                    "key must be 32 hex characters");
    }
    return *key;
}

SeedSpace parse_seed_space(const json& value, const std::string& path) {
    if (value.is_string()) {
        if (value.get<std::string>() == "2^64") return SeedSpace::full64();
        throw std::invalid_argument("config: field " + path +
                                    " must be an integer >= 2 or \"2^64\"");
    }
    const auto modulus = get_as<std::uint64_t>(value, path);
    if (modulus < 2) {
        throw std::invalid_argument("config: field " + path + " must be >= 2");
    }
    return SeedSpace::mod(modulus);
}

EncoderConfig parse_encoder(const json& obj, std::vector<std::string>& defaults) {
    expect_keys(obj, "encoder.",
                {"alphabet_size", "tick", "levels", "seed_space", "g_family",
                 "o_family", "s0", "t0"});
    EncoderConfig cfg;
    cfg.alphabet_size = field_or_default<std::uint32_t>(
        obj, "encoder.", "alphabet_size", 4, defaults);
    cfg.tick = field_or_default<Tick>(obj, "encoder.", "tick", 1, defaults);
    cfg.levels =
        field_or_default<std::uint32_t>(obj, "encoder.", "levels", 4, defaults);

    if (obj.contains("seed_space")) {
        cfg.seed_space = parse_seed_space(obj.at("seed_space"),
                                          "encoder.seed_space");
    } else {
        defaults.push_back("encoder.seed_space");
        cfg.seed_space = SeedSpace::mod(16);
    }

    if (obj.contains("g_family")) {
        const json& g = require_object(obj.at("g_family"), "encoder.g_family");
        expect_keys(g, "encoder.g_family.", {"kind", "key"});
        const auto kind = field_or_default<std::string>(
            g, "encoder.g_family.", "kind", "prf", defaults);
        if (kind == "prf") {
            cfg.g_family.kind = GFamilyKind::PrfKeyed;
        } else if (kind == "modular_test") {
            cfg.g_family.kind = GFamilyKind::ModularTest;
        } else {
            throw std::invalid_argument(
                "config: encoder.g_family.kind must be \"prf\" or "
                "\"modular_test\"");
        }
        cfg.g_family.key = parse_key(g, "encoder.g_family.", defaults);
    } else {
        defaults.push_back("encoder.g_family");
        cfg.g_family.kind = GFamilyKind::PrfKeyed;
        cfg.g_family.key = *key_from_hex(kDefaultKeyHex);
    }

    if (obj.contains("o_family")) {
        const json& o = require_object(obj.at("o_family"), "encoder.o_family");
        expect_keys(o, "encoder.o_family.", {"kind", "offsets", "key"});
        const auto kind = field_or_default<std::string>(
            o, "encoder.o_family.", "kind", "affine", defaults);
        if (kind == "affine") {
            AffineOffsets affine;
            if (o.contains("offsets")) {
                affine.offsets = get_as<std::vector<std::uint64_t>>(
                    o.at("offsets"), "encoder.o_family.offsets");
            } else {
                defaults.push_back("encoder.o_family.offsets");
                for (std::uint32_t i = 0; i < cfg.alphabet_size; ++i) {
                    affine.offsets.push_back(i + 1);
                }
            }
            cfg.o_family = std::move(affine);
        } else if (kind == "prf") {
            PrfSeedMap prf;
            prf.key = parse_key(o, "encoder.o_family.", defaults);
            cfg.o_family = prf;
        } else {
            throw std::invalid_argument(
                "config: encoder.o_family.kind must be \"affine\" or \"prf\"");
        }
    } else {
        defaults.push_back("encoder.o_family");
        AffineOffsets affine;
        for (std::uint32_t i = 0; i < cfg.alphabet_size; ++i) {
            affine.offsets.push_back(i + 1);
        }
        cfg.o_family = std::move(affine);
    }

    cfg.s0 = field_or_default<Seed>(obj, "encoder.", "s0", 0, defaults);
    cfg.t0 = field_or_default<Tick>(obj, "encoder.", "t0", 0, defaults);
    return cfg;
}

sim::SourceSpec parse_source(const json& obj, std::uint32_t alphabet_size,
                             std::vector<std::string>& defaults) {
    expect_keys(obj, "source.", {"symbol_dist", "gap", "count"});
    sim::SourceSpec spec;
    if (obj.contains("symbol_dist")) {
        spec.symbol_dist = get_as<std::vector<double>>(obj.at("symbol_dist"),
                                                       "source.symbol_dist");
    } else {
        defaults.push_back("source.symbol_dist");
        spec.symbol_dist.assign(alphabet_size, 1.0 / alphabet_size);
    }
    if (obj.contains("gap")) {
        const json& g = require_object(obj.at("gap"), "source.gap");
        expect_keys(g, "source.gap.", {"kind", "mean", "gap"});
        const auto kind = field_or_default<std::string>(g, "source.gap.",
                                                        "kind", "geometric",
                                                        defaults);
        if (kind == "geometric") {
            spec.gap.kind = sim::GapSpec::Kind::Geometric;
            spec.gap.mean = field_or_default<double>(g, "source.gap.", "mean",
                                                     20.0, defaults);
        } else if (kind == "fixed") {
            spec.gap.kind = sim::GapSpec::Kind::Fixed;
            spec.gap.fixed =
                field_or_default<Tick>(g, "source.gap.", "gap", 1, defaults);
        } else {
            throw std::invalid_argument(
                "config: source.gap.kind must be \"geometric\" or \"fixed\"");
        }
    } else {
        defaults.push_back("source.gap");
    }
    spec.count = field_or_default<std::size_t>(obj, "source.", "count", 30,
                                               defaults);
    return spec;
}

sim::AttackSpec parse_attack(const json& obj,
                             std::vector<std::string>& defaults) {
    const auto kind =
        field_or_default<std::string>(obj, "attack.", "kind", "none", defaults);
    if (kind == "none") {
        expect_keys(obj, "attack.", {"kind"});
        return sim::NoAttack{};
    }
    if (kind == "tamper") {
        expect_keys(obj, "attack.", {"kind", "index", "symbol"});
        sim::TamperAttack tamper;
        tamper.index = get_as<std::size_t>(obj.at("index"), "attack.index");
        if (obj.contains("symbol") && obj.at("symbol").is_string()) {
            if (obj.at("symbol").get<std::string>() != "random") {
                throw std::invalid_argument(
                    "config: attack.symbol must be an integer or \"random\"");
            }
        } else if (obj.contains("symbol")) {
            tamper.replacement =
                get_as<Symbol>(obj.at("symbol"), "attack.symbol");
        } else {
            defaults.push_back("attack.symbol");
        }
        return tamper;
    }
    if (kind == "delete") {
        expect_keys(obj, "attack.", {"kind", "index"});
        sim::DeleteAttack del;
        del.index = get_as<std::size_t>(obj.at("index"), "attack.index");
        return del;
    }
    if (kind == "inject") {
        expect_keys(obj, "attack.", {"kind", "time", "symbol", "pulses"});
        sim::InjectAttack inject;
        inject.time = get_as<Tick>(obj.at("time"), "attack.time");
        inject.symbol = get_as<Symbol>(obj.at("symbol"), "attack.symbol");
        const auto pulses = field_or_default<std::string>(
            obj, "attack.", "pulses", "self_consistent", defaults);
        if (pulses == "none") {
            inject.pulses = sim::InjectPulses::None;
        } else if (pulses == "self_consistent") {
            inject.pulses = sim::InjectPulses::SelfConsistent;
        } else {
            throw std::invalid_argument(
                "config: attack.pulses must be \"none\" or \"self_consistent\"");
        }
        return inject;
    }
    if (kind == "adaptive_inject") {
        expect_keys(obj, "attack.", {"kind", "time", "symbol", "persist_ticks"});
        sim::AdaptiveInjectAttack inject;
        inject.time = get_as<Tick>(obj.at("time"), "attack.time");
        inject.symbol = get_as<Symbol>(obj.at("symbol"), "attack.symbol");
        inject.persist_ticks =
            get_as<Tick>(obj.at("persist_ticks"), "attack.persist_ticks");
        return inject;
    }
    throw std::invalid_argument("config: unknown attack.kind \"" + kind + "\"");
}

}  // namespace

ParsedConfig parse_scenario_config(const json& doc) {
    require_object(doc, "(root)");
    expect_keys(doc, "",
                {"schema_version", "encoder", "source", "attack", "horizon",
                 "trials", "rng_seed", "output_path"});
    ParsedConfig parsed;
    auto& defaults = parsed.defaults_applied;

    if (doc.contains("schema_version")) {
        const auto version = get_as<int>(doc.at("schema_version"),
                                         "schema_version");
        if (version != kReportSchemaVersion) {
            throw std::invalid_argument("config: unsupported schema_version");
        }
    } else {
        defaults.push_back("schema_version");
    }

    if (doc.contains("encoder")) {
        parsed.config.encoder =
            parse_encoder(require_object(doc.at("encoder"), "encoder"),
                          defaults);
    } else {
        defaults.push_back("encoder");
        json empty = json::object();
        std::vector<std::string> ignored;
        parsed.config.encoder = parse_encoder(empty, ignored);
    }

    if (doc.contains("source")) {
        parsed.config.source =
            parse_source(require_object(doc.at("source"), "source"),
                         parsed.config.encoder.alphabet_size, defaults);
    } else {
        defaults.push_back("source");
        json empty = json::object();
        std::vector<std::string> ignored;
        parsed.config.source =
            parse_source(empty, parsed.config.encoder.alphabet_size, ignored);
    }

    if (doc.contains("attack")) {
        parsed.config.attack =
            parse_attack(require_object(doc.at("attack"), "attack"), defaults);
    } else {
        defaults.push_back("attack");
        parsed.config.attack = sim::NoAttack{};
    }

    parsed.config.horizon =
        field_or_default<Tick>(doc, "", "horizon", 2000, defaults);
    parsed.config.trials =
        field_or_default<std::size_t>(doc, "", "trials", 1, defaults);
    parsed.config.rng_seed =
        field_or_default<std::uint64_t>(doc, "", "rng_seed", 1, defaults);
    parsed.config.output_path = field_or_default<std::string>(
        doc, "", "output_path", std::string{}, defaults);

    if (parsed.config.trials < 1) {
        throw std::invalid_argument("config: trials must be >= 1");
    }
    try {
        parsed.config.encoder.validate();
        parsed.config.source.validate(parsed.config.encoder.alphabet_size);
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    if (parsed.config.horizon <= parsed.config.encoder.t0) {
        throw std::invalid_argument(
            "config: horizon must lie strictly after encoder.t0");
    }

    std::sort(defaults.begin(), defaults.end());
    return parsed;
}

ParsedConfig load_scenario_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("config: cannot open " + path);
    }
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw std::invalid_argument("config: invalid JSON in " + path + ": " +
                                    e.what());
    }
    return parse_scenario_config(doc);
}

json encoder_to_json(const EncoderConfig& cfg) {
    json out;
    out["alphabet_size"] = cfg.alphabet_size;
    out["tick"] = cfg.tick;
    out["levels"] = cfg.levels;
    if (cfg.seed_space.is_full64()) {
        out["seed_space"] = "2^64";
    } else {
        out["seed_space"] = cfg.seed_space.modulus_or_zero();
    }
    out["g_family"] = {
        {"kind", cfg.g_family.kind == GFamilyKind::PrfKeyed ? "prf"
                                                            : "modular_test"},
        {"key", to_hex(cfg.g_family.key)},
    };
    if (const auto* affine = std::get_if<AffineOffsets>(&cfg.o_family)) {
        out["o_family"] = {{"kind", "affine"}, {"offsets", affine->offsets}};
    } else {
        out["o_family"] = {
            {"kind", "prf"},
            {"key", to_hex(std::get<PrfSeedMap>(cfg.o_family).key)},
        };
    }
    out["s0"] = cfg.s0;
    out["t0"] = cfg.t0;
    return out;
}

json source_to_json(const sim::SourceSpec& spec) {
    json gap;
    if (spec.gap.kind == sim::GapSpec::Kind::Geometric) {
        gap = {{"kind", "geometric"}, {"mean", spec.gap.mean}};
    } else {
        gap = {{"kind", "fixed"}, {"gap", spec.gap.fixed}};
    }
    return {{"symbol_dist", spec.symbol_dist},
            {"gap", gap},
            {"count", spec.count}};
}

json attack_to_json(const sim::AttackSpec& attack) {
    if (std::holds_alternative<sim::NoAttack>(attack)) {
        return {{"kind", "none"}};
    }
    if (const auto* tamper = std::get_if<sim::TamperAttack>(&attack)) {
        json out = {{"kind", "tamper"}, {"index", tamper->index}};
        if (tamper->replacement) {
            out["symbol"] = *tamper->replacement;
        } else {
            out["symbol"] = "random";
        }
        return out;
    }
    if (const auto* del = std::get_if<sim::DeleteAttack>(&attack)) {
        return {{"kind", "delete"}, {"index", del->index}};
    }
    if (const auto* inject = std::get_if<sim::InjectAttack>(&attack)) {
        return {{"kind", "inject"},
                {"time", inject->time},
                {"symbol", inject->symbol},
                {"pulses", inject->pulses == sim::InjectPulses::None
                               ? "none"
                               : "self_consistent"}};
    }
    const auto& adaptive = std::get<sim::AdaptiveInjectAttack>(attack);
    return {{"kind", "adaptive_inject"},
            {"time", adaptive.time},
            {"symbol", adaptive.symbol},
            {"persist_ticks", adaptive.persist_ticks}};
}

json config_to_json(const ScenarioConfig& cfg) {
    // output_path is delivery metadata, not a run parameter; leaving it out
    // keeps report bodies identical wherever the report is written.
    return {{"schema_version", kReportSchemaVersion},
            {"encoder", encoder_to_json(cfg.encoder)},
            {"source", source_to_json(cfg.source)},
            {"attack", attack_to_json(cfg.attack)},
            {"horizon", cfg.horizon},
            {"trials", cfg.trials},
            {"rng_seed", cfg.rng_seed}};
}

namespace {

json events_to_json(const std::vector<Event>& events) {
    json out = json::array();
    for (const Event& ev : events) {
        out.push_back({{"t", ev.t}, {"x", ev.x}});
    }
    return out;
}

const char* outcome_name(sim::RunOutcome outcome) {
    switch (outcome) {
        case sim::RunOutcome::Detected: return "detected";
        case sim::RunOutcome::Clean: return "clean";
        case sim::RunOutcome::Escaped: return "escaped";
        case sim::RunOutcome::Indeterminate: return "indeterminate";
    }
    return "unknown";
}

}  // namespace

json trace_to_json(const sim::Trace& trace) {
    json verdict;
    verdict["detected"] = trace.verdict.detected;
    if (trace.verdict.detection_tick) {
        verdict["detection_tick"] = *trace.verdict.detection_tick;
        verdict["kind"] = *trace.verdict.kind == MismatchKind::MissingPulse
                              ? "missing_pulse"
                              : "unexpected_pulse";
    }
    json out;
    out["source_events"] = events_to_json(trace.source_events);
    out["delivered_events"] = events_to_json(trace.delivered_events);
    out["honest_pulses"] = trace.honest_pulses;
    out["delivered_pulses"] = trace.delivered_pulses;
    out["verdict"] = verdict;
    if (trace.attack_tick) out["attack_tick"] = *trace.attack_tick;
    out["attack_effective"] = trace.attack_effective;
    out["state_converged"] = trace.state_converged;
    out["seed_collision_at_attack"] = trace.seed_collision_at_attack;
    if (trace.first_reconverge_boundary) {
        out["first_reconverge_boundary"] = *trace.first_reconverge_boundary;
    }
    out["attacker_pulse_count"] = trace.attacker_pulse_count;
    out["horizon"] = trace.horizon;
    out["outcome"] = outcome_name(trace.outcome());
    return out;
}

json estimate_to_json(const analysis::DetectionEstimate& est) {
    return {{"trials", est.trials},
            {"detected", est.detected},
            {"escaped", est.escaped},
            {"indeterminate", est.indeterminate},
            {"clean", est.clean},
            {"boundary_trials", est.boundary_trials},
            {"undetected_by_level", est.undetected_by_level},
            {"reconverged_at_boundary", est.reconverged_at_boundary},
            {"seed_collisions_at_attack", est.seed_collisions_at_attack},
            {"point_estimate", est.point_estimate},
            {"std_error", est.std_error}};
}

json build_run_report(const ParsedConfig& parsed,
                      const analysis::DetectionEstimate& estimate,
                      const sim::Trace* single_trace, double wall_time_ms) {
    json report;
    report["schema_version"] = kReportSchemaVersion;
    report["tool_version"] = std::string(kVersion);
    report["config"] = config_to_json(parsed.config);
    report["defaults_applied"] = parsed.defaults_applied;
    report["results"] = {{"aggregate", estimate_to_json(estimate)}};
    if (single_trace) {
        report["results"]["trace"] = trace_to_json(*single_trace);
    }

    // Analytic cross-check where one exists: a tampered stream and a fixed
    // message gap make the first-boundary survival probability computable.
    if (std::holds_alternative<sim::TamperAttack>(parsed.config.attack) &&
        parsed.config.source.gap.kind == sim::GapSpec::Kind::Fixed) {
        const Tick gap = parsed.config.source.gap.fixed;
        const double prob =
            analysis::gap_agreement_prob(gap, parsed.config.encoder.levels);
        report["analytic"] = {
            {"gap_agreement",
             {{"gap", gap},
              {"levels", parsed.config.encoder.levels},
              {"prob", prob},
              {"meaning", "predicted undetected-by-first-boundary frequency"}}}};
    }
    report["wall_time_ms"] = wall_time_ms;
    return report;
}

void write_report(const json& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write report to " + path);
    }
    out << report.dump(2) << "\n";
}

}  // namespace tcids::cli
