// Batch front-end: run scenario configs, expose the analytic tools, and
// run the embedded self-check suites.
//
// Exit codes: 0 success, 2 config/parameter error, 3 selftest failure.

#include <algorithm>
#include <chrono>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tcids/analysis.hpp"
#include "tcids/report.hpp"
#include "tcids/selftest.hpp"
#include "tcids/simulation.hpp"
#include "tcids/version.hpp"

namespace {

using tcids::Seed;
using tcids::Tick;
using tcids::cli::json;

void mark_user_provided(tcids::cli::ParsedConfig& parsed,
                        const std::string& path) {
    auto& d = parsed.defaults_applied;
    d.erase(std::remove(d.begin(), d.end(), path), d.end());
}

json analysis_report(const char* kind, json body) {
    return {{"schema_version", tcids::kReportSchemaVersion},
            {"tool_version", std::string(tcids::kVersion)},
            {"analysis", std::move(body)},
            {"kind", kind}};
}

void emit(const json& doc, const std::string& out_path, bool json_stdout,
          const std::string& human_summary) {
    if (!out_path.empty()) {
        tcids::cli::write_report(doc, out_path);
    }
    if (json_stdout) {
        std::cout << doc.dump(2) << "\n";
    } else {
        std::cout << human_summary;
        if (!out_path.empty()) {
            std::cout << "report written to " << out_path << "\n";
        }
    }
}

tcids::EncoderConfig encoder_from_optional_config(const std::string& path) {
    if (path.empty()) {
        // Documented defaults, identical to an empty config file.
        return tcids::cli::parse_scenario_config(json::object()).config.encoder;
    }
    return tcids::cli::load_scenario_config(path).config.encoder;
}

int do_run(const std::string& config_path,
           const std::optional<std::uint64_t>& seed_override,
           const std::optional<std::size_t>& trials_override,
           const std::string& out_override, bool json_stdout) {
    auto parsed = tcids::cli::load_scenario_config(config_path);
    if (seed_override) {
        parsed.config.rng_seed = *seed_override;
        mark_user_provided(parsed, "rng_seed");
    }
    if (trials_override) {
        if (*trials_override < 1) {
            throw std::invalid_argument("--trials must be >= 1");
        }
        parsed.config.trials = *trials_override;
        mark_user_provided(parsed, "trials");
    }
    if (!out_override.empty()) {
        parsed.config.output_path = out_override;
        mark_user_provided(parsed, "output_path");
    }
    const auto& cfg = parsed.config;

    const auto start = std::chrono::steady_clock::now();
    const auto estimate = tcids::analysis::monte_carlo_detection(
        cfg.encoder, cfg.source, cfg.attack, cfg.trials, cfg.horizon,
        cfg.rng_seed);
    std::optional<tcids::sim::Trace> trace;
    if (cfg.trials == 1) {
        // Matches trial 0 of the aggregate exactly.
        trace = tcids::sim::run_scenario(
            cfg.encoder, cfg.source, cfg.attack, cfg.horizon,
            tcids::derive_stream_seed(cfg.rng_seed, 0));
    }
    const double wall_ms =
        std::chrono::duration<double, std::milli>(
            std::chrono::steady_clock::now() - start)
            .count();

    const json report = tcids::cli::build_run_report(
        parsed, estimate, trace ? &*trace : nullptr, wall_ms);

    std::ostringstream summary;
    summary << "trials " << estimate.trials << ": detected "
            << estimate.detected << ", escaped " << estimate.escaped
            << ", indeterminate " << estimate.indeterminate << ", clean "
            << estimate.clean << "\n";
    if (!estimate.boundary_trials.empty() && estimate.boundary_trials[0] > 0) {
        summary << "undetected by first post-attack boundary: "
                << estimate.undetected_by_level[0] << "/"
                << estimate.boundary_trials[0] << "\n";
    }
    if (report.contains("analytic")) {
        summary << "analytic gap agreement prob: "
                << report["analytic"]["gap_agreement"]["prob"].get<double>()
                << "\n";
    }
    emit(report, cfg.output_path, json_stdout, summary.str());
    return 0;
}

int do_selftest() {
    const auto results = tcids::cli::run_selftests();
    bool all_passed = true;
    for (const auto& r : results) {
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": "
                  << r.detail << "\n";
        all_passed = all_passed && r.passed;
    }
    std::cout << (all_passed ? "selftest passed" : "selftest FAILED") << "\n";
    return all_passed ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"time-code intrusion detection simulator"};
    app.require_subcommand(1);

    // --- run ---
    std::string run_config;
    std::optional<std::uint64_t> run_seed;
    std::optional<std::size_t> run_trials;
    std::string run_out;
    bool run_json = false;
    auto* run_cmd = app.add_subcommand("run", "execute a scenario config");
    run_cmd->add_option("config", run_config, "JSON scenario config file")
        ->required();
    run_cmd->add_option("--seed", run_seed, "override rng_seed");
    run_cmd->add_option("--trials", run_trials, "override trial count");
    run_cmd->add_option("--out", run_out, "report output path");
    run_cmd->add_flag("--json", run_json, "print the report JSON to stdout");

    // --- analyze ---
    auto* analyze = app.add_subcommand("analyze", "analytic tools");
    analyze->require_subcommand(1);

    Tick gap_value = 0;
    std::uint32_t gap_levels = 2;
    std::string gap_out;
    bool gap_json = false;
    auto* gap_cmd = analyze->add_subcommand(
        "gap-prob", "pulse-stream agreement probability across a message gap");
    gap_cmd->add_option("--gap", gap_value, "gap length in ticks")->required();
    gap_cmd->add_option("--levels", gap_levels, "interval level count K")
        ->required();
    gap_cmd->add_option("--out", gap_out, "report output path");
    gap_cmd->add_flag("--json", gap_json, "print JSON to stdout");

    std::vector<double> tree_p;
    std::vector<double> tree_q;
    std::string tree_out;
    bool tree_json = false;
    auto* tree_cmd = analyze->add_subcommand(
        "tree", "survival/escape probabilities over message boundaries");
    tree_cmd->add_option("--p", tree_p, "per-level continue probabilities")
        ->required();
    tree_cmd->add_option("--q", tree_q, "per-level escape probabilities")
        ->required();
    tree_cmd->add_option("--out", tree_out, "report output path");
    tree_cmd->add_flag("--json", tree_json, "print JSON to stdout");

    std::string corr_config;
    std::size_t corr_pairs = 100;
    std::uint64_t corr_n_max = 64;
    std::uint64_t corr_shift_max = 64;
    std::uint64_t corr_seed = 1;
    std::string corr_out;
    bool corr_json = false;
    auto* corr_cmd = analyze->add_subcommand(
        "correlation", "scan seed pairs for shift-matched interval streams");
    corr_cmd->add_option("--config", corr_config,
                         "scenario config supplying the encoder (defaults "
                         "apply when omitted)");
    corr_cmd->add_option("--pairs", corr_pairs, "random seed pairs to test");
    corr_cmd->add_option("--n-max", corr_n_max, "interval indices checked");
    corr_cmd->add_option("--shift-max", corr_shift_max, "shifts checked");
    corr_cmd->add_option("--seed", corr_seed, "pair-sampling seed");
    corr_cmd->add_option("--out", corr_out, "report output path");
    corr_cmd->add_flag("--json", corr_json, "print JSON to stdout");

    std::string fp_config;
    std::string fp_out;
    bool fp_json = false;
    auto* fp_cmd = analyze->add_subcommand(
        "fixed-point", "scan the seed-update family for fixed points");
    fp_cmd->add_option("--config", fp_config,
                       "scenario config supplying the encoder (defaults apply "
                       "when omitted)");
    fp_cmd->add_option("--out", fp_out, "report output path");
    fp_cmd->add_flag("--json", fp_json, "print JSON to stdout");

    // --- selftest ---
    auto* selftest_cmd =
        app.add_subcommand("selftest", "run the embedded property suites");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*run_cmd) {
            return do_run(run_config, run_seed, run_trials, run_out, run_json);
        }
        if (*gap_cmd) {
            const double prob =
                tcids::analysis::gap_agreement_prob(gap_value, gap_levels);
            const json doc = analysis_report(
                "gap-prob",
                {{"gap", gap_value}, {"levels", gap_levels}, {"prob", prob}});
            std::ostringstream os;
            os << "gap=" << gap_value << " levels=" << gap_levels
               << " agreement_prob=" << prob << "\n";
            emit(doc, gap_out, gap_json, os.str());
            return 0;
        }
        if (*tree_cmd) {
            const auto result = tcids::analysis::tree_undetected_prob(
                {tree_p, tree_q});
            const json doc = analysis_report(
                "tree", {{"continue_probs", tree_p},
                         {"escape_probs", tree_q},
                         {"undetected_by_level", result.undetected_by_level},
                         {"permanent_escape", result.permanent_escape}});
            std::ostringstream os;
            os << "permanent escape probability: " << result.permanent_escape
               << "\nundetected by level:";
            for (double v : result.undetected_by_level) os << " " << v;
            os << "\n";
            emit(doc, tree_out, tree_json, os.str());
            return 0;
        }
        if (*corr_cmd) {
            const auto encoder = encoder_from_optional_config(corr_config);
            std::mt19937_64 rng(corr_seed);
            std::vector<std::pair<Seed, Seed>> pairs;
            pairs.reserve(corr_pairs);
            while (pairs.size() < corr_pairs) {
                const Seed a = encoder.seed_space.reduce(rng());
                const Seed b = encoder.seed_space.reduce(rng());
                if (a != b) pairs.emplace_back(a, b);
            }
            const auto report = tcids::analysis::scan_shift_correlation(
                encoder, pairs, corr_n_max, corr_shift_max);
            json violations = json::array();
            for (const auto& v : report.violations) {
                violations.push_back(
                    {{"s_a", v.s_a}, {"s_b", v.s_b}, {"shift", v.shift}});
            }
            const json doc = analysis_report(
                "correlation", {{"family", report.family_id},
                                {"pairs_tested", report.pairs_tested},
                                {"n_max", report.n_max},
                                {"shift_max", report.shift_max},
                                {"violations", violations}});
            std::ostringstream os;
            os << report.family_id << ": " << report.violations.size()
               << " shift violations across " << report.pairs_tested
               << " pairs (n_max=" << report.n_max
               << ", shift_max=" << report.shift_max << ")\n";
            emit(doc, corr_out, corr_json, os.str());
            return 0;
        }
        if (*fp_cmd) {
            const auto encoder = encoder_from_optional_config(fp_config);
            const auto report = tcids::analysis::check_fixed_point_free(encoder);
            json body = {{"fixed_point_free", report.fixed_point_free},
                         {"exhaustive", report.exhaustive},
                         {"seeds_scanned", report.seeds_scanned}};
            if (report.witness) {
                body["witness"] = {{"seed", report.witness->first},
                                   {"symbol", report.witness->second}};
            }
            const json doc = analysis_report("fixed-point", std::move(body));
            std::ostringstream os;
            os << "fixed_point_free=" << (report.fixed_point_free ? "true" : "false")
               << " (" << (report.exhaustive ? "exhaustive" : "sampled") << ", "
               << report.seeds_scanned << " seeds)";
            if (report.witness) {
                os << " witness: seed=" << report.witness->first
                   << " symbol=" << report.witness->second;
            }
            os << "\n";
            emit(doc, fp_out, fp_json, os.str());
            return 0;
        }
        if (*selftest_cmd) {
            return do_selftest();
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
