#pragma once

// End-to-end commands behind the CLI: analyze, encode and synth. Each returns
// a process exit code (0 success, 2 no differences found, 1 error) and writes
// its artifacts into the output directory.

#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "pvfp/encoding.hpp"
#include "pvfp/error.hpp"
#include "pvfp/eventlog.hpp"
#include "pvfp/fingerprint.hpp"
#include "pvfp/select.hpp"
#include "pvfp/synthgen.hpp"

namespace pvfp {

inline constexpr const char* kToolVersion = "1.0.0";

struct RunConfig {
    std::string input;
    LogFormat format = LogFormat::Xes;
    CsvMapping mapping;
    std::string split_attribute;
    std::string split_rule;
    SelectionConfig selection;
    std::string output_dir = ".";
    // Per-candidate progress lines on the log stream.
    bool progress = true;
};

namespace detail {

inline std::filesystem::path prepare_output_dir(const std::string& dir) {
    std::filesystem::path p(dir);
    std::error_code ec;
    std::filesystem::create_directories(p, ec);
    if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
    const auto probe = p / ".pvfp_write_probe";
    {
        std::ofstream f(probe);
        if (!f) throw ConfigError("output directory '" + dir + "' is not writable");
    }
    std::filesystem::remove(probe, ec);
    return p;
}

template <typename Fn>
void write_file(const std::filesystem::path& path, Fn&& fn) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    fn(out);
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

inline void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j) {
    write_file(path, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline const char* format_name(LogFormat f) { return f == LogFormat::Xes ? "xes" : "csv"; }

inline VariantSplit load_split(const RunConfig& cfg) {
    if (cfg.input.empty()) throw ConfigError("no input file given");
    if (cfg.split_attribute.empty()) throw ConfigError("no split attribute given");
    const SplitRule rule = parse_split_rule(cfg.split_rule);
    const EventLog log = read_log(cfg.input, cfg.format, cfg.mapping);
    return split_variants(log, cfg.split_attribute, rule);
}

template <typename Fn>
int guarded(std::ostream& log, Fn&& fn) {
    try {
        return fn();
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace detail

inline int cmd_analyze(const RunConfig& cfg, std::ostream& log = std::cerr) {
    return detail::guarded(log, [&] {
        using clock = std::chrono::steady_clock;
        const auto t_total = clock::now();
        cfg.selection.validate();
        const auto out = detail::prepare_output_dir(cfg.output_dir);

        auto t0 = clock::now();
        const VariantSplit split = detail::load_split(cfg);
        const double t_load = detail::seconds_since(t0);
        log << "[load] variant1=" << split.variant1.size() << " variant2=" << split.variant2.size()
            << " dropped_missing=" << split.dropped_missing << " dropped_unmatched=" << split.dropped_unmatched
            << '\n';

        t0 = clock::now();
        const AugmentedDesignMatrix aug = encode_split(split, cfg.selection.feature_kind);
        const double t_encode = detail::seconds_since(t0);
        log << "[encode] candidates=" << aug.layout().units().size() << " dim=" << aug.layout().dim() << '\n';

        t0 = clock::now();
        SelectionProgress progress;
        if (cfg.progress) {
            progress = [&log](std::size_t done, std::size_t total, const CandidateResult& r) {
                log << "[select] " << done << '/' << total << ' ' << r.unit.key();
                if (r.skipped()) log << " skipped=\"" << *r.skipped_reason << '"';
                else log << " p=" << format_p_value(r.p_value.value_or(1.0))
                         << " discriminatory=" << (r.discriminatory ? "true" : "false");
                log << '\n';
            };
        }
        const SelectionReport rep = run_selection(aug, cfg.selection, progress);
        const double t_select = detail::seconds_since(t0);

        t0 = clock::now();
        const auto disc = rep.discriminatory_units();
        if (disc.empty()) log << "warning: no differences found\n";
        MutualFingerprint fp1 = build_fingerprint(split.variant1, disc, 1);
        MutualFingerprint fp2 = build_fingerprint(split.variant2, disc, 2);
        const DurationReport durations =
            annotate_durations(fp1, fp2, split.variant1, split.variant2, cfg.selection.alpha);
        const double t_fingerprint = detail::seconds_since(t0);

        detail::write_file(out / "selection_report.csv", [&](std::ostream& o) { write_selection_csv(rep, o); });
        detail::write_json(out / "selection_report.json", selection_json(rep));
        detail::write_file(out / "durations.csv", [&](std::ostream& o) { write_durations_csv(durations, o); });
        detail::write_file(out / "fingerprint_variant1.dot", [&](std::ostream& o) { o << emit_dot(fp1); });
        detail::write_file(out / "fingerprint_variant2.dot", [&](std::ostream& o) { o << emit_dot(fp2); });
        detail::write_json(out / "fingerprint_variant1.json", fingerprint_json(fp1));
        detail::write_json(out / "fingerprint_variant2.json", fingerprint_json(fp2));

        std::size_t nonzero_blocks = 0;
        for (std::size_t i = 0; i < aug.rows(); ++i) nonzero_blocks += aug.row(i).blocks.size();
        std::size_t dur_disc = 0;
        for (const auto& r : durations.rows) dur_disc += r.dur_discriminatory ? 1 : 0;

        nlohmann::ordered_json m;
        m["schema_version"] = kSchemaVersion;
        m["tool_version"] = kToolVersion;
        m["command"] = "analyze";
        m["input"] = {{"path", cfg.input},
                      {"format", detail::format_name(cfg.format)},
                      {"case_column", cfg.mapping.case_column},
                      {"activity_column", cfg.mapping.activity_column},
                      {"timestamp_column", cfg.mapping.timestamp_column},
                      {"timestamp_format", cfg.mapping.timestamp_format}};
        m["split"] = {{"attribute", cfg.split_attribute},
                      {"rule", cfg.split_rule},
                      {"description", split.predicate_description},
                      {"variant1_traces", split.variant1.size()},
                      {"variant2_traces", split.variant2.size()},
                      {"dropped_missing", split.dropped_missing},
                      {"dropped_unmatched", split.dropped_unmatched}};
        m["parameters"] = selection_json(rep)["config"];
        m["parameters"]["threads"] = cfg.selection.threads;
        m["seed"] = cfg.selection.seed;
        m["counts"] = {{"candidates", aug.layout().units().size()},
                       {"haar_dimension", aug.layout().dim()},
                       {"logical_columns", aug.logical_columns()},
                       {"nonzero_blocks", nonzero_blocks},
                       {"evaluated", rep.summary.evaluated},
                       {"skipped", rep.summary.skipped},
                       {"discriminatory", rep.summary.discriminatory},
                       {"duration_discriminatory", dur_disc},
                       {"retained_traces_variant1", fp1.retained_traces},
                       {"retained_traces_variant2", fp2.retained_traces}};
        m["timings_seconds"] = {{"load", t_load},
                                {"encode", t_encode},
                                {"select", t_select},
                                {"fingerprint", t_fingerprint},
                                {"total", detail::seconds_since(t_total)}};
        m["outputs"] = {"selection_report.csv",      "selection_report.json",    "durations.csv",
                        "fingerprint_variant1.dot",  "fingerprint_variant2.dot", "fingerprint_variant1.json",
                        "fingerprint_variant2.json", "run_manifest.json"};
        detail::write_json(out / "run_manifest.json", m);

        log << "[done] discriminatory=" << disc.size() << " duration_discriminatory=" << dur_disc << " in "
            << detail::seconds_since(t_total) << " s\n";
        return disc.empty() ? 2 : 0;
    });
}

inline int cmd_encode(const RunConfig& cfg, std::ostream& log = std::cerr) {
    return detail::guarded(log, [&] {
        const auto out = detail::prepare_output_dir(cfg.output_dir);
        const VariantSplit split = detail::load_split(cfg);
        const AugmentedDesignMatrix aug = encode_split(split, cfg.selection.feature_kind);
        detail::write_file(out / "design_variant1.csv", [&](std::ostream& o) { write_design_csv(aug.design1, o); });
        detail::write_file(out / "design_variant2.csv", [&](std::ostream& o) { write_design_csv(aug.design2, o); });
        log << "[encode] rows=" << aug.rows() << " columns=" << aug.logical_columns() << '\n';
        return 0;
    });
}

// Reads a plant spec and writes synthetic_log.csv and ground_truth.json.
inline int cmd_synth(const std::string& spec_path, const std::string& output_dir, std::ostream& log = std::cerr) {
    return detail::guarded(log, [&] {
        std::ifstream in(spec_path);
        if (!in) throw ConfigError("cannot open spec file '" + spec_path + "'");
        const PlantSpec spec = read_plant_spec(in);
        const auto out = detail::prepare_output_dir(output_dir);
        const SyntheticLogs logs = generate(spec);
        detail::write_file(out / "synthetic_log.csv",
                           [&](std::ostream& o) { write_canonical_csv(combined_log(logs), o); });
        auto truth = ground_truth_json(logs.truth);
        truth["split"] = {{"attribute", "variant"}, {"rule", "eq:1,eq:2"}};
        detail::write_json(out / "ground_truth.json", truth);
        log << "[synth] traces=" << logs.variant1.size() + logs.variant2.size()
            << " injected=" << logs.truth.injected_traces << '\n';
        return 0;
    });
}

}  // namespace pvfp
