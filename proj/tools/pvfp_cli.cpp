// pvfp: process-variant fingerprinting from the command line.

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>

#include "pvfp/pvfp.hpp"

namespace {

void add_input_options(CLI::App* cmd, pvfp::RunConfig& cfg) {
    static const std::map<std::string, pvfp::LogFormat> formats{{"xes", pvfp::LogFormat::Xes},
                                                                {"csv", pvfp::LogFormat::Csv}};
    static const std::map<std::string, pvfp::FeatureKind> kinds{{"events", pvfp::FeatureKind::Event},
                                                                {"edges", pvfp::FeatureKind::Edge}};
    cmd->add_option("--input", cfg.input, "Event log file")->required();
    cmd->add_option("--format", cfg.format, "Log format: xes or csv")
        ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
    cmd->add_option("--case-col", cfg.mapping.case_column, "CSV case id column");
    cmd->add_option("--activity-col", cfg.mapping.activity_column, "CSV activity column");
    cmd->add_option("--time-col", cfg.mapping.timestamp_column, "CSV timestamp column");
    cmd->add_option("--time-format", cfg.mapping.timestamp_format, "iso8601 or a strptime format (UTC)");
    cmd->add_option("--split-attr", cfg.split_attribute, "Attribute that separates the variants")->required();
    cmd->add_option("--split-rule", cfg.split_rule, "Two predicates, e.g. ge:50,lt:50 or eq:A,eq:B")->required();
    cmd->add_option("--features", cfg.selection.feature_kind, "Feature units: events or edges")
        ->transform(CLI::CheckedTransformer(kinds, CLI::ignore_case));
    cmd->add_option("--out", cfg.output_dir, "Output directory");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Process variant analysis with wavelet-encoded traces and mutual fingerprints"};
    app.require_subcommand(1);
    app.set_version_flag("--version", pvfp::kToolVersion);

    pvfp::RunConfig cfg;
    bool quiet = false;

    auto* analyze = app.add_subcommand("analyze", "Select discriminatory units and build fingerprints");
    add_input_options(analyze, cfg);
    analyze->add_option("--alpha", cfg.selection.alpha, "Significance level")->check(CLI::Range(0.0, 1.0));
    analyze->add_option("--folds", cfg.selection.k_folds, "Cross-validation folds")->check(CLI::PositiveNumber);
    analyze->add_option("--min-support", cfg.selection.min_instances_per_class,
                        "Minimum traces per variant containing a unit");
    analyze->add_option("--seed", cfg.selection.seed, "Random seed");
    analyze->add_option("--threads", cfg.selection.threads, "Worker threads (0 = all cores)");
    analyze->add_flag("--bh", cfg.selection.benjamini_hochberg, "Benjamini-Hochberg adjustment across candidates");
    analyze->add_option("--svm-c", cfg.selection.classifier.C, "SVM box constraint");
    analyze->add_option("--svm-tol", cfg.selection.classifier.tol, "SVM KKT tolerance");
    double gamma = 0.0;
    analyze->add_option("--svm-gamma", gamma, "RBF gamma (default: 1 / (features * variance))");
    analyze->add_flag("--quiet", quiet, "Suppress per-candidate progress");

    auto* encode = app.add_subcommand("encode", "Write the design matrices as CSV");
    add_input_options(encode, cfg);

    std::string spec_path, synth_out = ".";
    auto* synth = app.add_subcommand("synth", "Generate a synthetic two-variant log");
    synth->add_option("--spec", spec_path, "Plant spec JSON")->required();
    synth->add_option("--out", synth_out, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    if (gamma > 0.0) cfg.selection.classifier.gamma = pvfp::KernelGamma::fixed(gamma);
    cfg.progress = !quiet;
    if (*analyze) return pvfp::cmd_analyze(cfg);
    if (*encode) return pvfp::cmd_encode(cfg);
    return pvfp::cmd_synth(spec_path, synth_out);
}
