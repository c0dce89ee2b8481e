#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "pvfp/pipeline.hpp"

using namespace pvfp;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path synth_input(const std::string& name, double exclusivity) {
    const auto dir = testutil::temp_dir(name);
    PlantSpec spec;
    spec.n_traces_per_variant = 500;
    spec.seed = 11;
    spec.base_model = {{{"A", "B", "C", "X", "Y", "E"}, 4.0},
                       {{"A", "D", "B", "C", "E"}, 2.0},
                       {{"A", "C", "B", "D", "E"}, 2.0},
                       {{"A", "D", "E"}, 2.0}};
    spec.planted_edges = {{"X", "Y", exclusivity, 0}};
    spec.planted_durations = {{"A", "D", 3, 6, 1}};
    std::ofstream out(dir / "log.csv");
    write_canonical_csv(combined_log(generate(spec)), out);
    return dir;
}

RunConfig csv_config(const fs::path& dir) {
    RunConfig c;
    c.input = (dir / "log.csv").string();
    c.format = LogFormat::Csv;
    c.split_attribute = "variant";
    c.split_rule = "eq:1,eq:2";
    c.output_dir = (dir / "out").string();
    c.selection.seed = 5;
    c.progress = false;
    return c;
}

}  // namespace

TEST(Pipeline, AnalyzeWritesAllArtifacts) {
    const auto dir = synth_input("analyze", 0.6);
    std::ostringstream log;
    ASSERT_EQ(cmd_analyze(csv_config(dir), log), 0) << log.str();
    for (const char* f : {"selection_report.csv", "selection_report.json", "durations.csv", "fingerprint_variant1.dot",
                          "fingerprint_variant2.dot", "fingerprint_variant1.json", "fingerprint_variant2.json",
                          "run_manifest.json"})
        EXPECT_TRUE(fs::exists(dir / "out" / f)) << f;
    const auto report = nlohmann::json::parse(slurp(dir / "out" / "selection_report.json"));
    bool flagged = false;
    for (const auto& r : report["results"])
        if (r["unit"]["source"] == "X" && r["unit"]["target"] == "Y") flagged = r["discriminatory"];
    EXPECT_TRUE(flagged);
    const auto fp = nlohmann::json::parse(slurp(dir / "out" / "fingerprint_variant1.json"));
    EXPECT_FALSE(fp["edges"].empty());
    const auto manifest = nlohmann::json::parse(slurp(dir / "out" / "run_manifest.json"));
    EXPECT_EQ(manifest["schema_version"], 1);
    EXPECT_EQ(manifest["seed"], 5);
    EXPECT_TRUE(manifest["timings_seconds"].contains("total"));
    EXPECT_NE(slurp(dir / "out" / "durations.csv").find("\"('A', 'D')\""), std::string::npos);
    EXPECT_NE(slurp(dir / "out" / "fingerprint_variant1.dot").find("style=\"dashed\""), std::string::npos);
}

TEST(Pipeline, AnalyzeIsDeterministic) {
    const auto dir = synth_input("determinism", 0.6);
    auto c = csv_config(dir);
    std::ostringstream log;
    ASSERT_EQ(cmd_analyze(c, log), 0);
    const std::string first = slurp(dir / "out" / "selection_report.csv") + slurp(dir / "out" / "durations.csv") +
                              slurp(dir / "out" / "fingerprint_variant1.dot");
    c.selection.threads = 3;
    ASSERT_EQ(cmd_analyze(c, log), 0);
    const std::string second = slurp(dir / "out" / "selection_report.csv") + slurp(dir / "out" / "durations.csv") +
                               slurp(dir / "out" / "fingerprint_variant1.dot");
    EXPECT_EQ(first, second);
}

TEST(Pipeline, NoDifferencesExitsTwoWithEmptyFingerprints) {
    const auto dir = testutil::temp_dir("nodiff");
    {
        std::ofstream out(dir / "log.csv");
        out << "case_id,activity,timestamp,case:variant\n";
        for (int i = 0; i < 40; ++i)
            out << "c" << i << ",A,2024-01-01T00:00:00Z," << (i % 2 + 1) << "\nc" << i << ",B,2024-01-02T00:00:00Z,"
                << (i % 2 + 1) << '\n';
    }
    std::ostringstream log;
    EXPECT_EQ(cmd_analyze(csv_config(dir), log), 2) << log.str();
    EXPECT_NE(log.str().find("no differences found"), std::string::npos);
    const auto fp = nlohmann::json::parse(slurp(dir / "out" / "fingerprint_variant1.json"));
    EXPECT_TRUE(fp["edges"].empty());
    EXPECT_EQ(fp["retained_traces"], 0);
}

TEST(Pipeline, ErrorsExitOne) {
    const auto dir = synth_input("errors", 0.6);
    std::ostringstream log;
    auto c = csv_config(dir);
    c.split_rule = "eq:1,eq:9";
    EXPECT_EQ(cmd_analyze(c, log), 1);
    EXPECT_NE(log.str().find("degenerate split"), std::string::npos) << log.str();
    c = csv_config(dir);
    c.input = (dir / "missing.csv").string();
    EXPECT_EQ(cmd_analyze(c, log), 1);
    c = csv_config(dir);
    c.split_rule = "bogus";
    EXPECT_EQ(cmd_encode(c, log), 1);
}

TEST(Pipeline, EncodeToyLog) {
    const auto dir = testutil::temp_dir("encode");
    {
        std::ofstream out(dir / "log.csv");
        out << "case_id,activity,timestamp,case:v\n"
               "s1,e1,2024-01-01T00:00:00Z,a\ns1,e2,2024-01-02T00:00:00Z,a\ns1,e1,2024-01-03T00:00:00Z,a\n"
               "s1,e1,2024-01-04T00:00:00Z,a\n"
               "s2,e1,2024-01-01T00:00:00Z,b\ns2,e2,2024-01-02T00:00:00Z,b\ns2,e3,2024-01-03T00:00:00Z,b\n"
               "s2,e1,2024-01-04T00:00:00Z,b\n";
    }
    auto c = csv_config(dir);
    c.split_attribute = "v";
    c.split_rule = "eq:a,eq:b";
    c.selection.feature_kind = FeatureKind::Event;
    std::ostringstream log;
    ASSERT_EQ(cmd_encode(c, log), 0) << log.str();
    const std::string d1 = slurp(dir / "out" / "design_variant1.csv");
    const std::string d2 = slurp(dir / "out" / "design_variant2.csv");
    EXPECT_NE(d1.find("s1,1,0.75,-0.25,0.5,0,0.25,0.25,-0.5,0,0,0,0,0"), std::string::npos) << d1;
    EXPECT_NE(d2.find("s2,2,0.5,0,0.5,-0.5,0.25,0.25,-0.5,0,0.25,-0.25,0,0.5"), std::string::npos) << d2;
    ASSERT_EQ(cmd_encode(c, log), 0);
    EXPECT_EQ(slurp(dir / "out" / "design_variant1.csv"), d1);

    c.split_rule = "eq:a,eq:zzz";
    EXPECT_EQ(cmd_encode(c, log), 1);
}

TEST(Pipeline, SynthWritesLogAndTruth) {
    const auto dir = testutil::temp_dir("synth");
    {
        std::ofstream spec(dir / "spec.json");
        spec << R"({"n_traces_per_variant": 30, "seed": 1,
                   "base_model": [{"activities": ["A", "B", "C"]}],
                   "planted_edges": [{"source": "P", "target": "Q", "exclusivity": 1.0}]})";
    }
    std::ostringstream log;
    ASSERT_EQ(cmd_synth((dir / "spec.json").string(), (dir / "out").string(), log), 0) << log.str();
    const auto truth = nlohmann::json::parse(slurp(dir / "out" / "ground_truth.json"));
    EXPECT_EQ(truth["control_flow_different"][0]["target"], "Q");
    std::ifstream in(dir / "out" / "synthetic_log.csv");
    EXPECT_EQ(parse_csv(in).size(), 60u);
    EXPECT_EQ(cmd_synth((dir / "nope.json").string(), (dir / "out").string(), log), 1);
}
