#pragma once

// Wrapper feature selection: every candidate unit is scored by cross-validating
// a classifier on the traces that contain it, and kept when its weighted F1
// beats the constant-prediction baseline under a one-sided paired t-test.

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <functional>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "pvfp/classify.hpp"
#include "pvfp/csv.hpp"
#include "pvfp/encoding.hpp"
#include "pvfp/random.hpp"
#include "pvfp/stats.hpp"

namespace pvfp {

inline constexpr int kSchemaVersion = 1;

struct SelectionConfig {
    double alpha = 0.05;
    int k_folds = 10;
    std::size_t min_instances_per_class = 10;
    FeatureKind feature_kind = FeatureKind::Edge;
    ClassifierConfig classifier;
    std::uint64_t seed = 0;
    // 0 = hardware concurrency.
    unsigned threads = 0;
    // Judge candidates on Benjamini-Hochberg adjusted p-values.
    bool benjamini_hochberg = false;

    void validate() const {
        if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must be in (0, 1)");
        if (k_folds < 2) throw ConfigError("k_folds must be at least 2");
        classifier.validate();
    }
};

// X_{:,S} restricted to the traces that contain the unit.
struct InstanceSubset {
    Matrix rows;
    std::vector<int> labels;
    std::size_t n1 = 0;
    std::size_t n2 = 0;
};

inline InstanceSubset instance_subset(const AugmentedDesignMatrix& aug, const FeatureUnit& unit) {
    const auto idx = aug.layout().index_of(unit);
    if (!idx) throw Error("instance_subset: unit '" + unit.key() + "' is not in the column layout");
    InstanceSubset s;
    s.rows = Matrix(0, aug.layout().dim());
    for (std::size_t i = 0; i < aug.rows(); ++i) {
        const WaveletVector* w = aug.row(i).block(*idx);
        if (w == nullptr) continue;
        s.rows.append_row(w->coeffs);
        s.labels.push_back(aug.labels[i]);
        (aug.labels[i] == 1 ? s.n1 : s.n2)++;
    }
    return s;
}

struct CandidateResult {
    FeatureUnit unit;
    // Averages over folds.
    double mean_gamma1 = 0.0;
    double mean_gamma2 = 0.0;
    double mean_baseline_f1 = 0.0;
    double mean_weighted_f1 = 0.0;
    double mean_diff = 0.0;
    // Class proportions over the whole subset.
    double data_gamma1 = 0.0;
    double data_gamma2 = 0.0;
    std::optional<double> t_statistic;
    std::optional<double> p_value;
    // Benjamini-Hochberg adjusted p-value, when enabled.
    std::optional<double> q_value;
    bool discriminatory = false;
    std::size_t n_instances1 = 0;
    std::size_t n_instances2 = 0;
    int folds = 0;
    // Set when the unit occurs in exactly one variant.
    std::optional<int> exclusive_to;
    std::optional<std::string> skipped_reason;
    std::vector<FoldScore> fold_scores;

    bool skipped() const noexcept { return skipped_reason.has_value(); }
};

inline CandidateResult evaluate_candidate(const AugmentedDesignMatrix& aug, const FeatureUnit& unit,
                                          const SelectionConfig& config) {
    CandidateResult r;
    r.unit = unit;
    const InstanceSubset sub = instance_subset(aug, unit);
    r.n_instances1 = sub.n1;
    r.n_instances2 = sub.n2;
    const double total = static_cast<double>(sub.n1 + sub.n2);
    if (total > 0) {
        r.data_gamma1 = static_cast<double>(sub.n1) / total;
        r.data_gamma2 = static_cast<double>(sub.n2) / total;
    }
    if (sub.n1 == 0 || sub.n2 == 0) {
        if (sub.n1 + sub.n2 == 0) {
            r.skipped_reason = "unit absent from both variants";
        } else {
            r.exclusive_to = sub.n1 > 0 ? 1 : 2;
            r.skipped_reason = "insufficient support";
        }
        return r;
    }
    if (sub.n1 < config.min_instances_per_class || sub.n2 < config.min_instances_per_class) {
        r.skipped_reason = "insufficient support";
        return r;
    }
    const int k = static_cast<int>(std::min<std::size_t>({static_cast<std::size_t>(config.k_folds), sub.n1, sub.n2}));
    if (k < 2) {
        r.skipped_reason = "insufficient support";
        return r;
    }
    try {
        ClassifierConfig cc = config.classifier;
        cc.seed = derive_seed(config.seed, (unit.is_edge() ? "edge:" : "event:") + unit.key());
        r.fold_scores = cross_validate(sub.rows, sub.labels, k, cc);
    } catch (const std::exception& e) {
        r.skipped_reason = std::string("cross-validation failed: ") + e.what();
        return r;
    }
    r.folds = k;
    std::vector<double> diffs;
    for (const FoldScore& f : r.fold_scores) {
        r.mean_gamma1 += f.gamma1;
        r.mean_gamma2 += f.gamma2;
        r.mean_baseline_f1 += f.baseline_f1;
        r.mean_weighted_f1 += f.weighted_f1;
        diffs.push_back(f.weighted_f1 - f.baseline_f1);
    }
    const double kd = static_cast<double>(k);
    r.mean_gamma1 /= kd;
    r.mean_gamma2 /= kd;
    r.mean_baseline_f1 /= kd;
    r.mean_weighted_f1 /= kd;
    r.mean_diff = stats::mean(diffs);
    const auto test = stats::t_test_one_sample_greater(diffs);
    r.t_statistic = test.statistic;
    r.p_value = test.p_value;
    r.discriminatory = r.mean_diff > 0.0 && test.p_value < config.alpha;
    return r;
}

struct SelectionSummary {
    std::size_t candidates = 0;
    std::size_t evaluated = 0;
    std::size_t discriminatory = 0;
    std::size_t skipped = 0;
    std::size_t exclusive = 0;
};

struct SelectionReport {
    SelectionConfig config;
    std::vector<CandidateResult> results;
    SelectionSummary summary;

    std::vector<FeatureUnit> discriminatory_units() const {
        std::vector<FeatureUnit> out;
        for (const auto& r : results)
            if (r.discriminatory) out.push_back(r.unit);
        return out;
    }
    const CandidateResult* find(const FeatureUnit& u) const {
        for (const auto& r : results)
            if (r.unit == u) return &r;
        return nullptr;
    }
};

using SelectionProgress = std::function<void(std::size_t done, std::size_t total, const CandidateResult&)>;

// Evaluates every unit of the layout. Results are in layout order and do not
// depend on the thread count.
inline SelectionReport run_selection(const AugmentedDesignMatrix& aug, const SelectionConfig& config,
                                     const SelectionProgress& progress = {}) {
    config.validate();
    const auto& units = aug.layout().units();
    if (units.empty()) throw DegenerateError("no candidate features");
    SelectionReport rep;
    rep.config = config;
    rep.results.resize(units.size());

    unsigned threads = config.threads != 0 ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, units.size()));
    std::atomic<std::size_t> next{0};
    std::size_t done = 0;
    std::mutex mu;
    auto work = [&] {
        for (std::size_t i = next++; i < units.size(); i = next++) {
            rep.results[i] = evaluate_candidate(aug, units[i], config);
            if (progress) {
                std::lock_guard lock(mu);
                progress(++done, units.size(), rep.results[i]);
            }
        }
    };
    if (threads <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
    }

    if (config.benjamini_hochberg) {
        std::vector<double> p;
        std::vector<std::size_t> at;
        for (std::size_t i = 0; i < rep.results.size(); ++i)
            if (rep.results[i].p_value) {
                p.push_back(*rep.results[i].p_value);
                at.push_back(i);
            }
        const auto q = stats::benjamini_hochberg(p);
        for (std::size_t k = 0; k < at.size(); ++k) {
            auto& r = rep.results[at[k]];
            r.q_value = q[k];
            r.discriminatory = r.mean_diff > 0.0 && q[k] < config.alpha;
        }
    }

    rep.summary.candidates = rep.results.size();
    for (const auto& r : rep.results) {
        if (r.skipped()) ++rep.summary.skipped;
        else ++rep.summary.evaluated;
        if (r.discriminatory) ++rep.summary.discriminatory;
        if (r.exclusive_to) ++rep.summary.exclusive;
    }
    return rep;
}

inline SelectionReport run_selection(const VariantSplit& split, const SelectionConfig& config,
                                     const SelectionProgress& progress = {}) {
    return run_selection(encode_split(split, config.feature_kind), config, progress);
}

// ---------------------------------------------------------------------------
// Serialization

// p-values below 1e-16 are printed as "<1e-16".
inline std::string format_p_value(double p) { return p < 1e-16 ? "<1e-16" : csv::number(p); }

inline void write_selection_csv(const SelectionReport& rep, std::ostream& out) {
    out << "unit,gamma1,gamma2,baseline_f1,weighted_f1,p_value,n_instances1,n_instances2,skipped_reason,"
           "discriminatory,data_gamma1,data_gamma2,exclusive_to,q_value\n";
    for (const auto& r : rep.results) {
        csv::write_field(out, r.unit.label());
        const bool ran = !r.skipped();
        auto num = [&](double v) { out << ',' << (ran ? csv::number(v) : std::string{}); };
        num(r.mean_gamma1);
        num(r.mean_gamma2);
        num(r.mean_baseline_f1);
        num(r.mean_weighted_f1);
        out << ',' << (r.p_value ? format_p_value(*r.p_value) : std::string{});
        out << ',' << r.n_instances1 << ',' << r.n_instances2 << ',';
        csv::write_field(out, r.skipped_reason.value_or(""));
        out << ',' << (r.discriminatory ? "true" : "false");
        out << ',' << csv::number(r.data_gamma1) << ',' << csv::number(r.data_gamma2);
        out << ',' << (r.exclusive_to ? std::to_string(*r.exclusive_to) : std::string{});
        out << ',' << (r.q_value ? format_p_value(*r.q_value) : std::string{});
        out << '\n';
    }
}

inline nlohmann::ordered_json unit_json(const FeatureUnit& u) {
    nlohmann::ordered_json j;
    j["kind"] = u.is_edge() ? "edge" : "event";
    j["label"] = u.label();
    if (u.is_edge()) {
        j["source"] = u.source;
        j["target"] = u.target;
    } else {
        j["activity"] = u.source;
    }
    return j;
}

inline nlohmann::ordered_json selection_json(const SelectionReport& rep) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["schema_version"] = kSchemaVersion;
    const auto& c = rep.config;
    j["config"] = {{"alpha", c.alpha},
                   {"k_folds", c.k_folds},
                   {"min_instances_per_class", c.min_instances_per_class},
                   {"features", c.feature_kind == FeatureKind::Edge ? "edges" : "events"},
                   {"seed", c.seed},
                   {"benjamini_hochberg", c.benjamini_hochberg},
                   {"classifier",
                    {{"C", c.classifier.C},
                     {"gamma", c.classifier.gamma.mode == KernelGamma::Mode::Scale
                                   ? ordered_json("scale")
                                   : ordered_json(c.classifier.gamma.value)},
                     {"tol", c.classifier.tol},
                     {"max_passes", c.classifier.max_passes}}}};
    j["summary"] = {{"candidates", rep.summary.candidates},
                    {"evaluated", rep.summary.evaluated},
                    {"discriminatory", rep.summary.discriminatory},
                    {"skipped", rep.summary.skipped},
                    {"exclusive", rep.summary.exclusive}};
    ordered_json rows = ordered_json::array();
    for (const auto& r : rep.results) {
        ordered_json row;
        row["unit"] = unit_json(r.unit);
        const bool ran = !r.skipped();
        row["gamma1"] = ran ? ordered_json(r.mean_gamma1) : ordered_json();
        row["gamma2"] = ran ? ordered_json(r.mean_gamma2) : ordered_json();
        row["baseline_f1"] = ran ? ordered_json(r.mean_baseline_f1) : ordered_json();
        row["weighted_f1"] = ran ? ordered_json(r.mean_weighted_f1) : ordered_json();
        row["p_value"] = r.p_value ? ordered_json(*r.p_value) : ordered_json();
        row["p_value_display"] = r.p_value ? ordered_json(format_p_value(*r.p_value)) : ordered_json();
        row["n_instances1"] = r.n_instances1;
        row["n_instances2"] = r.n_instances2;
        row["skipped_reason"] = r.skipped_reason ? ordered_json(*r.skipped_reason) : ordered_json();
        row["discriminatory"] = r.discriminatory;
        row["data_gamma1"] = r.data_gamma1;
        row["data_gamma2"] = r.data_gamma2;
        row["exclusive_to"] = r.exclusive_to ? ordered_json(*r.exclusive_to) : ordered_json();
        row["q_value"] = r.q_value ? ordered_json(*r.q_value) : ordered_json();
        row["folds"] = r.folds;
        row["mean_diff"] = ran ? ordered_json(r.mean_diff) : ordered_json();
        if (ran) {
            ordered_json fs = ordered_json::array();
            for (const auto& f : r.fold_scores)
                fs.push_back({{"n1", f.n1},
                              {"n2", f.n2},
                              {"gamma1", f.gamma1},
                              {"gamma2", f.gamma2},
                              {"f1_class1", f.f1_class1},
                              {"f1_class2", f.f1_class2},
                              {"weighted_f1", f.weighted_f1},
                              {"baseline_f1", f.baseline_f1}});
            row["fold_scores"] = fs;
        }
        rows.push_back(std::move(row));
    }
    j["results"] = std::move(rows);
    return j;
}

}  // namespace pvfp
