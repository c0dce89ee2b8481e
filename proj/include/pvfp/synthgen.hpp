#pragma once

// Seeded synthetic two-variant logs with planted control-flow and duration
// differences, plus the ground truth describing what was planted.

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "pvfp/error.hpp"
#include "pvfp/eventlog.hpp"
#include "pvfp/random.hpp"
#include "pvfp/timestamp.hpp"

namespace pvfp {

struct WeightedSequence {
    std::vector<std::string> activities;
    double weight = 1.0;
};

// With probability `exclusivity`, a variant-1 trace gets `source target`
// inserted before the 1-based `position`; 0 or anything past the end appends.
// Variant 2 traces are never injected.
struct PlantedEdge {
    std::string source;
    std::string target;
    double exclusivity = 1.0;
    std::size_t position = 0;
};

struct PlantedDuration {
    std::string source;
    std::string target;
    double mean1 = 1.0;
    double mean2 = 1.0;
    double sd = 1.0;
};

struct PlantSpec {
    std::size_t n_traces_per_variant = 100;
    std::vector<WeightedSequence> base_model;
    std::vector<PlantedEdge> planted_edges;
    std::vector<PlantedDuration> planted_durations;
    // Delta distribution for edges without a planted duration.
    double default_mean_days = 1.0;
    double default_sd_days = 0.25;
    // Consecutive cases start this many days apart.
    double case_spacing_days = 1.0;
    std::string start = "2024-01-01T00:00:00Z";
    std::uint64_t seed = 0;

    void validate() const {
        if (n_traces_per_variant == 0) throw ConfigError("spec: n_traces_per_variant must be positive");
        if (base_model.empty()) throw ConfigError("spec: base_model is empty");
        for (const auto& s : base_model) {
            if (s.activities.empty()) throw ConfigError("spec: base_model sequence is empty");
            if (!(s.weight > 0.0)) throw ConfigError("spec: base_model weights must be positive");
            for (const auto& a : s.activities)
                if (a.empty()) throw ConfigError("spec: empty activity name");
        }
        for (const auto& e : planted_edges) {
            if (e.source.empty() || e.target.empty()) throw ConfigError("spec: planted edge with empty activity");
            if (!(e.exclusivity >= 0.0 && e.exclusivity <= 1.0))
                throw ConfigError("spec: exclusivity must be in [0, 1]");
        }
        std::set<std::pair<std::string, std::string>> seen;
        for (const auto& d : planted_durations) {
            if (!(d.mean1 > 0.0 && d.mean2 > 0.0 && d.sd > 0.0))
                throw ConfigError("spec: planted duration means and sd must be positive");
            if (!seen.insert({d.source, d.target}).second)
                throw ConfigError("spec: duplicate planted duration for (" + d.source + ", " + d.target + ")");
        }
        if (!(default_mean_days > 0.0 && default_sd_days > 0.0))
            throw ConfigError("spec: default duration mean and sd must be positive");
        if (!(case_spacing_days >= 0.0)) throw ConfigError("spec: case_spacing_days must be non-negative");
        if (!parse_iso8601(start)) throw ConfigError("spec: start is not an ISO-8601 timestamp");
    }
};

struct GroundTruth {
    std::vector<std::pair<std::string, std::string>> control_flow_different;
    // Edges formed at injection boundaries; they differ as a side effect.
    std::vector<std::pair<std::string, std::string>> collateral_edges;
    std::vector<std::pair<std::string, std::string>> duration_different;
    std::vector<std::pair<std::string, std::string>> duration_same;
    std::size_t injected_traces = 0;
};

struct SyntheticLogs {
    EventLog variant1;
    EventLog variant2;
    GroundTruth truth;
};

namespace detail {

inline double truncated_normal(Rng& rng, double mean, double sd) {
    for (int i = 0; i < 1000; ++i) {
        const double x = rng.normal(mean, sd);
        if (x >= 0.0) return x;
    }
    return 0.0;
}

inline const WeightedSequence& pick_sequence(Rng& rng, const std::vector<WeightedSequence>& model) {
    double total = 0.0;
    for (const auto& s : model) total += s.weight;
    double u = rng.uniform() * total;
    for (const auto& s : model) {
        if (u < s.weight) return s;
        u -= s.weight;
    }
    return model.back();
}

inline std::string case_name(int variant, std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "v%d_%06zu", variant, i + 1);
    return buf;
}

}  // namespace detail

inline SyntheticLogs generate(const PlantSpec& spec) {
    spec.validate();
    using std::chrono::microseconds;
    const Timestamp start = *parse_iso8601(spec.start);
    auto to_us = [](double days) { return microseconds(std::llround(days * 86400.0 * 1e6)); };

    SyntheticLogs out;
    std::set<std::pair<std::string, std::string>> collateral;
    for (int variant = 1; variant <= 2; ++variant) {
        Rng rng(derive_seed(spec.seed, "variant" + std::to_string(variant)));
        std::vector<Trace> traces;
        traces.reserve(spec.n_traces_per_variant);
        for (std::size_t i = 0; i < spec.n_traces_per_variant; ++i) {
            std::vector<std::string> acts = detail::pick_sequence(rng, spec.base_model).activities;
            bool injected = false;
            if (variant == 1) {
                for (const auto& pe : spec.planted_edges) {
                    if (rng.uniform() >= pe.exclusivity) continue;
                    const std::size_t at = (pe.position == 0 || pe.position > acts.size()) ? acts.size() : pe.position - 1;
                    if (at > 0 && acts[at - 1] != pe.source) collateral.insert({acts[at - 1], pe.source});
                    if (at < acts.size() && acts[at] != pe.target) collateral.insert({pe.target, acts[at]});
                    acts.insert(acts.begin() + static_cast<std::ptrdiff_t>(at), {pe.source, pe.target});
                    injected = true;
                }
            }
            if (injected) ++out.truth.injected_traces;

            Trace t;
            t.case_id = detail::case_name(variant, i);
            t.case_attributes["variant"] = std::int64_t{variant};
            Timestamp ts = start + to_us(spec.case_spacing_days * static_cast<double>(i));
            for (std::size_t j = 0; j < acts.size(); ++j) {
                if (j > 0) {
                    double mean = spec.default_mean_days, sd = spec.default_sd_days;
                    for (const auto& pd : spec.planted_durations) {
                        if (pd.source == acts[j - 1] && pd.target == acts[j]) {
                            mean = variant == 1 ? pd.mean1 : pd.mean2;
                            sd = pd.sd;
                        }
                    }
                    ts += to_us(detail::truncated_normal(rng, mean, sd));
                }
                t.events.push_back(Event{acts[j], t.case_id, ts, {}});
            }
            traces.push_back(std::move(t));
        }
        (variant == 1 ? out.variant1 : out.variant2) = EventLog(std::move(traces));
    }

    for (const auto& pe : spec.planted_edges) {
        const std::pair<std::string, std::string> key{pe.source, pe.target};
        if (pe.exclusivity > 0.0) out.truth.control_flow_different.push_back(key);
        collateral.erase(key);
    }
    out.truth.collateral_edges.assign(collateral.begin(), collateral.end());
    for (const auto& pd : spec.planted_durations)
        (pd.mean1 != pd.mean2 ? out.truth.duration_different : out.truth.duration_same)
            .emplace_back(pd.source, pd.target);
    return out;
}

// Both variants in one log, with case attribute "variant" = 1 or 2.
inline EventLog combined_log(const SyntheticLogs& logs) {
    std::vector<Trace> all = logs.variant1.traces();
    all.insert(all.end(), logs.variant2.traces().begin(), logs.variant2.traces().end());
    return EventLog(std::move(all));
}

// ---------------------------------------------------------------------------
// JSON

inline PlantSpec plant_spec_from_json(const nlohmann::json& j) {
    try {
        PlantSpec s;
        s.n_traces_per_variant = j.at("n_traces_per_variant").get<std::size_t>();
        s.seed = j.value("seed", std::uint64_t{0});
        for (const auto& b : j.at("base_model"))
            s.base_model.push_back({b.at("activities").get<std::vector<std::string>>(), b.value("weight", 1.0)});
        for (const auto& e : j.value("planted_edges", nlohmann::json::array()))
            s.planted_edges.push_back({e.at("source").get<std::string>(), e.at("target").get<std::string>(),
                                       e.value("exclusivity", 1.0), e.value("position", std::size_t{0})});
        for (const auto& d : j.value("planted_durations", nlohmann::json::array()))
            s.planted_durations.push_back({d.at("source").get<std::string>(), d.at("target").get<std::string>(),
                                           d.at("mean1").get<double>(), d.at("mean2").get<double>(),
                                           d.at("sd").get<double>()});
        if (j.contains("default_duration")) {
            s.default_mean_days = j["default_duration"].value("mean", s.default_mean_days);
            s.default_sd_days = j["default_duration"].value("sd", s.default_sd_days);
        }
        s.case_spacing_days = j.value("case_spacing_days", s.case_spacing_days);
        s.start = j.value("start", s.start);
        s.validate();
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid plant spec: ") + e.what());
    }
}

inline PlantSpec read_plant_spec(std::istream& in) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("plant spec is not valid JSON: ") + e.what());
    }
    return plant_spec_from_json(j);
}

inline nlohmann::ordered_json ground_truth_json(const GroundTruth& g) {
    auto edges = [](const std::vector<std::pair<std::string, std::string>>& v) {
        auto a = nlohmann::ordered_json::array();
        for (const auto& [s, t] : v) a.push_back({{"source", s}, {"target", t}});
        return a;
    };
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["control_flow_different"] = edges(g.control_flow_different);
    j["collateral_edges"] = edges(g.collateral_edges);
    j["duration_different"] = edges(g.duration_different);
    j["duration_same"] = edges(g.duration_same);
    j["injected_traces"] = g.injected_traces;
    return j;
}

}  // namespace pvfp
