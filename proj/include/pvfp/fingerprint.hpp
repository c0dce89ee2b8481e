#pragma once

// Mutual fingerprints: directly-follows graphs of the traces that contain a
// discriminatory unit, annotated with control-flow and duration differences.

#include <json.hpp>

#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pvfp/csv.hpp"
#include "pvfp/encoding.hpp"
#include "pvfp/eventlog.hpp"
#include "pvfp/select.hpp"
#include "pvfp/stats.hpp"

namespace pvfp {

using EdgeKey = std::pair<std::string, std::string>;

struct NodeStats {
    std::size_t frequency = 0;
    // The activity itself was selected (event features).
    bool cf_discriminatory = false;
};

struct EdgeStats {
    std::size_t frequency = 0;
    std::size_t case_frequency = 0;
    double mean_duration_days = 0.0;
    bool cf_discriminatory = false;
    bool dur_discriminatory = false;
};

struct MutualFingerprint {
    int variant_id = 1;
    std::map<std::string, NodeStats> nodes;
    std::map<EdgeKey, EdgeStats> edges;
    std::size_t retained_traces = 0;
    std::size_t total_traces = 0;
};

struct FilterResult {
    EventLog log;
    std::optional<std::string> warning;
};

// Keeps the traces that contain at least one of the units.
inline FilterResult filter_traces(const EventLog& variant, const std::vector<FeatureUnit>& discriminatory) {
    if (discriminatory.empty()) return {EventLog{}, "no differences found"};
    std::vector<Trace> kept;
    for (const Trace& t : variant.traces()) {
        for (const auto& u : discriminatory) {
            if (contains(t, u)) {
                kept.push_back(t);
                break;
            }
        }
    }
    return {EventLog(std::move(kept)), std::nullopt};
}

// Per adjacent occurrence: timestamp(target) - timestamp(source), in days.
inline std::map<EdgeKey, std::vector<double>> edge_durations(const EventLog& log) {
    std::map<EdgeKey, std::vector<double>> out;
    for (const Trace& t : log.traces())
        for (std::size_t i = 0; i + 1 < t.size(); ++i)
            out[{t.activity(i), t.activity(i + 1)}].push_back(
                days_between(t.events[i].timestamp, t.events[i + 1].timestamp));
    return out;
}

inline MutualFingerprint build_dfg(const EventLog& filtered, int variant_id = 1) {
    MutualFingerprint fp;
    fp.variant_id = variant_id;
    fp.retained_traces = filtered.size();
    fp.total_traces = filtered.size();
    std::map<EdgeKey, double> duration_sum;
    for (const Trace& t : filtered.traces()) {
        std::set<EdgeKey> seen;
        for (std::size_t i = 0; i < t.size(); ++i) {
            ++fp.nodes[t.activity(i)].frequency;
            if (i + 1 == t.size()) continue;
            EdgeKey key{t.activity(i), t.activity(i + 1)};
            auto& e = fp.edges[key];
            ++e.frequency;
            duration_sum[key] += days_between(t.events[i].timestamp, t.events[i + 1].timestamp);
            if (seen.insert(key).second) ++e.case_frequency;
        }
    }
    for (auto& [key, e] : fp.edges) e.mean_duration_days = duration_sum[key] / static_cast<double>(e.frequency);
    return fp;
}

inline void mark_control_flow(MutualFingerprint& fp, const std::vector<FeatureUnit>& discriminatory) {
    for (const auto& u : discriminatory) {
        if (u.is_edge()) {
            if (auto it = fp.edges.find({u.source, u.target}); it != fp.edges.end()) it->second.cf_discriminatory = true;
        } else if (auto it = fp.nodes.find(u.source); it != fp.nodes.end()) {
            it->second.cf_discriminatory = true;
        }
    }
}

// Filter, build and mark one variant's fingerprint.
inline MutualFingerprint build_fingerprint(const EventLog& variant, const std::vector<FeatureUnit>& discriminatory,
                                           int variant_id) {
    const FilterResult filtered = filter_traces(variant, discriminatory);
    MutualFingerprint fp = build_dfg(filtered.log, variant_id);
    fp.total_traces = variant.size();
    mark_control_flow(fp, discriminatory);
    return fp;
}

struct DurationRow {
    FeatureUnit edge;
    std::size_t n1 = 0;
    std::size_t n2 = 0;
    std::optional<double> mean_days1;
    std::optional<double> mean_days2;
    std::optional<double> statistic;
    std::optional<double> dof;
    std::optional<double> p_value;
    bool dur_discriminatory = false;
    std::optional<std::string> skipped_reason;
};

struct DurationReport {
    double alpha = 0.05;
    std::vector<DurationRow> rows;

    const DurationRow* find(const std::string& from, const std::string& to) const {
        for (const auto& r : rows)
            if (r.edge.source == from && r.edge.target == to) return &r;
        return nullptr;
    }
};

// Welch-tests the delta samples of every edge over the full variant logs and
// marks edges with p < alpha as duration-discriminatory in both fingerprints.
inline DurationReport annotate_durations(MutualFingerprint& fp1, MutualFingerprint& fp2, const EventLog& variant1,
                                         const EventLog& variant2, double alpha) {
    const auto d1 = edge_durations(variant1);
    const auto d2 = edge_durations(variant2);
    std::set<EdgeKey> all;
    for (const auto& [k, v] : d1) all.insert(k);
    for (const auto& [k, v] : d2) all.insert(k);

    DurationReport rep;
    rep.alpha = alpha;
    static const std::vector<double> none;
    for (const EdgeKey& key : all) {
        DurationRow row;
        row.edge = FeatureUnit::edge(key.first, key.second);
        const auto i1 = d1.find(key);
        const auto i2 = d2.find(key);
        const auto& s1 = i1 != d1.end() ? i1->second : none;
        const auto& s2 = i2 != d2.end() ? i2->second : none;
        row.n1 = s1.size();
        row.n2 = s2.size();
        if (!s1.empty()) row.mean_days1 = stats::mean(s1);
        if (!s2.empty()) row.mean_days2 = stats::mean(s2);
        if (s1.empty() || s2.empty()) {
            row.skipped_reason = std::string("edge occurs only in variant ") + (s1.empty() ? "2" : "1");
        } else if (s1.size() < 2 || s2.size() < 2) {
            row.skipped_reason = "insufficient duration observations";
        } else {
            const auto t = stats::welch_t_test(s1, s2);
            row.statistic = t.statistic;
            row.dof = t.dof;
            row.p_value = t.p_value;
            row.dur_discriminatory = t.p_value < alpha;
            if (row.dur_discriminatory) {
                if (auto it = fp1.edges.find(key); it != fp1.edges.end()) it->second.dur_discriminatory = true;
                if (auto it = fp2.edges.find(key); it != fp2.edges.end()) it->second.dur_discriminatory = true;
            }
        }
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Serialization

namespace detail {

inline std::string dot_quote(const std::string& s) {
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out += c;
    }
    return out + '"';
}

inline std::string fixed2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace detail

// Graphviz: control-flow edges red, duration edges dashed, label "freq / mean d".
inline std::string emit_dot(const MutualFingerprint& fp) {
    std::ostringstream out;
    out << "digraph " << detail::dot_quote("fingerprint_variant" + std::to_string(fp.variant_id)) << " {\n";
    out << "  label=" << detail::dot_quote("variant " + std::to_string(fp.variant_id) + ": " +
                                           std::to_string(fp.retained_traces) + " of " +
                                           std::to_string(fp.total_traces) + " traces")
        << ";\n";
    out << "  node [shape=box];\n";
    for (const auto& [name, n] : fp.nodes) {
        out << "  " << detail::dot_quote(name) << " [label=" << detail::dot_quote(name + "\n" + std::to_string(n.frequency));
        if (n.cf_discriminatory) out << ", color=\"red\"";
        out << "];\n";
    }
    for (const auto& [key, e] : fp.edges) {
        out << "  " << detail::dot_quote(key.first) << " -> " << detail::dot_quote(key.second) << " [label="
            << detail::dot_quote(std::to_string(e.frequency) + " / " + detail::fixed2(e.mean_duration_days) + " d");
        if (e.cf_discriminatory) out << ", color=\"red\"";
        if (e.dur_discriminatory) out << ", style=\"dashed\"";
        out << "];\n";
    }
    out << "}\n";
    return out.str();
}

inline nlohmann::ordered_json fingerprint_json(const MutualFingerprint& fp) {
    nlohmann::ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["variant_id"] = fp.variant_id;
    j["retained_traces"] = fp.retained_traces;
    j["total_traces"] = fp.total_traces;
    auto nodes = nlohmann::ordered_json::array();
    for (const auto& [name, n] : fp.nodes)
        nodes.push_back({{"activity", name}, {"frequency", n.frequency}, {"cf_discriminatory", n.cf_discriminatory}});
    j["nodes"] = std::move(nodes);
    auto edges = nlohmann::ordered_json::array();
    for (const auto& [key, e] : fp.edges)
        edges.push_back({{"source", key.first},
                         {"target", key.second},
                         {"frequency", e.frequency},
                         {"case_frequency", e.case_frequency},
                         {"mean_duration_days", e.mean_duration_days},
                         {"cf_discriminatory", e.cf_discriminatory},
                         {"dur_discriminatory", e.dur_discriminatory}});
    j["edges"] = std::move(edges);
    return j;
}

inline void write_durations_csv(const DurationReport& rep, std::ostream& out) {
    out << "edge,mean_delta_days_1,mean_delta_days_2,p_value,n1,n2,statistic,dof,dur_discriminatory,skipped_reason\n";
    auto opt = [](const std::optional<double>& v) { return v ? csv::number(*v) : std::string{}; };
    for (const auto& r : rep.rows) {
        csv::write_field(out, r.edge.label());
        out << ',' << opt(r.mean_days1) << ',' << opt(r.mean_days2) << ','
            << (r.p_value ? format_p_value(*r.p_value) : std::string{}) << ',' << r.n1 << ',' << r.n2 << ','
            << opt(r.statistic) << ',' << opt(r.dof) << ',' << (r.dur_discriminatory ? "true" : "false") << ',';
        csv::write_field(out, r.skipped_reason.value_or(""));
        out << '\n';
    }
}

}  // namespace pvfp
