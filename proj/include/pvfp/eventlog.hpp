#pragma once

// Event logs: the Event/Trace/EventLog model, XES and CSV readers, the
// canonical CSV writer, and partitioning of a log into two process variants.

#include <expat.h>

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include "pvfp/csv.hpp"
#include "pvfp/error.hpp"
#include "pvfp/timestamp.hpp"

namespace pvfp {

using AttributeValue = std::variant<std::string, std::int64_t, double, bool>;
using AttributeMap = std::map<std::string, AttributeValue>;

inline std::string to_string(const AttributeValue& v) {
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, std::string>) {
                return x;
            } else if constexpr (std::is_same_v<T, bool>) {
                return x ? "true" : "false";
            } else if constexpr (std::is_same_v<T, std::int64_t>) {
                return std::to_string(x);
            } else {
                char buf[32];
                const auto res = std::to_chars(buf, buf + sizeof buf, x);
                std::string s(buf, res.ptr);
                if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
                return s;
            }
        },
        v);
}

struct Event {
    std::string activity;
    std::string case_id;
    Timestamp timestamp;
    AttributeMap attributes;

    bool operator==(const Event&) const = default;
};

struct Trace {
    std::string case_id;
    std::vector<Event> events;
    AttributeMap case_attributes;

    std::size_t size() const noexcept { return events.size(); }
    const std::string& activity(std::size_t i) const { return events[i].activity; }
    bool operator==(const Trace&) const = default;
};

// Immutable after construction. The constructor sorts each trace's events by
// timestamp (stable, so ties keep file order) and validates the invariants.
class EventLog {
public:
    EventLog() = default;

    explicit EventLog(std::vector<Trace> traces) : traces_(std::move(traces)) {
        std::unordered_set<std::string> seen;
        std::set<std::string> alphabet;
        for (std::size_t t = 0; t < traces_.size(); ++t) {
            Trace& trace = traces_[t];
            if (trace.events.empty())
                throw ParseError("trace '" + trace.case_id + "' has no events");
            if (!seen.insert(trace.case_id).second)
                throw ParseError("duplicate case id '" + trace.case_id + "'");
            for (const Event& e : trace.events) {
                if (e.activity.empty())
                    throw ParseError("event with empty activity in trace '" + trace.case_id + "'");
                if (e.case_id != trace.case_id)
                    throw ParseError("event case id '" + e.case_id + "' does not match trace '" +
                                     trace.case_id + "'");
                alphabet.insert(e.activity);
            }
            std::stable_sort(trace.events.begin(), trace.events.end(),
                             [](const Event& a, const Event& b) { return a.timestamp < b.timestamp; });
        }
        alphabet_.assign(alphabet.begin(), alphabet.end());
    }

    const std::vector<Trace>& traces() const noexcept { return traces_; }
    const Trace& operator[](std::size_t i) const { return traces_[i]; }
    // Distinct activity names, sorted.
    const std::vector<std::string>& alphabet() const noexcept { return alphabet_; }
    std::size_t size() const noexcept { return traces_.size(); }
    bool empty() const noexcept { return traces_.empty(); }

    std::size_t max_trace_len() const noexcept {
        std::size_t m = 0;
        for (const auto& t : traces_) m = std::max(m, t.size());
        return m;
    }

    bool operator==(const EventLog&) const = default;

private:
    std::vector<Trace> traces_;
    std::vector<std::string> alphabet_;
};

// ---------------------------------------------------------------------------
// XES

namespace detail {

class XesBuilder {
public:
    std::vector<Trace> traces;
    std::optional<std::string> error;

    void start(std::string_view name, const XML_Char** attrs) {
        ++depth_;
        if (name == "trace" && trace_depth_ == 0) {
            trace_depth_ = depth_;
            current_ = Trace{};
            trace_name_.reset();
            ++trace_index_;
            return;
        }
        if (trace_depth_ == 0) return;
        if (name == "event" && depth_ == trace_depth_ + 1) {
            event_depth_ = depth_;
            event_ = PendingEvent{};
            return;
        }
        const bool on_trace = event_depth_ == 0 && depth_ == trace_depth_ + 1;
        const bool on_event = event_depth_ != 0 && depth_ == event_depth_ + 1;
        if (!on_trace && !on_event) return;

        std::string key;
        std::optional<std::string> value;
        for (std::size_t i = 0; attrs[i] != nullptr; i += 2) {
            const std::string_view k = attrs[i];
            if (k == "key") key = attrs[i + 1];
            else if (k == "value") value = attrs[i + 1];
        }
        if (key.empty() || !value) return;

        if (on_trace) {
            if (key == "concept:name") trace_name_ = *value;
            else if (auto v = typed(name, *value)) current_.case_attributes[key] = std::move(*v);
            return;
        }
        if (key == "concept:name") {
            event_.activity = *value;
        } else if (key == "time:timestamp") {
            event_.timestamp = parse_iso8601(*value);
            if (!event_.timestamp)
                fail("unparseable time:timestamp '" + *value + "' in event " +
                     std::to_string(event_index_ + 1) + " of trace " + std::to_string(trace_index_));
        } else if (auto v = typed(name, *value)) {
            event_.attributes[key] = std::move(*v);
        }
    }

    void end(std::string_view name) {
        if (event_depth_ != 0 && depth_ == event_depth_ && name == "event") {
            finish_event();
            event_depth_ = 0;
        } else if (trace_depth_ != 0 && depth_ == trace_depth_ && name == "trace") {
            current_.case_id = trace_name_ ? *trace_name_ : std::to_string(trace_index_);
            for (auto& e : current_.events) e.case_id = current_.case_id;
            traces.push_back(std::move(current_));
            trace_depth_ = 0;
            event_index_ = 0;
        }
        --depth_;
    }

private:
    struct PendingEvent {
        std::optional<std::string> activity;
        std::optional<Timestamp> timestamp;
        AttributeMap attributes;
    };

    void fail(std::string message) {
        if (!error) error = std::move(message);
    }

    void finish_event() {
        ++event_index_;
        const std::string where =
            " (event " + std::to_string(event_index_) + " of trace " + std::to_string(trace_index_) + ")";
        if (!event_.activity || event_.activity->empty()) {
            fail("event missing concept:name" + where);
            return;
        }
        if (!event_.timestamp) {
            fail("event missing time:timestamp" + where);
            return;
        }
        current_.events.push_back(
            Event{std::move(*event_.activity), {}, *event_.timestamp, std::move(event_.attributes)});
    }

    static std::optional<AttributeValue> typed(std::string_view element, const std::string& value) {
        if (element == "int") {
            std::int64_t v{};
            const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
            if (res.ec == std::errc{} && res.ptr == value.data() + value.size()) return v;
            return value;
        }
        if (element == "float") {
            double v{};
            const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
            if (res.ec == std::errc{} && res.ptr == value.data() + value.size()) return v;
            return value;
        }
        if (element == "boolean") return value == "true" || value == "1";
        if (element == "string" || element == "id" || element == "date") return value;
        return std::nullopt;  // list / container
    }

    int depth_ = 0;
    int trace_depth_ = 0;
    int event_depth_ = 0;
    std::size_t trace_index_ = 0;
    std::size_t event_index_ = 0;
    Trace current_;
    std::optional<std::string> trace_name_;
    PendingEvent event_;
};

}  // namespace detail

// Reads an XES document. Trace and event indices in error messages are 1-based.
inline EventLog parse_xes(std::istream& in) {
    struct ParserHandle {
        XML_Parser p = XML_ParserCreate("UTF-8");
        ~ParserHandle() { XML_ParserFree(p); }
    } handle;
    XML_Parser parser = handle.p;
    if (parser == nullptr) throw Error("cannot allocate XML parser");

    detail::XesBuilder builder;
    XML_SetUserData(parser, &builder);
    XML_SetElementHandler(
        parser,
        [](void* data, const XML_Char* name, const XML_Char** attrs) {
            static_cast<detail::XesBuilder*>(data)->start(name, attrs);
        },
        [](void* data, const XML_Char* name) { static_cast<detail::XesBuilder*>(data)->end(name); });

    std::vector<char> buf(1 << 16);
    for (;;) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        const auto got = static_cast<int>(in.gcount());
        const bool last = got == 0 || in.eof();
        if (XML_Parse(parser, buf.data(), got, last ? 1 : 0) == XML_STATUS_ERROR) {
            throw ParseError(std::string("malformed XML: ") + XML_ErrorString(XML_GetErrorCode(parser)),
                             XML_GetCurrentLineNumber(parser), XML_GetCurrentColumnNumber(parser) + 1);
        }
        if (builder.error) throw ParseError(*builder.error);
        if (last) break;
    }
    return EventLog(std::move(builder.traces));
}

// ---------------------------------------------------------------------------
// CSV

struct CsvMapping {
    std::string case_column = "case_id";
    std::string activity_column = "activity";
    std::string timestamp_column = "timestamp";
    // "iso8601" or a strptime(3) format string interpreted as UTC.
    std::string timestamp_format = "iso8601";
};

namespace detail {

// Unquoted cells: integers and reals become numbers, true/false become booleans,
// anything else stays a string. Quoted cells are always strings.
inline AttributeValue infer_value(const csv::Field& f) {
    if (f.quoted) return f.text;
    const std::string& s = f.text;
    if (s == "true") return true;
    if (s == "false") return false;
    const char c0 = s.empty() ? '\0' : s[0];
    const bool numeric_start = (c0 >= '0' && c0 <= '9') || c0 == '-' || c0 == '+' || c0 == '.';
    if (numeric_start) {
        const char* first = s.data() + (c0 == '+' ? 1 : 0);
        const char* last = s.data() + s.size();
        std::int64_t iv{};
        auto r = std::from_chars(first, last, iv);
        if (r.ec == std::errc{} && r.ptr == last) return iv;
        double dv{};
        auto rd = std::from_chars(first, last, dv);
        if (rd.ec == std::errc{} && rd.ptr == last) return dv;
    }
    return s;
}

}  // namespace detail

// Reads a CSV event log. Columns other than the mapped three become event
// attributes; a column named "case:<key>" becomes case attribute <key>.
// Empty unquoted cells are treated as missing.
inline EventLog parse_csv(std::istream& in, const CsvMapping& mapping = {}) {
    csv::Reader reader(in);
    const auto header = reader.next();
    if (!header) throw ParseError("no traces: empty input");

    auto find = [&](const std::string& name) -> std::size_t {
        for (std::size_t i = 0; i < header->size(); ++i)
            if ((*header)[i].text == name) return i;
        throw ConfigError("mapped column '" + name + "' not found in CSV header");
    };
    const std::size_t case_col = find(mapping.case_column);
    const std::size_t act_col = find(mapping.activity_column);
    const std::size_t time_col = find(mapping.timestamp_column);

    struct Extra {
        std::size_t index;
        std::string key;
        bool case_level;
    };
    std::vector<Extra> extras;
    for (std::size_t i = 0; i < header->size(); ++i) {
        if (i == case_col || i == act_col || i == time_col) continue;
        const std::string& name = (*header)[i].text;
        if (name.rfind("case:", 0) == 0) extras.push_back({i, name.substr(5), true});
        else extras.push_back({i, name, false});
    }

    std::vector<Trace> traces;
    std::unordered_map<std::string, std::size_t> by_case;
    while (auto rec = reader.next()) {
        const std::size_t line = reader.line();
        if (rec->size() != header->size())
            throw ParseError("expected " + std::to_string(header->size()) + " fields, found " +
                             std::to_string(rec->size()),
                             line);
        const std::string& case_id = (*rec)[case_col].text;
        const std::string& activity = (*rec)[act_col].text;
        if (case_id.empty()) throw ParseError("empty case id", line);
        if (activity.empty()) throw ParseError("empty activity", line);
        const auto ts = parse_timestamp((*rec)[time_col].text, mapping.timestamp_format);
        if (!ts) throw ParseError("unparseable timestamp '" + (*rec)[time_col].text + "'", line);

        auto [it, inserted] = by_case.try_emplace(case_id, traces.size());
        if (inserted) traces.push_back(Trace{case_id, {}, {}});
        Trace& trace = traces[it->second];

        Event ev{activity, case_id, *ts, {}};
        for (const Extra& x : extras) {
            const csv::Field& f = (*rec)[x.index];
            if (f.text.empty() && !f.quoted) continue;
            if (x.case_level) trace.case_attributes.try_emplace(x.key, detail::infer_value(f));
            else ev.attributes.emplace(x.key, detail::infer_value(f));
        }
        trace.events.push_back(std::move(ev));
    }
    if (traces.empty()) throw ParseError("no traces");
    return EventLog(std::move(traces));
}

// Canonical CSV: case_id, activity, timestamp (UTC ISO-8601), then case
// attributes as "case:<key>", then event attributes, keys sorted. Strings are
// always quoted, so parse_csv restores every attribute with its type.
inline void write_canonical_csv(const EventLog& log, std::ostream& out) {
    std::set<std::string> case_keys;
    std::set<std::string> event_keys;
    for (const auto& t : log.traces()) {
        for (const auto& [k, v] : t.case_attributes) case_keys.insert(k);
        for (const auto& e : t.events)
            for (const auto& [k, v] : e.attributes) event_keys.insert(k);
    }
    out << "case_id,activity,timestamp";
    for (const auto& k : case_keys) {
        out << ',';
        csv::write_field(out, "case:" + k);
    }
    for (const auto& k : event_keys) {
        out << ',';
        csv::write_field(out, k);
    }
    out << '\n';

    auto cell = [&](const AttributeMap& m, const std::string& key) {
        out << ',';
        const auto it = m.find(key);
        if (it == m.end()) return;
        const bool is_string = std::holds_alternative<std::string>(it->second);
        csv::write_field(out, to_string(it->second), is_string);
    };
    for (const auto& t : log.traces()) {
        for (const auto& e : t.events) {
            csv::write_field(out, t.case_id, true);
            out << ',';
            csv::write_field(out, e.activity, true);
            out << ',' << format_iso8601(e.timestamp);
            for (const auto& k : case_keys) cell(t.case_attributes, k);
            for (const auto& k : event_keys) cell(e.attributes, k);
            out << '\n';
        }
    }
}

enum class LogFormat { Xes, Csv };

inline EventLog read_log(const std::string& path, LogFormat format, const CsvMapping& mapping = {}) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open input file '" + path + "'");
    return format == LogFormat::Xes ? parse_xes(in) : parse_csv(in, mapping);
}

// ---------------------------------------------------------------------------
// Variant split

enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };

struct Predicate {
    CompareOp op = CompareOp::Eq;
    std::string operand;
};

struct SplitRule {
    Predicate first;
    Predicate second;
};

inline std::string_view op_name(CompareOp op) {
    switch (op) {
        case CompareOp::Eq: return "eq";
        case CompareOp::Ne: return "ne";
        case CompareOp::Lt: return "lt";
        case CompareOp::Le: return "le";
        case CompareOp::Gt: return "gt";
        case CompareOp::Ge: return "ge";
    }
    return "?";
}

// Parses "ge:50,lt:50" or "eq:A,eq:B".
inline SplitRule parse_split_rule(std::string_view text) {
    auto parse_pred = [](std::string_view s) {
        const auto colon = s.find(':');
        if (colon == std::string_view::npos) throw ConfigError("split predicate '" + std::string(s) + "' lacks ':'");
        const std::string_view name = s.substr(0, colon);
        Predicate p;
        p.operand = std::string(s.substr(colon + 1));
        if (name == "eq") p.op = CompareOp::Eq;
        else if (name == "ne") p.op = CompareOp::Ne;
        else if (name == "lt") p.op = CompareOp::Lt;
        else if (name == "le") p.op = CompareOp::Le;
        else if (name == "gt") p.op = CompareOp::Gt;
        else if (name == "ge") p.op = CompareOp::Ge;
        else throw ConfigError("unknown comparison '" + std::string(name) + "'");
        return p;
    };
    const auto comma = text.find(',');
    if (comma == std::string_view::npos) throw ConfigError("split rule needs two predicates separated by ','");
    return {parse_pred(text.substr(0, comma)), parse_pred(text.substr(comma + 1))};
}

namespace detail {

inline std::optional<double> as_number(std::string_view s) {
    double v{};
    if (s.empty()) return std::nullopt;
    const char* first = s.data() + (s[0] == '+' ? 1 : 0);
    const auto r = std::from_chars(first, s.data() + s.size(), v);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

template <typename T>
bool compare(const T& a, CompareOp op, const T& b) {
    switch (op) {
        case CompareOp::Eq: return a == b;
        case CompareOp::Ne: return a != b;
        case CompareOp::Lt: return a < b;
        case CompareOp::Le: return a <= b;
        case CompareOp::Gt: return a > b;
        case CompareOp::Ge: return a >= b;
    }
    return false;
}

}  // namespace detail

// Numbers compare numerically against numeric operands (strings that look like
// numbers too); everything else compares as text.
inline bool matches(const AttributeValue& value, const Predicate& p) {
    const auto operand_num = detail::as_number(p.operand);
    std::optional<double> value_num;
    if (const auto* i = std::get_if<std::int64_t>(&value)) value_num = static_cast<double>(*i);
    else if (const auto* d = std::get_if<double>(&value)) value_num = *d;
    else if (const auto* s = std::get_if<std::string>(&value)) value_num = detail::as_number(*s);
    if (value_num && operand_num) return detail::compare(*value_num, p.op, *operand_num);
    if (const auto* b = std::get_if<bool>(&value)) {
        const bool ob = p.operand == "true" || p.operand == "1";
        return detail::compare(*b, p.op, ob);
    }
    return detail::compare(to_string(value), p.op, p.operand);
}

// Case attributes first, then the first event carrying the key.
inline const AttributeValue* resolve_attribute(const Trace& trace, const std::string& key) {
    if (auto it = trace.case_attributes.find(key); it != trace.case_attributes.end()) return &it->second;
    for (const auto& e : trace.events)
        if (auto it = e.attributes.find(key); it != e.attributes.end()) return &it->second;
    return nullptr;
}

struct VariantSplit {
    EventLog variant1;
    EventLog variant2;
    std::string predicate_description;
    // Union of both alphabets, sorted.
    std::vector<std::string> universal_alphabet;
    std::size_t max_trace_len = 0;
    std::size_t dropped_unmatched = 0;
    std::size_t dropped_missing = 0;

    std::size_t dropped() const noexcept { return dropped_unmatched + dropped_missing; }
};

// Builds a split from two already-separated logs.
inline VariantSplit make_split(EventLog v1, EventLog v2, std::string description = "variant1 | variant2") {
    if (v1.empty() || v2.empty())
        throw DegenerateError(std::string("degenerate split: variant ") + (v1.empty() ? "1" : "2") + " is empty");
    VariantSplit s;
    std::set<std::string> alpha(v1.alphabet().begin(), v1.alphabet().end());
    alpha.insert(v2.alphabet().begin(), v2.alphabet().end());
    s.universal_alphabet.assign(alpha.begin(), alpha.end());
    s.max_trace_len = std::max(v1.max_trace_len(), v2.max_trace_len());
    s.variant1 = std::move(v1);
    s.variant2 = std::move(v2);
    s.predicate_description = std::move(description);
    return s;
}

inline VariantSplit split_variants(const EventLog& log, const std::string& attribute, const SplitRule& rule) {
    std::vector<Trace> first, second;
    std::size_t missing = 0, unmatched = 0;
    for (const Trace& t : log.traces()) {
        const AttributeValue* v = resolve_attribute(t, attribute);
        if (v == nullptr) {
            ++missing;
            continue;
        }
        const bool a = matches(*v, rule.first);
        const bool b = matches(*v, rule.second);
        if (a && b)
            throw ConfigError("split predicates overlap: case '" + t.case_id + "' with " + attribute + "=" +
                              to_string(*v) + " matches both");
        if (a) first.push_back(t);
        else if (b) second.push_back(t);
        else ++unmatched;
    }
    if (missing == log.size()) throw ConfigError("attribute '" + attribute + "' is absent from every trace");
    const std::string description = attribute + " " + std::string(op_name(rule.first.op)) + " " +
                                    rule.first.operand + " | " + attribute + " " +
                                    std::string(op_name(rule.second.op)) + " " + rule.second.operand;
    VariantSplit s = make_split(EventLog(std::move(first)), EventLog(std::move(second)), description);
    s.dropped_missing = missing;
    s.dropped_unmatched = unmatched;
    return s;
}

}  // namespace pvfp
