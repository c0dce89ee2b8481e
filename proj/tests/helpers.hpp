#pragma once

// Shared fixtures and independent oracles for the test suites.

#include <cctype>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "pvfp/eventlog.hpp"

namespace testutil {

inline pvfp::Timestamp day(double d) {
    return pvfp::Timestamp{} + std::chrono::hours(24 * 19723) +
           std::chrono::microseconds(static_cast<std::int64_t>(d * 86400e6));
}

// Events one day apart unless explicit offsets (in days) are given.
inline pvfp::Trace trace(const std::string& id, const std::vector<std::string>& acts,
                         const std::vector<double>& offsets = {}) {
    pvfp::Trace t;
    t.case_id = id;
    for (std::size_t i = 0; i < acts.size(); ++i)
        t.events.push_back({acts[i], id, day(offsets.empty() ? static_cast<double>(i) : offsets[i]), {}});
    return t;
}

inline pvfp::EventLog log_of(const std::vector<std::vector<std::string>>& seqs, const std::string& prefix = "c") {
    std::vector<pvfp::Trace> ts;
    for (std::size_t i = 0; i < seqs.size(); ++i) ts.push_back(trace(prefix + std::to_string(i + 1), seqs[i]));
    return pvfp::EventLog(std::move(ts));
}

// Brute-force bigram counts: (occurrences, traces containing).
inline std::map<std::pair<std::string, std::string>, std::pair<std::size_t, std::size_t>> bigram_counts(
    const pvfp::EventLog& log) {
    std::map<std::pair<std::string, std::string>, std::pair<std::size_t, std::size_t>> out;
    for (const auto& t : log.traces()) {
        std::map<std::pair<std::string, std::string>, bool> seen;
        for (std::size_t i = 1; i < t.events.size(); ++i) {
            const auto key = std::make_pair(t.events[i - 1].activity, t.events[i].activity);
            out[key].first++;
            if (!seen[key]) {
                seen[key] = true;
                out[key].second++;
            }
        }
    }
    return out;
}

inline pvfp::EventLog random_log(std::mt19937_64& gen, std::size_t n_traces, std::size_t max_len,
                                 const std::string& prefix = "r") {
    const std::vector<std::string> alphabet{"a", "b", "c", "d", "e"};
    std::vector<std::vector<std::string>> seqs;
    for (std::size_t i = 0; i < n_traces; ++i) {
        std::vector<std::string> s(1 + gen() % max_len);
        for (auto& a : s) a = alphabet[gen() % alphabet.size()];
        seqs.push_back(std::move(s));
    }
    return log_of(seqs, prefix);
}

// Minimal recursive-descent checker for the DOT subset:
// graph := ["strict"] ("digraph"|"graph") [id] "{" stmt* "}"
// stmt  := (attr_stmt | edge_or_node | id "=" id) [";"]
class DotChecker {
public:
    explicit DotChecker(std::string text) : s_(std::move(text)) {}

    bool valid() {
        try {
            skip();
            if (peek_word() == "strict") word();
            const std::string kind = word();
            if (kind != "digraph" && kind != "graph") return false;
            directed_ = kind == "digraph";
            skip();
            if (cur() != '{') id();
            expect('{');
            while (true) {
                skip();
                if (cur() == '}') break;
                stmt();
            }
            expect('}');
            skip();
            return pos_ == s_.size();
        } catch (const std::exception&) {
            return false;
        }
    }

private:
    char cur() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    void expect(char c) {
        skip();
        if (cur() != c) throw std::runtime_error("expected token");
        ++pos_;
    }
    std::string peek_word() {
        const auto save = pos_;
        std::string w;
        while (std::isalpha(static_cast<unsigned char>(cur()))) w += s_[pos_++];
        pos_ = save;
        return w;
    }
    std::string word() {
        skip();
        std::string w;
        while (std::isalnum(static_cast<unsigned char>(cur())) || cur() == '_') w += s_[pos_++];
        if (w.empty()) throw std::runtime_error("expected word");
        return w;
    }
    std::string id() {
        skip();
        if (cur() == '"') {
            ++pos_;
            std::string v;
            while (cur() != '"') {
                if (cur() == '\0') throw std::runtime_error("unterminated string");
                if (cur() == '\\') ++pos_;
                v += s_[pos_++];
            }
            ++pos_;
            return v;
        }
        if (std::isdigit(static_cast<unsigned char>(cur())) || cur() == '-' || cur() == '.') {
            std::string v;
            while (std::isdigit(static_cast<unsigned char>(cur())) || cur() == '-' || cur() == '.') v += s_[pos_++];
            return v;
        }
        return word();
    }
    void attr_list() {
        expect('[');
        while (true) {
            skip();
            if (cur() == ']') break;
            id();
            expect('=');
            id();
            skip();
            if (cur() == ',' || cur() == ';') ++pos_;
        }
        expect(']');
    }
    void stmt() {
        skip();
        const std::string first = id();
        skip();
        if ((first == "node" || first == "edge" || first == "graph") && cur() == '[') {
            attr_list();
        } else if (cur() == '=') {
            ++pos_;
            id();
        } else {
            skip();
            while (s_.compare(pos_, 2, directed_ ? "->" : "--") == 0) {
                pos_ += 2;
                id();
                skip();
            }
            if (cur() == '[') attr_list();
        }
        skip();
        if (cur() == ';') ++pos_;
    }

    std::string s_;
    std::size_t pos_ = 0;
    bool directed_ = true;
};

inline std::filesystem::path temp_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("pvfp_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

}  // namespace testutil
