#pragma once

#include <charconv>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "pvfp/error.hpp"

namespace pvfp::csv {

struct Field {
    std::string text;
    bool quoted = false;
};

using Record = std::vector<Field>;

// RFC 4180 reader: comma separated, double-quote quoting, "" escapes, CRLF or LF.
class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    // Returns the next record, or nullopt at end of input. Blank lines are skipped.
    std::optional<Record> next() {
        for (;;) {
            if (in_.peek() == std::char_traits<char>::eof()) return std::nullopt;
            record_line_ = line_;
            Record rec;
            Field field;
            bool in_quotes = false;
            bool after_quote = false;
            bool any = false;
            for (;;) {
                const int ch = in_.get();
                if (ch == std::char_traits<char>::eof()) {
                    if (in_quotes) throw ParseError("unterminated quoted field", record_line_);
                    break;
                }
                any = true;
                const char c = static_cast<char>(ch);
                if (in_quotes) {
                    if (c == '"') {
                        if (in_.peek() == '"') {
                            in_.get();
                            field.text.push_back('"');
                        } else {
                            in_quotes = false;
                            after_quote = true;
                        }
                    } else {
                        if (c == '\n') ++line_;
                        field.text.push_back(c);
                    }
                    continue;
                }
                if (c == ',') {
                    rec.push_back(std::move(field));
                    field = Field{};
                    after_quote = false;
                } else if (c == '\n') {
                    ++line_;
                    break;
                } else if (c == '\r') {
                    if (in_.peek() == '\n') continue;
                    ++line_;
                    break;
                } else if (c == '"' && field.text.empty() && !field.quoted) {
                    in_quotes = true;
                    field.quoted = true;
                } else {
                    if (after_quote) throw ParseError("unexpected character after closing quote", line_);
                    field.text.push_back(c);
                }
            }
            if (!any) return std::nullopt;
            rec.push_back(std::move(field));
            if (rec.size() == 1 && rec[0].text.empty() && !rec[0].quoted) continue;
            return rec;
        }
    }

    // 1-based line on which the last returned record started.
    std::size_t line() const noexcept { return record_line_; }

private:
    std::istream& in_;
    std::size_t line_ = 1;
    std::size_t record_line_ = 1;
};

inline bool needs_quotes(std::string_view s) {
    return s.find_first_of(",\"\r\n") != std::string_view::npos;
}

// Writes a field, quoting when required or when `force_quotes` is set.
inline void write_field(std::ostream& out, std::string_view s, bool force_quotes = false) {
    if (!force_quotes && !needs_quotes(s)) {
        out << s;
        return;
    }
    out << '"';
    for (const char c : s) {
        if (c == '"') out << '"';
        out << c;
    }
    out << '"';
}

inline void write_row(std::ostream& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out << ',';
        write_field(out, fields[i]);
    }
    out << '\n';
}

// Shortest text that parses back to the same double.
inline std::string number(double v) {
    if (v == 0.0) return "0";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace pvfp::csv
