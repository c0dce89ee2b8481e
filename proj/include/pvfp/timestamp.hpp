#pragma once

#include <charconv>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <optional>
#include <string>
#include <string_view>

#include "pvfp/error.hpp"

namespace pvfp {

using Timestamp = std::chrono::sys_time<std::chrono::microseconds>;

namespace detail {

// Days since 1970-01-01 for a proleptic Gregorian date (H. Hinnant's algorithm).
constexpr std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) noexcept {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const auto yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m > 2 ? m - 3 : m + 9) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

struct CivilDate {
    std::int64_t year;
    unsigned month;
    unsigned day;
};

constexpr CivilDate civil_from_days(std::int64_t z) noexcept {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const auto doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp < 10 ? mp + 3 : mp - 9;
    return {y + (m <= 2), m, d};
}

constexpr bool is_leap(std::int64_t y) noexcept {
    return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

constexpr unsigned days_in_month(std::int64_t y, unsigned m) noexcept {
    constexpr unsigned table[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    return m == 2 && is_leap(y) ? 29 : table[m - 1];
}

class Cursor {
public:
    explicit Cursor(std::string_view s) : s_(s) {}

    bool done() const { return pos_ >= s_.size(); }
    char peek() const { return done() ? '\0' : s_[pos_]; }
    bool eat(char c) {
        if (peek() != c) return false;
        ++pos_;
        return true;
    }
    // Reads exactly `width` digits.
    std::optional<int> digits(std::size_t width) {
        if (pos_ + width > s_.size()) return std::nullopt;
        int value = 0;
        for (std::size_t i = 0; i < width; ++i) {
            const char c = s_[pos_ + i];
            if (c < '0' || c > '9') return std::nullopt;
            value = value * 10 + (c - '0');
        }
        pos_ += width;
        return value;
    }
    // Fraction digits after a '.', scaled to microseconds (extra digits truncated).
    std::optional<std::int64_t> fraction_micros() {
        std::int64_t micros = 0;
        std::size_t n = 0;
        while (!done() && peek() >= '0' && peek() <= '9') {
            if (n < 6) micros = micros * 10 + (peek() - '0');
            ++n;
            ++pos_;
        }
        if (n == 0) return std::nullopt;
        for (std::size_t i = n; i < 6; ++i) micros *= 10;
        return micros;
    }

private:
    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace detail

// Parses ISO-8601 date-times: YYYY-MM-DD[(T| )hh:mm[:ss[.f+]]][Z|(+|-)hh[:]mm].
// A missing offset is read as UTC.
inline std::optional<Timestamp> parse_iso8601(std::string_view text) {
    detail::Cursor c(text);
    const auto year = c.digits(4);
    if (!year || !c.eat('-')) return std::nullopt;
    const auto month = c.digits(2);
    if (!month || !c.eat('-')) return std::nullopt;
    const auto day = c.digits(2);
    if (!day) return std::nullopt;
    if (*month < 1 || *month > 12) return std::nullopt;
    if (*day < 1 || static_cast<unsigned>(*day) > detail::days_in_month(*year, *month)) return std::nullopt;

    int hour = 0, minute = 0, second = 0;
    std::int64_t micros = 0;
    std::int64_t offset_minutes = 0;
    if (c.eat('T') || c.eat(' ')) {
        const auto h = c.digits(2);
        if (!h || !c.eat(':')) return std::nullopt;
        const auto mi = c.digits(2);
        if (!mi) return std::nullopt;
        hour = *h;
        minute = *mi;
        if (c.eat(':')) {
            const auto s = c.digits(2);
            if (!s) return std::nullopt;
            second = *s;
            if (c.eat('.') || c.eat(',')) {
                const auto f = c.fraction_micros();
                if (!f) return std::nullopt;
                micros = *f;
            }
        }
        if (hour > 23 || minute > 59 || second > 60) return std::nullopt;
        if (c.eat('Z')) {
        } else if (c.peek() == '+' || c.peek() == '-') {
            const int sign = c.peek() == '-' ? -1 : 1;
            c.eat(c.peek());
            const auto oh = c.digits(2);
            if (!oh) return std::nullopt;
            c.eat(':');
            const auto om = c.digits(2);
            if (!om || *oh > 23 || *om > 59) return std::nullopt;
            offset_minutes = sign * (*oh * 60 + *om);
        }
    }
    if (!c.done()) return std::nullopt;

    const std::int64_t days = detail::days_from_civil(*year, static_cast<unsigned>(*month),
                                                      static_cast<unsigned>(*day));
    const std::int64_t secs = days * 86400 + hour * 3600 + minute * 60 + second - offset_minutes * 60;
    return Timestamp{std::chrono::microseconds{secs * 1'000'000 + micros}};
}

// Canonical UTC rendering; the fraction is omitted when zero and printed with
// millisecond or microsecond precision otherwise. parse_iso8601 inverts it exactly.
inline std::string format_iso8601(Timestamp t) {
    const std::int64_t us = t.time_since_epoch().count();
    std::int64_t secs = us / 1'000'000;
    std::int64_t frac = us % 1'000'000;
    if (frac < 0) {
        frac += 1'000'000;
        secs -= 1;
    }
    std::int64_t days = secs / 86400;
    std::int64_t rem = secs % 86400;
    if (rem < 0) {
        rem += 86400;
        days -= 1;
    }
    const auto date = detail::civil_from_days(days);
    char buf[64];
    int n = std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02lld:%02lld:%02lld",
                          static_cast<long long>(date.year), date.month, date.day,
                          static_cast<long long>(rem / 3600), static_cast<long long>(rem / 60 % 60),
                          static_cast<long long>(rem % 60));
    if (frac != 0) {
        if (frac % 1000 == 0)
            n += std::snprintf(buf + n, sizeof buf - n, ".%03lld", static_cast<long long>(frac / 1000));
        else
            n += std::snprintf(buf + n, sizeof buf - n, ".%06lld", static_cast<long long>(frac));
    }
    std::snprintf(buf + n, sizeof buf - n, "Z");
    return buf;
}

// Parses with a strptime(3) format; the result is interpreted as UTC.
// The special format "iso8601" selects parse_iso8601.
inline std::optional<Timestamp> parse_timestamp(std::string_view text, const std::string& format) {
    if (format.empty() || format == "iso8601") return parse_iso8601(text);
    std::tm tm{};
    const std::string owned(text);
    const char* end = ::strptime(owned.c_str(), format.c_str(), &tm);
    if (end == nullptr || *end != '\0') return std::nullopt;
    const std::int64_t days = detail::days_from_civil(tm.tm_year + 1900, static_cast<unsigned>(tm.tm_mon + 1),
                                                      static_cast<unsigned>(tm.tm_mday));
    const std::int64_t secs = days * 86400 + tm.tm_hour * 3600 + tm.tm_min * 60 + tm.tm_sec;
    return Timestamp{std::chrono::microseconds{secs * 1'000'000}};
}

// Signed difference b - a in fractional days.
inline double days_between(Timestamp a, Timestamp b) {
    return std::chrono::duration<double, std::ratio<86400>>(b - a).count();
}

}  // namespace pvfp
