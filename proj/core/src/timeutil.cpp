#include "tidp/timeutil.hpp"

#include <cctype>
#include <cstdio>

namespace tidp {

namespace {

// Days since 1970-01-01 for a civil date (proleptic Gregorian).
std::int64_t days_from_civil(std::int64_t y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2) / 5 + static_cast<unsigned>(d) - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y += m <= 2;
}

bool read_digits(std::string_view text, std::size_t& pos, int count, int& out) {
    out = 0;
    for (int i = 0; i < count; ++i) {
        if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos]))) return false;
        out = out * 10 + (text[pos] - '0');
        ++pos;
    }
    return true;
}

bool days_in_month_ok(int y, int m, int d) {
    static const int lengths[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m < 1 || m > 12 || d < 1) return false;
    int len = lengths[m - 1];
    const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
    if (m == 2 && leap) len = 29;
    return d <= len;
}

}  // namespace

std::optional<EpochMinutes> parse_iso8601_minutes(std::string_view text) {
    std::size_t pos = 0;
    int year, month, day, hour, minute;
    if (!read_digits(text, pos, 4, year)) return std::nullopt;
    if (pos >= text.size() || text[pos] != '-') return std::nullopt;
    ++pos;
    if (!read_digits(text, pos, 2, month)) return std::nullopt;
    if (pos >= text.size() || text[pos] != '-') return std::nullopt;
    ++pos;
    if (!read_digits(text, pos, 2, day)) return std::nullopt;
    if (pos >= text.size() || (text[pos] != 'T' && text[pos] != ' ')) return std::nullopt;
    ++pos;
    if (!read_digits(text, pos, 2, hour)) return std::nullopt;
    if (pos >= text.size() || text[pos] != ':') return std::nullopt;
    ++pos;
    if (!read_digits(text, pos, 2, minute)) return std::nullopt;
    if (pos < text.size() && text[pos] == ':') {
        ++pos;
        int second;
        if (!read_digits(text, pos, 2, second)) return std::nullopt;
        if (second > 59) return std::nullopt;
    }
    if (pos < text.size() && text[pos] == 'Z') ++pos;
    if (pos != text.size()) return std::nullopt;
    if (!days_in_month_ok(year, month, day)) return std::nullopt;
    if (hour > 23 || minute > 59) return std::nullopt;
    return days_from_civil(year, month, day) * 1440 + hour * 60 + minute;
}

std::string format_iso8601_minutes(EpochMinutes minutes) {
    std::int64_t days = minutes / 1440;
    std::int64_t rem = minutes % 1440;
    if (rem < 0) {
        rem += 1440;
        --days;
    }
    std::int64_t year;
    int month, day;
    civil_from_days(days, year, month, day);
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%04lld-%02d-%02dT%02d:%02d",
                  static_cast<long long>(year), month, day,
                  static_cast<int>(rem / 60), static_cast<int>(rem % 60));
    return buf;
}

}  // namespace tidp
