#include "riker/dates.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <sstream>

namespace riker {

namespace {

constexpr std::array<const char*, 12> kMonthNames = {
    "January", "February", "March",     "April",   "May",      "June",
    "July",    "August",   "September", "October", "November", "December"};

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int month_from_name(const std::string& name) {
  std::string lower;
  for (char c : name) lower.push_back(static_cast<char>(std::tolower(c)));
  for (int m = 0; m < 12; ++m) {
    std::string full = kMonthNames[m];
    std::string fl;
    for (char c : full) fl.push_back(static_cast<char>(std::tolower(c)));
    if (lower == fl || (lower.size() >= 3 && fl.substr(0, 3) == lower))
      return m + 1;
  }
  return 0;
}

}  // namespace

int days_in_month(int year, int month) {
  static constexpr std::array<int, 12> d = {31, 28, 31, 30, 31, 30,
                                            31, 31, 30, 31, 30, 31};
  if (month == 2 && is_leap(year)) return 29;
  return d[month - 1];
}

bool is_valid_date(const Date& d) {
  return d.month >= 1 && d.month <= 12 && d.day >= 1 &&
         d.day <= days_in_month(d.year, d.month);
}

std::string Date::iso() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
  return buf;
}

std::string Date::long_form() const {
  std::ostringstream os;
  os << kMonthNames[month - 1] << ' ' << day << ", " << year;
  return os.str();
}

Date add_months_minus_one_day(const Date& start, int months) {
  int m0 = (start.year * 12 + (start.month - 1)) + months;
  Date d{m0 / 12, m0 % 12 + 1, start.day};
  d.day = std::min(d.day, days_in_month(d.year, d.month));
  // Back up one day.
  if (d.day > 1) {
    --d.day;
  } else {
    if (--d.month == 0) {
      d.month = 12;
      --d.year;
    }
    d.day = days_in_month(d.year, d.month);
  }
  return d;
}

int whole_months_between(const Date& start, const Date& end) {
  // Inverse of add_months_minus_one_day for the lease shapes we generate.
  Date next{end.year, end.month, end.day};
  if (++next.day > days_in_month(next.year, next.month)) {
    next.day = 1;
    if (++next.month == 13) {
      next.month = 1;
      ++next.year;
    }
  }
  return (next.year * 12 + next.month) - (start.year * 12 + start.month);
}

Date Quarter::first_day() const { return Date{year, (q - 1) * 3 + 1, 1}; }

Date Quarter::last_day() const {
  int m = q * 3;
  return Date{year, m, days_in_month(year, m)};
}

std::string Quarter::label() const {
  return "Q" + std::to_string(q) + " " + std::to_string(year);
}

std::optional<Date> parse_iso_date(const std::string& s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  Date d;
  auto num = [&](int b, int e, int& out) {
    auto [p, ec] = std::from_chars(s.data() + b, s.data() + e, out);
    return ec == std::errc{} && p == s.data() + e;
  };
  if (!num(0, 4, d.year) || !num(5, 7, d.month) || !num(8, 10, d.day))
    return std::nullopt;
  if (!is_valid_date(d)) return std::nullopt;
  return d;
}

std::optional<Date> parse_flexible_date(const std::string& raw) {
  std::string s = raw;
  // Trim and drop trailing period.
  auto notspace = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
  s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
  if (!s.empty() && s.back() == '.') s.pop_back();
  if (auto d = parse_iso_date(s)) return d;

  // "07/01/2024", month-first per corpus canonical declaration.
  {
    int m = 0, dd = 0, y = 0;
    char a = 0, b = 0;
    std::istringstream is(s);
    if (is >> m >> a >> dd >> b >> y && a == '/' && b == '/' && is.eof()) {
      Date d{y, m, dd};
      if (is_valid_date(d)) return d;
    }
  }

  // "July 1, 2024" or "1 July 2024".
  std::string t;
  for (char c : s) t.push_back(c == ',' ? ' ' : c);
  std::istringstream is(t);
  std::string w1, w2, w3;
  if (!(is >> w1 >> w2 >> w3)) return std::nullopt;
  std::string extra;
  if (is >> extra) return std::nullopt;
  auto to_int = [](const std::string& w, int& out) {
    auto [p, ec] = std::from_chars(w.data(), w.data() + w.size(), out);
    return ec == std::errc{} && p == w.data() + w.size();
  };
  Date d;
  if (int m = month_from_name(w1); m != 0) {
    d.month = m;
    if (!to_int(w2, d.day) || !to_int(w3, d.year)) return std::nullopt;
  } else if (int m2 = month_from_name(w2); m2 != 0) {
    d.month = m2;
    if (!to_int(w1, d.day) || !to_int(w3, d.year)) return std::nullopt;
  } else {
    return std::nullopt;
  }
  if (!is_valid_date(d)) return std::nullopt;
  return d;
}

}  // namespace riker
