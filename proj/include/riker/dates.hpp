#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>

namespace riker {

// Proleptic Gregorian calendar date. Stored exactly; all answer-key
// arithmetic is calendar arithmetic, never floating point.
struct Date {
  int year = 1970;
  int month = 1;  // 1..12
  int day = 1;    // 1..31

  auto operator<=>(const Date&) const = default;

  std::string iso() const;           // "2024-07-01"
  std::string long_form() const;     // "July 1, 2024"
};

bool is_valid_date(const Date& d);
int days_in_month(int year, int month);

// End of a lease running k whole months from start: start + k months - 1 day.
Date add_months_minus_one_day(const Date& start, int months);

// Whole months between start and end where end = start + k months - 1 day.
int whole_months_between(const Date& start, const Date& end);

struct Quarter {
  int year;
  int q;  // 1..4
  Date first_day() const;
  Date last_day() const;
  std::string label() const;  // "Q3 2024"
};

// ISO "YYYY-MM-DD"; nullopt on malformed input.
std::optional<Date> parse_iso_date(const std::string& s);

// Accepts the closed set of formats the scorer recognizes:
// ISO, "July 1, 2024", "1 July 2024", "07/01/2024" (month-first).
std::optional<Date> parse_flexible_date(const std::string& s);

}  // namespace riker
