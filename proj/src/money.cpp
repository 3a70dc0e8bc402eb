#include "riker/money.hpp"

#include <cstdio>
#include <cstdlib>

namespace riker {

std::string format_thousands(std::int64_t v) {
  bool neg = v < 0;
  std::string digits = std::to_string(neg ? -v : v);
  std::string out;
  int c = 0;
  for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
    if (c && c % 3 == 0) out.push_back(',');
    out.push_back(*it);
    ++c;
  }
  if (neg) out.push_back('-');
  return {out.rbegin(), out.rend()};
}

std::string format_money(Cents cents) {
  bool neg = cents < 0;
  Cents a = neg ? -cents : cents;
  char frac[8];
  std::snprintf(frac, sizeof frac, "%02lld", static_cast<long long>(a % 100));
  return std::string(neg ? "-$" : "$") + format_thousands(a / 100) + "." +
         frac;
}

}  // namespace riker
