#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace riker {

// Currency amounts are integer cents throughout; formatting happens only at
// document-render and report time.
using Cents = std::int64_t;

// Canonical corpus surface form: "$1,250.00".
std::string format_money(Cents cents);

// Plain integer-with-commas rendering ("1,250") for counts in prose.
std::string format_thousands(std::int64_t v);

}  // namespace riker
