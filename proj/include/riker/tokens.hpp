#pragma once

#include <string>

namespace riker {

// Default token heuristic: ceil(byte_length / 4). An exact tokenizer can be
// plugged in wherever a TokenEstimator is accepted.
using TokenEstimator = int (*)(const std::string&);

int estimate_tokens(const std::string& text);

}  // namespace riker
