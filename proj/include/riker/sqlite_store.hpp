#pragma once

#include <string>

#include "riker/ground_truth.hpp"

namespace riker {

// Persists the full store (pools, leases, field reports, HR evaluations)
// to a single SQLite3 file; schema is documented in the repo README.
void save_store(const GroundTruthStore& store, const std::string& path);
GroundTruthStore load_store(const std::string& path);

}  // namespace riker
