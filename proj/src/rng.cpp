#include "riker/rng.hpp"

namespace riker {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t fnv1a(std::uint64_t h, const std::string& s) {
  for (unsigned char c : s) {
    h ^= c;
    h *= kFnvPrime;
  }
  // Separator so ["ab","c"] and ["a","bc"] hash differently.
  h ^= 0x1f;
  h *= kFnvPrime;
  return h;
}

std::uint64_t splitmix_finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t RandomStream::next_below(std::uint64_t bound) {
  if (bound == 0) throw UsageError("next_below: bound must be positive");
  // Rejection sampling over the largest multiple of bound.
  std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    std::uint64_t r = next_u64();
    if (r >= threshold) return r % bound;
  }
}

RandomStream SeedTree::derive_stream(
    std::span<const std::string> label_path) const {
  if (label_path.empty())
    throw UsageError("derive_stream: label path must be non-empty");
  std::uint64_t h = kFnvOffset;
  for (const auto& segment : label_path) {
    if (segment.empty())
      throw UsageError("derive_stream: empty label segment");
    for (char c : segment) {
      if (static_cast<unsigned char>(c) > 0x7f)
        throw UsageError("derive_stream: label segment must be ASCII: " +
                          segment);
    }
    h = fnv1a(h, segment);
  }
  return RandomStream(splitmix_finalize(master_seed_ ^ h));
}

}  // namespace riker
