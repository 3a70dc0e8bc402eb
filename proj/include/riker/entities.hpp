#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "riker/rng.hpp"

namespace riker {

enum class EntityKind { person, organization, property_address };

std::string entity_kind_name(EntityKind k);
EntityKind entity_kind_from_name(const std::string& s);

struct Entity {
  std::string id;
  EntityKind kind = EntityKind::person;
  std::string display_name;
  // person
  std::string given_name;
  std::string family_name;
  // property_address
  std::string street;
  std::string city;
  std::string unit;  // may be empty
};

// A named pool of pre-generated entities. Members [0, used_count) are placed
// in the universe; the tail is the reserve that supplies probe entities.
struct EntityPool {
  std::string pool_name;
  std::vector<Entity> members;
  std::size_t used_count = 0;
  std::size_t probes_consumed = 0;  // reserve members handed out so far

  std::size_t reserve_size() const { return members.size() - used_count; }
  const Entity& placed(std::size_t i) const { return members[i]; }
};

// Word lists shipped in-repo under data/lexicons; hermetic, no services.
struct Lexicons {
  std::vector<std::string> first_names;
  std::vector<std::string> last_names;
  std::vector<std::string> org_names;
  std::vector<std::string> org_suffixes;
  std::vector<std::string> street_names;
  std::vector<std::string> cities;

  static Lexicons load(const std::string& data_dir);
};

struct PoolSpec {
  std::string pool_name;
  EntityKind kind;
  std::size_t placements;
  std::size_t reserve;  // minimum reserve beyond placements
};

// Builds all pools with globally unique display names (rejection and
// regenerate, bounded retries). Pool size is
// max(ceil(placements * 1.3), placements + reserve).
std::vector<EntityPool> build_pools(const std::vector<PoolSpec>& specs,
                                    const Lexicons& lex, RandomStream& stream);

// Hands out the next k reserve entities of a pool and marks them consumed.
std::vector<Entity> reserve_probe_entities(std::vector<EntityPool>& pools,
                                           const std::string& pool_name,
                                           std::size_t k);

}  // namespace riker
