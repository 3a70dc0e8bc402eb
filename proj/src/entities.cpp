#include "riker/entities.hpp"

#include <cmath>
#include <fstream>
#include <unordered_set>

namespace riker {

std::string entity_kind_name(EntityKind k) {
  switch (k) {
    case EntityKind::person: return "person";
    case EntityKind::organization: return "organization";
    case EntityKind::property_address: return "property_address";
  }
  return "person";
}

EntityKind entity_kind_from_name(const std::string& s) {
  if (s == "person") return EntityKind::person;
  if (s == "organization") return EntityKind::organization;
  if (s == "property_address") return EntityKind::property_address;
  throw UsageError("unknown entity kind: " + s);
}

namespace {

std::vector<std::string> load_lexicon(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("missing lexicon file: " + path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line[0] != '#') out.push_back(line);
  }
  if (out.empty()) throw ConfigError("empty lexicon file: " + path);
  return out;
}

}  // namespace

Lexicons Lexicons::load(const std::string& data_dir) {
  const std::string d = data_dir + "/lexicons/";
  Lexicons lex;
  lex.first_names = load_lexicon(d + "first_names.txt");
  lex.last_names = load_lexicon(d + "last_names.txt");
  lex.org_names = load_lexicon(d + "org_names.txt");
  lex.org_suffixes = load_lexicon(d + "org_suffixes.txt");
  lex.street_names = load_lexicon(d + "street_names.txt");
  lex.cities = load_lexicon(d + "cities.txt");
  return lex;
}

std::vector<EntityPool> build_pools(const std::vector<PoolSpec>& specs,
                                    const Lexicons& lex,
                                    RandomStream& stream) {
  constexpr int kMaxRetries = 10000;
  std::unordered_set<std::string> taken;  // global uniqueness across pools
  std::vector<EntityPool> pools;

  for (const auto& spec : specs) {
    EntityPool pool;
    pool.pool_name = spec.pool_name;
    pool.used_count = spec.placements;
    std::size_t target = std::max(
        static_cast<std::size_t>(
            std::ceil(static_cast<double>(spec.placements) * 1.3)),
        spec.placements + spec.reserve);

    for (std::size_t i = 0; i < target; ++i) {
      Entity e;
      e.kind = spec.kind;
      char idbuf[64];
      std::snprintf(idbuf, sizeof idbuf, "%s-%03zu", spec.pool_name.c_str(),
                    i + 1);
      e.id = idbuf;

      int attempts = 0;
      for (;;) {
        if (++attempts > kMaxRetries)
          throw GenerationError(
              "build_pools: could not draw a globally unique name for pool '" +
              spec.pool_name + "' (name space too small for requested size)");
        switch (spec.kind) {
          case EntityKind::person:
            e.given_name = pick(stream, lex.first_names);
            e.family_name = pick(stream, lex.last_names);
            e.display_name = e.given_name + " " + e.family_name;
            break;
          case EntityKind::organization:
            e.display_name = pick(stream, lex.org_names) + " " +
                             pick(stream, lex.org_suffixes);
            break;
          case EntityKind::property_address: {
            int number = 100 + static_cast<int>(stream.next_below(9800));
            e.street = std::to_string(number) + " " +
                       pick(stream, lex.street_names);
            e.city = pick(stream, lex.cities);
            if (stream.next_bernoulli(0.4))
              e.unit = "Unit " + std::to_string(1 + stream.next_below(24));
            e.display_name = e.street +
                             (e.unit.empty() ? "" : ", " + e.unit) + ", " +
                             e.city;
            break;
          }
        }
        if (taken.insert(e.display_name).second) break;
      }
      pool.members.push_back(std::move(e));
    }
    pools.push_back(std::move(pool));
  }
  return pools;
}

std::vector<Entity> reserve_probe_entities(std::vector<EntityPool>& pools,
                                           const std::string& pool_name,
                                           std::size_t k) {
  for (auto& pool : pools) {
    if (pool.pool_name != pool_name) continue;
    std::size_t start = pool.used_count + pool.probes_consumed;
    if (start + k > pool.members.size())
      throw GenerationError("reserve_probe_entities: pool '" + pool_name +
                            "' has only " +
                            std::to_string(pool.members.size() - start) +
                            " unconsumed reserve entities, requested " +
                            std::to_string(k));
    std::vector<Entity> out(pool.members.begin() + start,
                            pool.members.begin() + start + k);
    pool.probes_consumed += k;
    return out;
  }
  throw UsageError("reserve_probe_entities: unknown pool " + pool_name);
}

}  // namespace riker
