#include "riker/pipeline_config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace riker {

namespace {

std::string count_mode_name(UniverseConfig::CountMode m) {
  return m == UniverseConfig::CountMode::exact ? "exact" : "per_agent";
}

UniverseConfig::CountMode count_mode_from_name(const std::string& s) {
  if (s == "exact") return UniverseConfig::CountMode::exact;
  if (s == "per_agent") return UniverseConfig::CountMode::per_agent;
  throw ConfigError("unknown count mode: " + s);
}

nlohmann::json universe_to_json(const UniverseConfig& u) {
  nlohmann::json clauses = nlohmann::json::object();
  for (const auto& [flag, p] : u.clause_probabilities)
    clauses[clause_name(flag)] = p;
  nlohmann::json periods = nlohmann::json::array();
  for (const auto& q : u.periods)
    periods.push_back({{"year", q.year}, {"q", q.q}});
  return {{"leases", u.leases},
          {"lessors_placed", u.lessors_placed},
          {"lessees_placed", u.lessees_placed},
          {"agents_placed", u.agents_placed},
          {"report_mode", count_mode_name(u.report_mode)},
          {"report_count", u.report_count},
          {"reports_per_agent_min", u.reports_per_agent_min},
          {"reports_per_agent_max", u.reports_per_agent_max},
          {"hr_mode", count_mode_name(u.hr_mode)},
          {"hr_count", u.hr_count},
          {"hr_coverage", u.hr_coverage},
          {"periods", periods},
          {"agent_credit_fraction", u.agent_credit_fraction},
          {"clause_probabilities", clauses},
          {"probe_reserve", u.probe_reserve}};
}

UniverseConfig universe_from_json(const nlohmann::json& j) {
  UniverseConfig u;
  if (j.contains("leases")) u.leases = j["leases"].get<int>();
  if (j.contains("lessors_placed"))
    u.lessors_placed = j["lessors_placed"].get<int>();
  if (j.contains("lessees_placed"))
    u.lessees_placed = j["lessees_placed"].get<int>();
  if (j.contains("agents_placed"))
    u.agents_placed = j["agents_placed"].get<int>();
  if (j.contains("report_mode"))
    u.report_mode = count_mode_from_name(j["report_mode"].get<std::string>());
  if (j.contains("report_count")) u.report_count = j["report_count"].get<int>();
  if (j.contains("reports_per_agent_min"))
    u.reports_per_agent_min = j["reports_per_agent_min"].get<int>();
  if (j.contains("reports_per_agent_max"))
    u.reports_per_agent_max = j["reports_per_agent_max"].get<int>();
  if (j.contains("hr_mode"))
    u.hr_mode = count_mode_from_name(j["hr_mode"].get<std::string>());
  if (j.contains("hr_count")) u.hr_count = j["hr_count"].get<int>();
  if (j.contains("hr_coverage")) u.hr_coverage = j["hr_coverage"].get<double>();
  if (j.contains("periods")) {
    u.periods.clear();
    for (const auto& p : j["periods"])
      u.periods.push_back({p.at("year").get<int>(), p.at("q").get<int>()});
  }
  if (j.contains("agent_credit_fraction"))
    u.agent_credit_fraction = j["agent_credit_fraction"].get<double>();
  if (j.contains("clause_probabilities")) {
    for (const auto& [name, p] : j["clause_probabilities"].items())
      u.clause_probabilities[clause_from_name(name)] = p.get<double>();
  }
  if (j.contains("probe_reserve"))
    u.probe_reserve = j["probe_reserve"].get<int>();
  return u;
}

nlohmann::json mix_to_json(const QuestionMix& m) {
  nlohmann::json j = {{"total", m.total},
                      {"single_doc_share", m.single_doc_share},
                      {"aggregation_share", m.aggregation_share},
                      {"probe_share", m.probe_share}};
  if (m.level_counts) {
    nlohmann::json counts = nlohmann::json::object();
    for (const auto& [level, n] : *m.level_counts) {
      char label[8];
      std::snprintf(label, sizeof(label), "L%02d", level);
      counts[label] = n;
    }
    j["level_counts"] = counts;
  }
  return j;
}

QuestionMix mix_from_json(const nlohmann::json& j) {
  QuestionMix m;
  if (j.contains("total")) m.total = j["total"].get<int>();
  if (j.contains("single_doc_share"))
    m.single_doc_share = j["single_doc_share"].get<double>();
  if (j.contains("aggregation_share"))
    m.aggregation_share = j["aggregation_share"].get<double>();
  if (j.contains("probe_share")) m.probe_share = j["probe_share"].get<double>();
  if (j.contains("level_counts")) {
    std::map<int, int> counts;
    for (const auto& [label, n] : j["level_counts"].items()) {
      if (label.size() != 3 || label[0] != 'L')
        throw ConfigError("bad level label in config: " + label);
      counts[std::stoi(label.substr(1))] = n.get<int>();
    }
    m.level_counts = counts;
  }
  return m;
}

}  // namespace

void PipelineConfig::validate() const {
  if (corpus_id.empty()) throw ConfigError("config: corpus_id is required");
  if (tier_tokens <= 0) throw ConfigError("config: tier_tokens must be positive");
  if (headroom <= 0 || headroom > 1)
    throw ConfigError("config: headroom must be in (0,1]");
  if (universe.leases <= 0) throw ConfigError("config: leases must be positive");
  if (universe.lessors_placed <= 0 || universe.lessees_placed <= 0 ||
      universe.agents_placed <= 0)
    throw ConfigError("config: placed entity counts must be positive");
  if (universe.lessees_placed < universe.leases)
    throw ConfigError("config: need at least one lessee per lease");
  if (universe.probe_reserve < 0)
    throw ConfigError("config: probe_reserve must be non-negative");
  if (universe.periods.empty())
    throw ConfigError("config: at least one evaluation period is required");
  for (const auto& [flag, p] : universe.clause_probabilities) {
    (void)flag;
    if (p < 0 || p > 1)
      throw ConfigError("config: clause probability out of [0,1]");
  }
  if (questions.total <= 0)
    throw ConfigError("config: question total must be positive");
  double share_sum = questions.single_doc_share + questions.aggregation_share +
                     questions.probe_share;
  if (!questions.level_counts && std::abs(share_sum - 1.0) > 1e-9)
    throw ConfigError("config: question shares must sum to 1");
  if (questions.level_counts) {
    int total = 0;
    for (const auto& [level, n] : *questions.level_counts) {
      if (level < 1 || level > 12)
        throw ConfigError("config: level out of range in level_counts");
      if (n < 0) throw ConfigError("config: negative level count");
      total += n;
    }
    if (total != questions.total)
      throw ConfigError("config: level_counts must sum to the question total");
  }
}

nlohmann::json PipelineConfig::to_json() const {
  return {{"corpus_id", corpus_id},
          {"tier_tokens", tier_tokens},
          {"headroom", headroom},
          {"universe", universe_to_json(universe)},
          {"questions", mix_to_json(questions)}};
}

PipelineConfig PipelineConfig::from_json(const nlohmann::json& j) {
  PipelineConfig c;
  c.corpus_id = j.at("corpus_id").get<std::string>();
  if (j.contains("tier_tokens")) c.tier_tokens = j["tier_tokens"].get<int>();
  if (j.contains("headroom")) c.headroom = j["headroom"].get<double>();
  if (j.contains("universe")) c.universe = universe_from_json(j["universe"]);
  if (j.contains("questions")) c.questions = mix_from_json(j["questions"]);
  c.validate();
  return c;
}

PipelineConfig PipelineConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  return from_json(j);
}

std::string PipelineConfig::digest() const {
  std::string dump = to_json().dump();  // nlohmann emits key-sorted objects
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace riker
