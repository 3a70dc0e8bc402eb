#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "riker/answer_value.hpp"
#include "riker/dates.hpp"
#include "riker/entities.hpp"
#include "riker/money.hpp"
#include "riker/rng.hpp"

namespace riker {

enum class ClauseFlag { pet, early_termination, renewal_option, parking };
constexpr ClauseFlag kAllClauses[] = {ClauseFlag::pet,
                                      ClauseFlag::early_termination,
                                      ClauseFlag::renewal_option,
                                      ClauseFlag::parking};
std::string clause_name(ClauseFlag c);
ClauseFlag clause_from_name(const std::string& s);

struct LeaseRecord {
  std::string lease_id;
  std::string lessor_id;
  std::string lessee_id;
  std::string property_id;
  std::optional<std::string> agent_id;  // credited sales agent
  Date start_date;
  Date end_date;
  Cents monthly_rent = 0;
  Cents security_deposit = 0;
  std::set<ClauseFlag> clauses;
  // Clause parameters; present iff the matching flag is set.
  std::optional<Cents> pet_deposit;
  std::optional<int> termination_notice_days;
  std::optional<int> renewal_term_months;
  std::optional<Cents> parking_fee;
};

enum class ReportOutcome {
  interested,
  negotiating,
  closed_won,
  closed_lost,
  follow_up_scheduled
};
std::string outcome_name(ReportOutcome o);
ReportOutcome outcome_from_name(const std::string& s);

struct FieldReportRecord {
  std::string report_id;
  std::string agent_id;
  std::optional<std::string> lease_id;  // set only when a lease was closed
  std::string prospect_entity_id;
  Date report_date;
  int calls_made = 0;
  int meetings_held = 0;
  int site_visits = 0;
  ReportOutcome outcome = ReportOutcome::interested;
};

struct HrEvaluationRecord {
  std::string eval_id;
  std::string agent_id;
  std::string evaluator_id;  // a senior agent, never the subject
  Quarter period{2024, 1};
  int rating = 3;  // 1..5
  int deals_closed = 0;
  int client_meetings = 0;
};

struct GroundTruthStore {
  std::vector<EntityPool> pools;  // lessor, lessee, sales_agent, property
  std::vector<LeaseRecord> leases;
  std::vector<FieldReportRecord> field_reports;
  std::vector<HrEvaluationRecord> hr_evaluations;

  const EntityPool& pool(const std::string& name) const;
  EntityPool& pool(const std::string& name);
  const Entity* find_entity(const std::string& id) const;
  const Entity& entity(const std::string& id) const;  // throws on miss
  const LeaseRecord* find_lease(const std::string& id) const;
};

struct UniverseConfig {
  int leases = 10;
  int lessors_placed = 6;
  int lessees_placed = 10;
  int agents_placed = 14;

  enum class CountMode { exact, per_agent };
  CountMode report_mode = CountMode::exact;
  int report_count = 44;          // exact mode
  int reports_per_agent_min = 5;  // per_agent mode
  int reports_per_agent_max = 9;

  CountMode hr_mode = CountMode::exact;
  int hr_count = 56;          // exact mode
  double hr_coverage = 0.95;  // per_agent mode: P(eval exists per agent/period)

  std::vector<Quarter> periods = {
      {2024, 1}, {2024, 2}, {2024, 3}, {2024, 4}};

  double agent_credit_fraction = 0.6;
  std::map<ClauseFlag, double> clause_probabilities = {
      {ClauseFlag::pet, 0.4},
      {ClauseFlag::early_termination, 0.5},
      {ClauseFlag::renewal_option, 0.5},
      {ClauseFlag::parking, 0.5}};
  int probe_reserve = 20;  // minimum reserve per pool
};

std::vector<EntityPool> build_universe_pools(const UniverseConfig& config,
                                             const Lexicons& lex,
                                             RandomStream& stream);

GroundTruthStore populate_ground_truth(std::vector<EntityPool> pools,
                                       const UniverseConfig& config,
                                       RandomStream& stream);

// ---- Closed query forms over the store -----------------------------------

struct AnswerQuery {
  enum class Kind {
    lease_field,               // field of one lease
    count_leases_by_lessor,    // L05
    sum_rent_by_lessor,        // L06
    avg_rent_by_lessor,        // L06
    compare_lessor_lease_counts,  // L07 (entity_id vs entity_id2)
    enumerate_lessees,         // L08
    most_recent_end_date,      // L09
    count_active_in_quarter,   // L10
    count_reports_by_agent
  };
  Kind kind = Kind::count_leases_by_lessor;
  std::string entity_id;
  std::string entity_id2;
  std::string lease_id;
  std::string field;  // monthly_rent | security_deposit | pet_deposit |
                      // start_date | end_date | duration_months |
                      // move_in_cost | termination_notice_days |
                      // renewal_term_months | parking_fee
  Quarter quarter{2024, 3};

  nlohmann::json to_json() const;
  static AnswerQuery from_json(const nlohmann::json& j);
};

// Exact relational semantics. Unknown entity/lease ids raise UsageError,
// distinct from legal empty results (count 0, empty sum).
AnswerValue evaluate_query(const GroundTruthStore& store,
                           const AnswerQuery& query);

// ---- Coherence -------------------------------------------------------------

struct CoherenceViolation {
  std::string kind;  // referential_integrity | agent_coherence | date_order |
                     // clause_consistency | name_uniqueness | rating_range
  std::string detail;
};

struct CoherenceReport {
  std::vector<CoherenceViolation> violations;
  bool ok() const { return violations.empty(); }
};

CoherenceReport verify_coherence(const GroundTruthStore& store);

// Deterministically ordered one-row-per-line dump for golden testing.
std::string dump_store_text(const GroundTruthStore& store);

}  // namespace riker
