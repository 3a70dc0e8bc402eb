#include "riker/ground_truth.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace riker {

std::string clause_name(ClauseFlag c) {
  switch (c) {
    case ClauseFlag::pet: return "pet";
    case ClauseFlag::early_termination: return "early_termination";
    case ClauseFlag::renewal_option: return "renewal_option";
    case ClauseFlag::parking: return "parking";
  }
  return "pet";
}

ClauseFlag clause_from_name(const std::string& s) {
  for (ClauseFlag c : kAllClauses)
    if (clause_name(c) == s) return c;
  throw UsageError("unknown clause: " + s);
}

std::string outcome_name(ReportOutcome o) {
  switch (o) {
    case ReportOutcome::interested: return "interested";
    case ReportOutcome::negotiating: return "negotiating";
    case ReportOutcome::closed_won: return "closed_won";
    case ReportOutcome::closed_lost: return "closed_lost";
    case ReportOutcome::follow_up_scheduled: return "follow_up_scheduled";
  }
  return "interested";
}

ReportOutcome outcome_from_name(const std::string& s) {
  for (auto o : {ReportOutcome::interested, ReportOutcome::negotiating,
                 ReportOutcome::closed_won, ReportOutcome::closed_lost,
                 ReportOutcome::follow_up_scheduled})
    if (outcome_name(o) == s) return o;
  throw UsageError("unknown outcome: " + s);
}

const EntityPool& GroundTruthStore::pool(const std::string& name) const {
  for (const auto& p : pools)
    if (p.pool_name == name) return p;
  throw UsageError("unknown pool: " + name);
}

EntityPool& GroundTruthStore::pool(const std::string& name) {
  for (auto& p : pools)
    if (p.pool_name == name) return p;
  throw UsageError("unknown pool: " + name);
}

const Entity* GroundTruthStore::find_entity(const std::string& id) const {
  for (const auto& p : pools)
    for (const auto& e : p.members)
      if (e.id == id) return &e;
  return nullptr;
}

const Entity& GroundTruthStore::entity(const std::string& id) const {
  const Entity* e = find_entity(id);
  if (!e) throw UsageError("unknown entity id: " + id);
  return *e;
}

const LeaseRecord* GroundTruthStore::find_lease(const std::string& id) const {
  for (const auto& l : leases)
    if (l.lease_id == id) return &l;
  return nullptr;
}

std::vector<EntityPool> build_universe_pools(const UniverseConfig& config,
                                             const Lexicons& lex,
                                             RandomStream& stream) {
  std::size_t reserve = static_cast<std::size_t>(config.probe_reserve);
  std::vector<PoolSpec> specs = {
      {"lessor", EntityKind::organization,
       static_cast<std::size_t>(config.lessors_placed), reserve},
      {"lessee", EntityKind::person,
       static_cast<std::size_t>(config.lessees_placed), reserve},
      {"sales_agent", EntityKind::person,
       static_cast<std::size_t>(config.agents_placed), reserve},
      {"property", EntityKind::property_address,
       static_cast<std::size_t>(config.leases), reserve},
  };
  return build_pools(specs, lex, stream);
}

namespace {

std::string seq_id(const char* prefix, int n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s-%04d", prefix, n);
  return buf;
}

}  // namespace

GroundTruthStore populate_ground_truth(std::vector<EntityPool> pools,
                                       const UniverseConfig& config,
                                       RandomStream& stream) {
  GroundTruthStore store;
  store.pools = std::move(pools);
  const auto& lessors = store.pool("lessor");
  const auto& lessees = store.pool("lessee");
  const auto& agents = store.pool("sales_agent");
  const auto& properties = store.pool("property");

  if (static_cast<int>(lessees.used_count) < config.leases)
    throw GenerationError(
        "config demands more lessee placements than the lessee pool "
        "provides: need " +
        std::to_string(config.leases) + ", placed " +
        std::to_string(lessees.used_count));
  if (lessors.used_count == 0 || agents.used_count < 2)
    throw GenerationError("lessor pool empty or fewer than 2 agents placed");

  // Leases: one distinct lessee and property per lease.
  std::vector<std::size_t> lessee_order(lessees.used_count);
  std::iota(lessee_order.begin(), lessee_order.end(), 0);
  shuffle(stream, lessee_order);

  for (int i = 0; i < config.leases; ++i) {
    LeaseRecord lease;
    lease.lease_id = seq_id("lease", i + 1);
    lease.lessor_id = lessors.placed(stream.next_below(lessors.used_count)).id;
    lease.lessee_id = lessees.placed(lessee_order[i]).id;
    lease.property_id = properties.placed(i).id;
    if (stream.next_bernoulli(config.agent_credit_fraction))
      lease.agent_id = agents.placed(stream.next_below(agents.used_count)).id;

    lease.start_date.year = 2023 + static_cast<int>(stream.next_below(2));
    lease.start_date.month = 1 + static_cast<int>(stream.next_below(12));
    lease.start_date.day = 1 + static_cast<int>(stream.next_below(28));
    int months = 6 + static_cast<int>(stream.next_below(31));  // 6..36
    lease.end_date = add_months_minus_one_day(lease.start_date, months);

    lease.monthly_rent = 80000 + 2500 * static_cast<Cents>(stream.next_below(149));
    lease.security_deposit =
        lease.monthly_rent * (1 + static_cast<Cents>(stream.next_below(2)));

    for (ClauseFlag c : kAllClauses) {
      double p = config.clause_probabilities.count(c)
                     ? config.clause_probabilities.at(c)
                     : 0.0;
      if (!stream.next_bernoulli(p)) continue;
      lease.clauses.insert(c);
      switch (c) {
        case ClauseFlag::pet:
          lease.pet_deposit = 25000 + 2500 * static_cast<Cents>(stream.next_below(21));
          break;
        case ClauseFlag::early_termination:
          lease.termination_notice_days =
              30 * (1 + static_cast<int>(stream.next_below(3)));
          break;
        case ClauseFlag::renewal_option:
          lease.renewal_term_months = stream.next_bernoulli(0.5) ? 6 : 12;
          break;
        case ClauseFlag::parking:
          lease.parking_fee = 7500 + 2500 * static_cast<Cents>(stream.next_below(7));
          break;
      }
    }
    store.leases.push_back(std::move(lease));
  }

  // Leases with a credited agent, for linked field reports.
  std::vector<const LeaseRecord*> credited;
  for (const auto& l : store.leases)
    if (l.agent_id) credited.push_back(&l);

  auto make_report = [&](int n, const std::string& agent_id,
                         const LeaseRecord* linked) {
    FieldReportRecord r;
    r.report_id = seq_id("report", n);
    r.agent_id = agent_id;
    if (linked) {
      r.lease_id = linked->lease_id;
      r.prospect_entity_id = linked->lessee_id;
      r.outcome = ReportOutcome::closed_won;
    } else {
      r.prospect_entity_id =
          lessees.placed(stream.next_below(lessees.used_count)).id;
      ReportOutcome pool[] = {ReportOutcome::interested,
                              ReportOutcome::negotiating,
                              ReportOutcome::closed_lost,
                              ReportOutcome::follow_up_scheduled};
      r.outcome = pool[stream.next_below(4)];
    }
    r.report_date.year = 2024;
    r.report_date.month = 1 + static_cast<int>(stream.next_below(12));
    r.report_date.day = 1 + static_cast<int>(stream.next_below(28));
    r.calls_made = 1 + static_cast<int>(stream.next_below(12));
    r.meetings_held = static_cast<int>(stream.next_below(6));
    r.site_visits = static_cast<int>(stream.next_below(4));
    store.field_reports.push_back(std::move(r));
  };

  int report_n = 0;
  if (config.report_mode == UniverseConfig::CountMode::exact) {
    for (int i = 0; i < config.report_count; ++i) {
      bool link = !credited.empty() && stream.next_bernoulli(0.5);
      if (link) {
        const LeaseRecord* lease = credited[stream.next_below(credited.size())];
        make_report(++report_n, *lease->agent_id, lease);
      } else {
        make_report(++report_n,
                    agents.placed(stream.next_below(agents.used_count)).id,
                    nullptr);
      }
    }
  } else {
    int span = config.reports_per_agent_max - config.reports_per_agent_min + 1;
    if (span < 1)
      throw ConfigError("reports_per_agent range is empty");
    for (std::size_t a = 0; a < agents.used_count; ++a) {
      const std::string agent_id = agents.placed(a).id;
      std::vector<const LeaseRecord*> own;
      for (const LeaseRecord* l : credited)
        if (*l->agent_id == agent_id) own.push_back(l);
      int n = config.reports_per_agent_min +
              static_cast<int>(stream.next_below(span));
      for (int i = 0; i < n; ++i) {
        bool link = !own.empty() && stream.next_bernoulli(0.5);
        make_report(++report_n, agent_id,
                    link ? own[stream.next_below(own.size())] : nullptr);
      }
    }
  }

  // HR evaluations: at most one per (agent, period).
  auto make_eval = [&](int n, const std::string& agent_id, Quarter period) {
    HrEvaluationRecord ev;
    ev.eval_id = seq_id("eval", n);
    ev.agent_id = agent_id;
    do {
      ev.evaluator_id = agents.placed(stream.next_below(agents.used_count)).id;
    } while (ev.evaluator_id == agent_id);
    ev.period = period;
    ev.rating = 1 + static_cast<int>(stream.next_below(5));
    ev.deals_closed = static_cast<int>(stream.next_below(9));
    ev.client_meetings = 5 + static_cast<int>(stream.next_below(36));
    store.hr_evaluations.push_back(std::move(ev));
  };

  int eval_n = 0;
  if (config.hr_mode == UniverseConfig::CountMode::exact) {
    std::vector<std::pair<std::size_t, std::size_t>> slots;  // (period, agent)
    for (std::size_t p = 0; p < config.periods.size(); ++p)
      for (std::size_t a = 0; a < agents.used_count; ++a)
        slots.emplace_back(p, a);
    if (static_cast<std::size_t>(config.hr_count) > slots.size())
      throw GenerationError(
          "hr_evaluations count exceeds agents x periods slots: " +
          std::to_string(config.hr_count) + " > " +
          std::to_string(slots.size()));
    shuffle(stream, slots);
    slots.resize(config.hr_count);
    std::sort(slots.begin(), slots.end());  // deterministic emit order
    for (auto [p, a] : slots)
      make_eval(++eval_n, agents.placed(a).id, config.periods[p]);
  } else {
    for (std::size_t p = 0; p < config.periods.size(); ++p)
      for (std::size_t a = 0; a < agents.used_count; ++a)
        if (stream.next_bernoulli(config.hr_coverage))
          make_eval(++eval_n, agents.placed(a).id, config.periods[p]);
  }

  return store;
}

// ---- Queries ----------------------------------------------------------------

namespace {

// Resolves an id or throws; "unknown entity" is distinct from empty results.
void require_entity(const GroundTruthStore& store, const std::string& id) {
  store.entity(id);
}

std::vector<const LeaseRecord*> leases_of_lessor(const GroundTruthStore& store,
                                                 const std::string& lessor_id) {
  require_entity(store, lessor_id);
  std::vector<const LeaseRecord*> out;
  for (const auto& l : store.leases)
    if (l.lessor_id == lessor_id) out.push_back(&l);
  return out;
}

}  // namespace

AnswerValue evaluate_query(const GroundTruthStore& store,
                           const AnswerQuery& query) {
  using Kind = AnswerQuery::Kind;
  switch (query.kind) {
    case Kind::lease_field: {
      const LeaseRecord* lease = store.find_lease(query.lease_id);
      if (!lease) throw UsageError("unknown lease id: " + query.lease_id);
      const std::string& f = query.field;
      if (f == "monthly_rent") return AnswerValue::make_money(lease->monthly_rent);
      if (f == "security_deposit")
        return AnswerValue::make_money(lease->security_deposit);
      if (f == "start_date") return AnswerValue::make_date(lease->start_date);
      if (f == "end_date") return AnswerValue::make_date(lease->end_date);
      if (f == "duration_months")
        return AnswerValue::make_number(
            whole_months_between(lease->start_date, lease->end_date));
      if (f == "move_in_cost")
        return AnswerValue::make_money(lease->monthly_rent +
                                       lease->security_deposit);
      if (f == "pet_deposit")
        return lease->pet_deposit
                   ? AnswerValue::make_money(*lease->pet_deposit)
                   : AnswerValue::not_applicable();
      if (f == "termination_notice_days")
        return lease->termination_notice_days
                   ? AnswerValue::make_number(*lease->termination_notice_days)
                   : AnswerValue::not_applicable();
      if (f == "renewal_term_months")
        return lease->renewal_term_months
                   ? AnswerValue::make_number(*lease->renewal_term_months)
                   : AnswerValue::not_applicable();
      if (f == "parking_fee")
        return lease->parking_fee
                   ? AnswerValue::make_money(*lease->parking_fee)
                   : AnswerValue::not_applicable();
      throw UsageError("unknown lease field: " + f);
    }
    case Kind::count_leases_by_lessor:
      return AnswerValue::make_number(
          static_cast<std::int64_t>(leases_of_lessor(store, query.entity_id).size()));
    case Kind::sum_rent_by_lessor: {
      Cents sum = 0;
      for (const auto* l : leases_of_lessor(store, query.entity_id))
        sum += l->monthly_rent;
      return AnswerValue::make_money(sum);
    }
    case Kind::avg_rent_by_lessor: {
      auto ls = leases_of_lessor(store, query.entity_id);
      if (ls.empty()) return AnswerValue::make_money(0);
      Cents sum = 0;
      for (const auto* l : ls) sum += l->monthly_rent;
      return AnswerValue::make_money(sum / static_cast<Cents>(ls.size()));
    }
    case Kind::compare_lessor_lease_counts: {
      auto a = leases_of_lessor(store, query.entity_id).size();
      auto b = leases_of_lessor(store, query.entity_id2).size();
      if (a == b)
        throw GenerationError("compare query over tied lessor counts: " +
                              query.entity_id + " vs " + query.entity_id2);
      const std::string& winner = a > b ? query.entity_id : query.entity_id2;
      return AnswerValue::make_entity(store.entity(winner).display_name);
    }
    case Kind::enumerate_lessees: {
      std::vector<std::string> names;
      for (const auto* l : leases_of_lessor(store, query.entity_id))
        names.push_back(store.entity(l->lessee_id).display_name);
      return AnswerValue::make_name_set(std::move(names));
    }
    case Kind::most_recent_end_date: {
      auto ls = leases_of_lessor(store, query.entity_id);
      if (ls.empty())
        throw UsageError("most_recent_end_date over lessor with no leases: " +
                         query.entity_id);
      Date best = ls.front()->end_date;
      for (const auto* l : ls) best = std::max(best, l->end_date);
      return AnswerValue::make_date(best);
    }
    case Kind::count_active_in_quarter: {
      // Active = interval overlap with the quarter, inclusive endpoints.
      Date qs = query.quarter.first_day();
      Date qe = query.quarter.last_day();
      std::int64_t n = 0;
      for (const auto& l : store.leases)
        if (l.start_date <= qe && l.end_date >= qs) ++n;
      return AnswerValue::make_number(n);
    }
    case Kind::count_reports_by_agent: {
      require_entity(store, query.entity_id);
      std::int64_t n = 0;
      for (const auto& r : store.field_reports)
        if (r.agent_id == query.entity_id) ++n;
      return AnswerValue::make_number(n);
    }
  }
  throw UsageError("unknown query kind");
}

nlohmann::json AnswerQuery::to_json() const {
  static const char* names[] = {
      "lease_field",        "count_leases_by_lessor",
      "sum_rent_by_lessor", "avg_rent_by_lessor",
      "compare_lessor_lease_counts", "enumerate_lessees",
      "most_recent_end_date", "count_active_in_quarter",
      "count_reports_by_agent"};
  nlohmann::json j;
  j["kind"] = names[static_cast<int>(kind)];
  if (!entity_id.empty()) j["entity_id"] = entity_id;
  if (!entity_id2.empty()) j["entity_id2"] = entity_id2;
  if (!lease_id.empty()) j["lease_id"] = lease_id;
  if (!field.empty()) j["field"] = field;
  if (kind == Kind::count_active_in_quarter) {
    j["quarter"] = {{"year", quarter.year}, {"q", quarter.q}};
  }
  return j;
}

AnswerQuery AnswerQuery::from_json(const nlohmann::json& j) {
  static const std::pair<const char*, Kind> names[] = {
      {"lease_field", Kind::lease_field},
      {"count_leases_by_lessor", Kind::count_leases_by_lessor},
      {"sum_rent_by_lessor", Kind::sum_rent_by_lessor},
      {"avg_rent_by_lessor", Kind::avg_rent_by_lessor},
      {"compare_lessor_lease_counts", Kind::compare_lessor_lease_counts},
      {"enumerate_lessees", Kind::enumerate_lessees},
      {"most_recent_end_date", Kind::most_recent_end_date},
      {"count_active_in_quarter", Kind::count_active_in_quarter},
      {"count_reports_by_agent", Kind::count_reports_by_agent}};
  AnswerQuery q;
  bool found = false;
  for (auto& [n, k] : names)
    if (j.at("kind") == n) {
      q.kind = k;
      found = true;
    }
  if (!found) throw UsageError("unknown query kind in JSON");
  q.entity_id = j.value("entity_id", "");
  q.entity_id2 = j.value("entity_id2", "");
  q.lease_id = j.value("lease_id", "");
  q.field = j.value("field", "");
  if (j.contains("quarter"))
    q.quarter = Quarter{j["quarter"]["year"], j["quarter"]["q"]};
  return q;
}

// ---- Coherence ---------------------------------------------------------------

CoherenceReport verify_coherence(const GroundTruthStore& store) {
  CoherenceReport report;
  auto flag = [&](std::string kind, std::string detail) {
    report.violations.push_back({std::move(kind), std::move(detail)});
  };

  auto placed_ids = [&](const std::string& pool_name) {
    std::unordered_set<std::string> ids;
    const auto& p = store.pool(pool_name);
    for (std::size_t i = 0; i < p.used_count; ++i)
      ids.insert(p.members[i].id);
    return ids;
  };
  auto lessor_ids = placed_ids("lessor");
  auto lessee_ids = placed_ids("lessee");
  auto agent_ids = placed_ids("sales_agent");
  auto property_ids = placed_ids("property");

  std::unordered_map<std::string, const LeaseRecord*> lease_by_id;
  for (const auto& l : store.leases) lease_by_id[l.lease_id] = &l;

  for (const auto& l : store.leases) {
    if (!lessor_ids.count(l.lessor_id))
      flag("referential_integrity", l.lease_id + ": lessor " + l.lessor_id);
    if (!lessee_ids.count(l.lessee_id))
      flag("referential_integrity", l.lease_id + ": lessee " + l.lessee_id);
    if (!property_ids.count(l.property_id))
      flag("referential_integrity", l.lease_id + ": property " + l.property_id);
    if (l.agent_id && !agent_ids.count(*l.agent_id))
      flag("referential_integrity", l.lease_id + ": agent " + *l.agent_id);
    if (!(l.start_date < l.end_date))
      flag("date_order", l.lease_id + ": start " + l.start_date.iso() +
                             " not before end " + l.end_date.iso());
    auto check_param = [&](ClauseFlag c, bool has_value, const char* field) {
      bool has_flag = l.clauses.count(c) > 0;
      if (has_flag != has_value)
        flag("clause_consistency",
             l.lease_id + ": " + clause_name(c) + " flag " +
                 (has_flag ? "present" : "absent") + " but " + field + " " +
                 (has_value ? "set" : "unset"));
    };
    check_param(ClauseFlag::pet, l.pet_deposit.has_value(), "pet_deposit");
    check_param(ClauseFlag::early_termination,
                l.termination_notice_days.has_value(),
                "termination_notice_days");
    check_param(ClauseFlag::renewal_option,
                l.renewal_term_months.has_value(), "renewal_term_months");
    check_param(ClauseFlag::parking, l.parking_fee.has_value(), "parking_fee");
  }

  for (const auto& r : store.field_reports) {
    if (!agent_ids.count(r.agent_id))
      flag("referential_integrity", r.report_id + ": agent " + r.agent_id);
    if (!lessee_ids.count(r.prospect_entity_id))
      flag("referential_integrity",
           r.report_id + ": prospect " + r.prospect_entity_id);
    if (r.lease_id) {
      auto it = lease_by_id.find(*r.lease_id);
      if (it == lease_by_id.end()) {
        flag("referential_integrity", r.report_id + ": lease " + *r.lease_id);
      } else if (!it->second->agent_id ||
                 *it->second->agent_id != r.agent_id) {
        flag("agent_coherence",
             r.report_id + ": names agent " + r.agent_id + " but lease " +
                 *r.lease_id + " credits " +
                 (it->second->agent_id ? *it->second->agent_id : "nobody"));
      }
    }
  }

  for (const auto& ev : store.hr_evaluations) {
    if (!agent_ids.count(ev.agent_id))
      flag("referential_integrity", ev.eval_id + ": agent " + ev.agent_id);
    if (!agent_ids.count(ev.evaluator_id))
      flag("referential_integrity",
           ev.eval_id + ": evaluator " + ev.evaluator_id);
    if (ev.evaluator_id == ev.agent_id)
      flag("agent_coherence", ev.eval_id + ": self-evaluation");
    if (ev.rating < 1 || ev.rating > 5)
      flag("rating_range", ev.eval_id + ": rating " + std::to_string(ev.rating));
  }

  std::unordered_set<std::string> names;
  for (const auto& p : store.pools)
    for (const auto& e : p.members)
      if (!names.insert(e.display_name).second)
        flag("name_uniqueness", "duplicate display name: " + e.display_name);

  return report;
}

std::string dump_store_text(const GroundTruthStore& store) {
  std::ostringstream os;
  for (const auto& p : store.pools)
    for (std::size_t i = 0; i < p.members.size(); ++i) {
      const auto& e = p.members[i];
      os << "pool|" << p.pool_name << "|" << i << "|" << e.id << "|"
         << entity_kind_name(e.kind) << "|" << e.display_name << "|"
         << (i < p.used_count ? "placed" : "reserve") << "\n";
    }
  for (const auto& l : store.leases) {
    os << "lease|" << l.lease_id << "|" << l.lessor_id << "|" << l.lessee_id
       << "|" << l.property_id << "|" << (l.agent_id ? *l.agent_id : "-")
       << "|" << l.start_date.iso() << "|" << l.end_date.iso() << "|"
       << l.monthly_rent << "|" << l.security_deposit;
    for (ClauseFlag c : kAllClauses)
      os << "|" << clause_name(c) << "=" << (l.clauses.count(c) ? "1" : "0");
    os << "|pet_deposit=" << (l.pet_deposit ? std::to_string(*l.pet_deposit) : "-")
       << "|notice=" << (l.termination_notice_days
                             ? std::to_string(*l.termination_notice_days)
                             : "-")
       << "|renewal=" << (l.renewal_term_months
                              ? std::to_string(*l.renewal_term_months)
                              : "-")
       << "|parking=" << (l.parking_fee ? std::to_string(*l.parking_fee) : "-")
       << "\n";
  }
  for (const auto& r : store.field_reports)
    os << "field_report|" << r.report_id << "|" << r.agent_id << "|"
       << (r.lease_id ? *r.lease_id : "-") << "|" << r.prospect_entity_id
       << "|" << r.report_date.iso() << "|" << r.calls_made << "|"
       << r.meetings_held << "|" << r.site_visits << "|"
       << outcome_name(r.outcome) << "\n";
  for (const auto& ev : store.hr_evaluations)
    os << "hr_evaluation|" << ev.eval_id << "|" << ev.agent_id << "|"
       << ev.evaluator_id << "|" << ev.period.label() << "|" << ev.rating
       << "|" << ev.deals_closed << "|" << ev.client_meetings << "\n";
  return os.str();
}

}  // namespace riker
