#include "riker/questions.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <unordered_set>

namespace riker {

std::string category_name(QuestionCategory c) {
  switch (c) {
    case QuestionCategory::single_doc: return "single_doc";
    case QuestionCategory::aggregation: return "aggregation";
    case QuestionCategory::probe: return "probe";
  }
  return "single_doc";
}

QuestionCategory category_for_level(int level) {
  if (level >= 1 && level <= 4) return QuestionCategory::single_doc;
  if (level >= 5 && level <= 10) return QuestionCategory::aggregation;
  if (level >= 11 && level <= 12) return QuestionCategory::probe;
  throw UsageError("level out of range: " + std::to_string(level));
}

std::string scoring_type_name(ScoringType t) {
  switch (t) {
    case ScoringType::exact: return "exact";
    case ScoringType::numeric: return "numeric";
    case ScoringType::set_match: return "set";
    case ScoringType::semantic: return "semantic";
  }
  return "exact";
}

ScoringType scoring_type_from_name(const std::string& s) {
  if (s == "exact") return ScoringType::exact;
  if (s == "numeric") return ScoringType::numeric;
  if (s == "set") return ScoringType::set_match;
  if (s == "semantic") return ScoringType::semantic;
  throw UsageError("unknown scoring type: " + s);
}

std::string Question::level_label() const {
  char buf[8];
  std::snprintf(buf, sizeof buf, "L%02d", level);
  return buf;
}

namespace {

std::string level_label(int level) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "L%02d", level);
  return buf;
}

const std::string kNumericInstruction = "Reply with only the number.";
const std::string kMarkerInstruction =
    "Indicate your final answer with: Final answer: [your answer]";

std::string with_instruction(std::string text, ScoringType t) {
  text += ' ';
  text += (t == ScoringType::numeric) ? kNumericInstruction
                                      : kMarkerInstruction;
  return text;
}

// "the lease between <lessor> and <lessee> at <property>" — names the target
// document unambiguously.
std::string lease_descriptor(const GroundTruthStore& store,
                             const LeaseRecord& lease) {
  return "the lease between " + store.entity(lease.lessor_id).display_name +
         " and " + store.entity(lease.lessee_id).display_name + " at " +
         store.entity(lease.property_id).display_name;
}

std::string phrased(RandomStream& stream,
                    const std::vector<std::string>& phrasings,
                    const std::string& subject) {
  std::string tmpl = pick(stream, phrasings);
  std::string out;
  std::size_t pos = tmpl.find("{X}");
  if (pos == std::string::npos) return tmpl;
  out = tmpl.substr(0, pos) + subject + tmpl.substr(pos + 3);
  return out;
}

struct ClauseTarget {
  ClauseFlag clause;
  std::string field;
  std::string what;  // human phrase, e.g. "pet deposit"
};

const std::vector<ClauseTarget> kClauseTargets = {
    {ClauseFlag::pet, "pet_deposit", "pet deposit"},
    {ClauseFlag::early_termination, "termination_notice_days",
     "early termination notice period in days"},
    {ClauseFlag::renewal_option, "renewal_term_months",
     "renewal option term in months"},
    {ClauseFlag::parking, "parking_fee", "monthly parking fee"},
};

std::vector<const LeaseRecord*> leases_with_clause(
    const GroundTruthStore& store, ClauseFlag c, bool present) {
  std::vector<const LeaseRecord*> out;
  for (const auto& l : store.leases)
    if ((l.clauses.count(c) > 0) == present) out.push_back(&l);
  return out;
}

std::vector<std::string> lessors_with_leases(const GroundTruthStore& store) {
  std::set<std::string> ids;
  for (const auto& l : store.leases) ids.insert(l.lessor_id);
  return {ids.begin(), ids.end()};
}

}  // namespace

std::map<int, int> plan_level_counts(const QuestionMix& mix) {
  if (mix.level_counts) return *mix.level_counts;
  auto spread = [](int n, int first, int last, std::map<int, int>& out) {
    int k = last - first + 1;
    for (int lvl = first; lvl <= last; ++lvl)
      out[lvl] = n / k + (lvl - first < n % k ? 1 : 0);
  };
  int single = static_cast<int>(mix.single_doc_share * mix.total + 0.5);
  int agg = static_cast<int>(mix.aggregation_share * mix.total + 0.5);
  int probe = mix.total - single - agg;
  if (probe < 0) throw ConfigError("question mix shares exceed 1.0");
  std::map<int, int> out;
  spread(single, 1, 4, out);
  spread(agg, 5, 10, out);
  spread(probe, 11, 12, out);
  return out;
}

std::vector<Question> generate_single_doc(const GroundTruthStore& store,
                                          const std::map<int, int>& counts,
                                          RandomStream& stream) {
  std::vector<Question> out;
  auto count = [&](int lvl) {
    auto it = counts.find(lvl);
    return it == counts.end() ? 0 : it->second;
  };
  auto need_lease = [&]() -> const LeaseRecord& {
    if (store.leases.empty())
      throw GenerationError("single-doc questions need at least one lease");
    return store.leases[stream.next_below(store.leases.size())];
  };

  static const std::vector<std::string> rent_phrasings = {
      "What is the monthly rent for {X}?",
      "How much is the monthly rent under {X}?",
      "According to {X}, what monthly rent is charged?"};
  static const std::vector<std::string> deposit_phrasings = {
      "What is the security deposit for {X}?",
      "How much security deposit is required under {X}?",
      "State the security deposit amount for {X}."};
  static const std::vector<std::string> duration_phrasings = {
      "How many months does {X} run, from its start date to its end date?",
      "What is the duration of {X}, in whole months?",
      "For how many months is {X} in effect?"};
  static const std::vector<std::string> movein_phrasings = {
      "What is the total move-in cost (first month's rent plus security "
      "deposit) for {X}?",
      "Adding the first month's rent and the security deposit, how much is "
      "due at move-in under {X}?",
      "How much money in total (one month's rent plus the security deposit) "
      "does the tenant owe up front for {X}?"};
  static const std::vector<std::string> clause_phrasings = {
      "What is the {W} for {X}?",
      "According to {X}, what {W} applies?",
      "State the {W} specified in {X}."};

  for (int i = 0; i < count(1); ++i) {
    const LeaseRecord& lease = need_lease();
    bool rent = stream.next_bernoulli(0.5);
    Question q;
    q.level = 1;
    q.text = phrased(stream, rent ? rent_phrasings : deposit_phrasings,
                     lease_descriptor(store, lease));
    q.answer_key = AnswerValue::make_money(rent ? lease.monthly_rent
                                                : lease.security_deposit);
    q.provenance = {lease.lease_id};
    out.push_back(std::move(q));
  }
  for (int i = 0; i < count(2); ++i) {
    const LeaseRecord& lease = need_lease();
    Question q;
    q.level = 2;
    q.text = phrased(stream, duration_phrasings,
                     lease_descriptor(store, lease));
    q.answer_key = AnswerValue::make_number(
        whole_months_between(lease.start_date, lease.end_date));
    q.provenance = {lease.lease_id};
    out.push_back(std::move(q));
  }
  for (int i = 0; i < count(3); ++i) {
    // Target an optional field on a document that HAS it.
    std::vector<std::pair<const LeaseRecord*, const ClauseTarget*>> targets;
    for (const auto& ct : kClauseTargets)
      for (const auto* l : leases_with_clause(store, ct.clause, true))
        targets.emplace_back(l, &ct);
    if (targets.empty())
      throw GenerationError(
          "no lease carries any optional clause; raise clause probabilities "
          "in the config to generate L03 questions");
    auto [lease, ct] = targets[stream.next_below(targets.size())];
    Question q;
    q.level = 3;
    std::string text = pick(stream, clause_phrasings);
    auto sub = [&](const std::string& k, const std::string& v) {
      auto p = text.find(k);
      if (p != std::string::npos) text = text.substr(0, p) + v +
                                         text.substr(p + k.size());
    };
    sub("{W}", ct->what);
    sub("{X}", lease_descriptor(store, *lease));
    q.text = std::move(text);
    AnswerQuery query;
    query.kind = AnswerQuery::Kind::lease_field;
    query.lease_id = lease->lease_id;
    query.field = ct->field;
    q.answer_key = evaluate_query(store, query);
    q.provenance = {lease->lease_id};
    out.push_back(std::move(q));
  }
  for (int i = 0; i < count(4); ++i) {
    const LeaseRecord& lease = need_lease();
    Question q;
    q.level = 4;
    q.text = phrased(stream, movein_phrasings,
                     lease_descriptor(store, lease));
    q.answer_key =
        AnswerValue::make_money(lease.monthly_rent + lease.security_deposit);
    q.provenance = {lease.lease_id};
    out.push_back(std::move(q));
  }

  for (auto& q : out) {
    q.category = QuestionCategory::single_doc;
    q.scoring_type = ScoringType::numeric;
    q.text = with_instruction(std::move(q.text), q.scoring_type);
  }
  return out;
}

std::vector<Question> generate_aggregation(const GroundTruthStore& store,
                                           const std::map<int, int>& counts,
                                           RandomStream& stream) {
  std::vector<Question> out;
  auto count = [&](int lvl) {
    auto it = counts.find(lvl);
    return it == counts.end() ? 0 : it->second;
  };
  std::vector<std::string> lessors = lessors_with_leases(store);
  auto need_lessor = [&]() -> const std::string& {
    if (lessors.empty())
      throw GenerationError("aggregation questions need lessors with leases");
    return lessors[stream.next_below(lessors.size())];
  };
  auto lease_count = [&](const std::string& id) {
    std::size_t n = 0;
    for (const auto& l : store.leases)
      if (l.lessor_id == id) ++n;
    return n;
  };
  auto push = [&](int level, std::string text, AnswerQuery query,
                  ScoringType scoring) {
    Question q;
    q.level = level;
    q.scoring_type = scoring;
    q.category = QuestionCategory::aggregation;
    q.answer_key = evaluate_query(store, query);
    q.query = query;
    q.text = with_instruction(std::move(text), scoring);
    out.push_back(std::move(q));
  };

  static const std::vector<std::string> count_phrasings = {
      "How many leases does {X} have?",
      "Across all documents, how many lease contracts list {X} as the "
      "lessor?",
      "Count the leases held by {X}."};
  static const std::vector<std::string> sum_phrasings = {
      "What is the total monthly rent across all leases held by {X}?",
      "Summing every lease where {X} is the lessor, what is the combined "
      "monthly rent?",
      "Add up the monthly rent of each of {X}'s leases. What is the total?"};
  static const std::vector<std::string> enumerate_phrasings = {
      "List all lessees who hold leases with {X}.",
      "Name every tenant that has a lease where {X} is the lessor.",
      "Which lessees appear on {X}'s lease contracts? List them all."};
  static const std::vector<std::string> recent_phrasings = {
      "What is {X}'s most recent lease end date?",
      "Across all of {X}'s leases, which lease end date is the latest?",
      "Considering every lease held by {X}, what is the latest end date?"};
  static const std::vector<std::string> active_phrasings = {
      "How many leases were active in {X}?",
      "Count the leases whose term overlaps {X}.",
      "In {X}, how many lease contracts were in effect?"};

  for (int i = 0; i < count(5); ++i) {
    const std::string& lessor = need_lessor();
    AnswerQuery query;
    query.kind = AnswerQuery::Kind::count_leases_by_lessor;
    query.entity_id = lessor;
    push(5,
         phrased(stream, count_phrasings, store.entity(lessor).display_name),
         query, ScoringType::numeric);
  }
  for (int i = 0; i < count(6); ++i) {
    const std::string& lessor = need_lessor();
    AnswerQuery query;
    query.kind = AnswerQuery::Kind::sum_rent_by_lessor;
    query.entity_id = lessor;
    push(6, phrased(stream, sum_phrasings, store.entity(lessor).display_name),
         query, ScoringType::numeric);
  }
  for (int i = 0; i < count(7); ++i) {
    // Comparison questions are generated only over strictly unequal counts.
    std::vector<std::pair<std::string, std::string>> pairs;
    for (std::size_t a = 0; a < lessors.size(); ++a)
      for (std::size_t b = a + 1; b < lessors.size(); ++b)
        if (lease_count(lessors[a]) != lease_count(lessors[b]))
          pairs.emplace_back(lessors[a], lessors[b]);
    if (pairs.empty())
      throw GenerationError(
          "no lessor pair with unequal lease counts; L07 comparison "
          "questions cannot be generated for this universe");
    auto [a, b] = pairs[stream.next_below(pairs.size())];
    if (stream.next_bernoulli(0.5)) std::swap(a, b);
    AnswerQuery query;
    query.kind = AnswerQuery::Kind::compare_lessor_lease_counts;
    query.entity_id = a;
    query.entity_id2 = b;
    std::string na = store.entity(a).display_name;
    std::string nb = store.entity(b).display_name;
    static const std::vector<std::string> cmp_phrasings = {
        "Which lessor has more leases, {A} or {B}?",
        "Between {A} and {B}, who holds the greater number of leases?",
        "Compare {A} and {B}: which one is the lessor on more lease "
        "contracts?"};
    std::string text = pick(stream, cmp_phrasings);
    auto sub = [&](const std::string& k, const std::string& v) {
      auto p = text.find(k);
      text = text.substr(0, p) + v + text.substr(p + k.size());
    };
    sub("{A}", na);
    sub("{B}", nb);
    push(7, std::move(text), query, ScoringType::exact);
  }
  for (int i = 0; i < count(8); ++i) {
    const std::string& lessor = need_lessor();
    AnswerQuery query;
    query.kind = AnswerQuery::Kind::enumerate_lessees;
    query.entity_id = lessor;
    push(8,
         phrased(stream, enumerate_phrasings,
                 store.entity(lessor).display_name),
         query, ScoringType::set_match);
  }
  for (int i = 0; i < count(9); ++i) {
    // Tie cases (two leases ending the same day) are excluded.
    std::vector<std::string> eligible;
    for (const auto& id : lessors) {
      std::vector<Date> ends;
      for (const auto& l : store.leases)
        if (l.lessor_id == id) ends.push_back(l.end_date);
      std::sort(ends.begin(), ends.end());
      if (ends.size() == 1 || ends[ends.size() - 1] != ends[ends.size() - 2])
        eligible.push_back(id);
    }
    if (eligible.empty())
      throw GenerationError("every lessor's latest lease end date is tied; "
                            "L09 questions cannot be generated");
    const std::string& lessor = eligible[stream.next_below(eligible.size())];
    AnswerQuery query;
    query.kind = AnswerQuery::Kind::most_recent_end_date;
    query.entity_id = lessor;
    push(9,
         phrased(stream, recent_phrasings, store.entity(lessor).display_name),
         query, ScoringType::semantic);
  }
  for (int i = 0; i < count(10); ++i) {
    Quarter quarter{2024, 1 + static_cast<int>(stream.next_below(4))};
    AnswerQuery query;
    query.kind = AnswerQuery::Kind::count_active_in_quarter;
    query.quarter = quarter;
    push(10, phrased(stream, active_phrasings, quarter.label()), query,
         ScoringType::numeric);
  }
  return out;
}

std::vector<Question> generate_probes(GroundTruthStore& store,
                                      const std::map<int, int>& counts,
                                      RandomStream& stream) {
  std::vector<Question> out;
  auto count = [&](int lvl) {
    auto it = counts.find(lvl);
    return it == counts.end() ? 0 : it->second;
  };

  int l11 = count(11);
  if (l11 > 0) {
    // Each L11 question mirrors an answerable form but names reserve
    // entities that never appear in any document.
    int pairs = (l11 + 2) / 3;  // forms rotate: rent / lease count / reports
    auto probe_lessors = reserve_probe_entities(store.pools, "lessor",
                                                static_cast<std::size_t>(pairs));
    auto probe_lessees = reserve_probe_entities(store.pools, "lessee",
                                                static_cast<std::size_t>(pairs));
    auto probe_agents = reserve_probe_entities(store.pools, "sales_agent",
                                               static_cast<std::size_t>(pairs));
    static const std::vector<std::string> rent_forms = {
        "What is the monthly rent for the lease between {A} and {B}?",
        "How much is the monthly rent under the lease between {A} and {B}?",
        "State the monthly rent for the lease between {A} and {B}."};
    static const std::vector<std::string> count_forms = {
        "How many leases does {A} have?",
        "Count the leases held by {A}.",
        "Across all documents, how many lease contracts list {A} as the "
        "lessor?"};
    static const std::vector<std::string> report_forms = {
        "How many field reports did {A} submit?",
        "Count the field reports filed by {A}.",
        "How many sales activity reports were submitted by {A}?"};
    for (int i = 0; i < l11; ++i) {
      Question q;
      q.level = 11;
      int form = i % 3;
      int slot = i / 3;
      std::string text;
      if (form == 0) {
        text = pick(stream, rent_forms);
        auto p = text.find("{A}");
        text = text.substr(0, p) + probe_lessors[slot].display_name +
               text.substr(p + 3);
        p = text.find("{B}");
        text = text.substr(0, p) + probe_lessees[slot].display_name +
               text.substr(p + 3);
      } else if (form == 1) {
        text = phrased(stream, count_forms, probe_lessors[slot].display_name);
      } else {
        text = phrased(stream, report_forms, probe_agents[slot].display_name);
      }
      q.text = std::move(text);
      q.answer_key = AnswerValue::unknown();
      out.push_back(std::move(q));
    }
  }

  int l12 = count(12);
  if (l12 > 0) {
    std::vector<std::pair<const LeaseRecord*, const ClauseTarget*>> targets;
    for (const auto& ct : kClauseTargets)
      for (const auto* l : leases_with_clause(store, ct.clause, false))
        targets.emplace_back(l, &ct);
    if (targets.empty())
      throw GenerationError(
          "every lease carries every optional clause; lower clause "
          "probabilities to generate L12 questions");
    shuffle(stream, targets);
    static const std::vector<std::string> absent_phrasings = {
        "What is the {W} for {X}?",
        "According to {X}, what {W} applies?",
        "State the {W} specified in {X}."};
    for (int i = 0; i < l12; ++i) {
      auto [lease, ct] = targets[static_cast<std::size_t>(i) % targets.size()];
      Question q;
      q.level = 12;
      std::string text = pick(stream, absent_phrasings);
      auto sub = [&](const std::string& k, const std::string& v) {
        auto p = text.find(k);
        if (p != std::string::npos)
          text = text.substr(0, p) + v + text.substr(p + k.size());
      };
      sub("{W}", ct->what);
      sub("{X}", lease_descriptor(store, *lease));
      q.text = std::move(text);
      q.answer_key = AnswerValue::not_applicable();
      q.provenance = {lease->lease_id};
      out.push_back(std::move(q));
    }
  }

  for (auto& q : out) {
    q.category = QuestionCategory::probe;
    q.scoring_type = ScoringType::semantic;
    q.text = with_instruction(std::move(q.text), q.scoring_type);
  }
  return out;
}

std::vector<Question> generate_question_set(GroundTruthStore& store,
                                            const QuestionMix& mix,
                                            RandomStream& stream) {
  auto counts = plan_level_counts(mix);
  std::vector<Question> all = generate_single_doc(store, counts, stream);
  auto agg = generate_aggregation(store, counts, stream);
  auto probes = generate_probes(store, counts, stream);
  all.insert(all.end(), agg.begin(), agg.end());
  all.insert(all.end(), probes.begin(), probes.end());
  int n = 0;
  for (auto& q : all) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "q-%s-%04d", q.level_label().c_str(), ++n);
    q.question_id = buf;
  }
  return all;
}

void emit_question_set(const std::vector<Question>& questions,
                       const std::string& questions_path,
                       const std::string& answers_path) {
  std::unordered_set<std::string> seen;
  for (const auto& q : questions)
    if (!seen.insert(q.question_id).second)
      throw GenerationError("duplicate question_id: " + q.question_id);

  std::ofstream qf(questions_path, std::ios::binary);
  std::ofstream af(answers_path, std::ios::binary);
  if (!qf || !af)
    throw UsageError("cannot write question/key files");
  for (const auto& q : questions) {
    nlohmann::json pub = {{"question_id", q.question_id},
                          {"level", q.level_label()},
                          {"category", category_name(q.category)},
                          {"scoring_type", scoring_type_name(q.scoring_type)},
                          {"text", q.text}};
    qf << pub.dump() << "\n";
    nlohmann::json key = {{"question_id", q.question_id},
                          {"level", q.level_label()},
                          {"answer_key", q.answer_key.to_json()},
                          {"provenance", q.provenance}};
    if (q.query) key["query"] = q.query->to_json();
    af << key.dump() << "\n";
  }
}

std::vector<QuestionMeta> load_questions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("missing question file: " + path);
  std::vector<QuestionMeta> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    QuestionMeta m;
    m.question_id = j.at("question_id");
    std::string lvl = j.at("level");
    m.level = std::stoi(lvl.substr(1));
    m.category = category_for_level(m.level);
    m.scoring_type = scoring_type_from_name(j.at("scoring_type"));
    m.text = j.at("text");
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<AnswerKeyEntry> load_answer_keys(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("missing answer key file: " + path);
  std::vector<AnswerKeyEntry> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    out.push_back({j.at("question_id"),
                   AnswerValue::from_json(j.at("answer_key"))});
  }
  return out;
}

}  // namespace riker
