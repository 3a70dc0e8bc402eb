#include "riker/doc_templates.hpp"

#include <algorithm>
#include <fstream>

#include "riker/tokens.hpp"

namespace riker {

std::string doc_type_name(DocType t) {
  switch (t) {
    case DocType::lease: return "lease";
    case DocType::field_report: return "field_report";
    case DocType::hr_evaluation: return "hr_evaluation";
  }
  return "lease";
}

DocType doc_type_from_name(const std::string& s) {
  if (s == "lease") return DocType::lease;
  if (s == "field_report") return DocType::field_report;
  if (s == "hr_evaluation") return DocType::hr_evaluation;
  throw UsageError("unknown doc type: " + s);
}

std::string RenderedDocument::relative_path() const {
  return doc_type_name(doc_type) + "/" + doc_id + ".txt";
}

namespace {

std::string substitute(const std::string& tmpl,
                       const std::map<std::string, std::string>& slots) {
  std::string out;
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    std::size_t open = tmpl.find("{{", pos);
    if (open == std::string::npos) {
      out.append(tmpl, pos, std::string::npos);
      break;
    }
    out.append(tmpl, pos, open - pos);
    std::size_t close = tmpl.find("}}", open);
    if (close == std::string::npos)
      throw ConfigError("template: unclosed placeholder near: " +
                        tmpl.substr(open, 30));
    std::string key = tmpl.substr(open + 2, close - open - 2);
    auto it = slots.find(key);
    if (it == slots.end())
      throw ConfigError("template: unbound placeholder {{" + key + "}}");
    out += it->second;
    pos = close + 2;
  }
  return out;
}

}  // namespace

TemplateRegistry TemplateRegistry::load(const std::string& data_dir) {
  TemplateRegistry reg;
  for (const char* name : {"lease", "field_report", "hr_evaluation"}) {
    std::string path = data_dir + "/templates/" + name + ".json";
    std::ifstream in(path);
    if (!in) throw ConfigError("missing template file: " + path);
    nlohmann::json j = nlohmann::json::parse(in);

    DocTemplate t;
    t.registers = j.at("registers").get<std::vector<std::string>>();
    if (t.registers.size() < 2)
      throw ConfigError(std::string(name) + ": needs >= 2 register templates");
    for (auto& [slot, per_reg] : j.at("sections").items()) {
      for (auto& [reg_name, variants] : per_reg.items()) {
        auto texts = variants.get<std::vector<std::string>>();
        if (texts.size() < 2)
          throw ConfigError(std::string(name) + ": section '" + slot +
                            "' register '" + reg_name +
                            "' needs >= 2 boilerplate variants");
        t.sections[slot][reg_name] = std::move(texts);
      }
    }
    t.section_orders =
        j.at("section_orders").get<std::vector<std::vector<std::string>>>();
    if (t.section_orders.empty())
      throw ConfigError(std::string(name) + ": empty section order whitelist");
    for (auto& [reg_name, titles] : j.at("titles").items())
      t.titles[reg_name] = titles.get<std::vector<std::string>>();
    if (j.contains("optional_order"))
      t.optional_order =
          j.at("optional_order").get<std::vector<std::string>>();
    reg.templates_[name] = std::move(t);

    if (j.contains("trigger_phrases"))
      for (auto& [clause, phrases] : j.at("trigger_phrases").items())
        reg.trigger_phrases_[clause] =
            phrases.get<std::vector<std::string>>();
  }
  return reg;
}

const TemplateRegistry::DocTemplate& TemplateRegistry::tpl(DocType t) const {
  auto it = templates_.find(doc_type_name(t));
  if (it == templates_.end())
    throw ConfigError("template registry missing doc type: " +
                      doc_type_name(t));
  return it->second;
}

const std::vector<std::string>& TemplateRegistry::trigger_phrases(
    ClauseFlag clause) const {
  auto it = trigger_phrases_.find(clause_name(clause));
  if (it == trigger_phrases_.end())
    throw ConfigError("no trigger phrases for clause: " + clause_name(clause));
  return it->second;
}

StyleVariant TemplateRegistry::select_variant(DocType doc_type,
                                              RandomStream& stream) const {
  const DocTemplate& t = tpl(doc_type);
  StyleVariant v;
  v.register_name = pick(stream, t.registers);
  v.section_order_idx =
      static_cast<int>(stream.next_below(t.section_orders.size()));
  // Sections visited in sorted slot order so the draw sequence is fixed.
  for (const auto& [slot, per_reg] : t.sections) {
    auto it = per_reg.find(v.register_name);
    if (it == per_reg.end())
      throw ConfigError("section '" + slot + "' missing register '" +
                        v.register_name + "'");
    v.boilerplate[slot] = static_cast<int>(stream.next_below(it->second.size()));
  }
  v.boilerplate["__title"] = static_cast<int>(
      stream.next_below(t.titles.at(v.register_name).size()));
  return v;
}

RenderedDocument TemplateRegistry::render_with(
    DocType doc_type, const std::string& doc_id, const StyleVariant& variant,
    const std::map<std::string, std::string>& slots,
    const std::vector<std::string>& present_optional) const {
  const DocTemplate& t = tpl(doc_type);
  if (static_cast<std::size_t>(variant.section_order_idx) >=
      t.section_orders.size())
    throw UsageError("variant/section-order mismatch for " +
                     doc_type_name(doc_type));

  RenderedDocument doc;
  doc.doc_id = doc_id;
  doc.doc_type = doc_type;
  doc.source_record_id = doc_id;

  const auto& title_variants = t.titles.at(variant.register_name);
  int title_idx = variant.boilerplate.count("__title")
                      ? variant.boilerplate.at("__title")
                      : 0;
  doc.title = substitute(
      title_variants[static_cast<std::size_t>(title_idx) %
                     title_variants.size()],
      slots);

  std::vector<std::string> order =
      t.section_orders[variant.section_order_idx];
  for (const auto& opt : t.optional_order)
    if (std::find(present_optional.begin(), present_optional.end(), opt) !=
        present_optional.end())
      order.push_back(opt);

  std::string body = doc.title + "\n\n";
  for (const auto& slot : order) {
    auto sec = t.sections.find(slot);
    if (sec == t.sections.end())
      throw ConfigError("section order names unknown slot: " + slot);
    const auto& variants = sec->second.at(variant.register_name);
    int idx = variant.boilerplate.count(slot) ? variant.boilerplate.at(slot)
                                              : 0;
    body += substitute(variants[static_cast<std::size_t>(idx) %
                                variants.size()],
                       slots);
    body += "\n\n";
  }
  while (!body.empty() && body.back() == '\n') body.pop_back();
  body.push_back('\n');
  doc.body = std::move(body);
  doc.token_estimate = estimate_tokens(doc.body);
  return doc;
}

RenderedDocument TemplateRegistry::render(const GroundTruthStore& store,
                                          const LeaseRecord& record,
                                          const StyleVariant& variant) const {
  std::map<std::string, std::string> slots;
  slots["lease_id"] = record.lease_id;
  slots["lessor"] = store.entity(record.lessor_id).display_name;
  slots["lessee"] = store.entity(record.lessee_id).display_name;
  slots["property"] = store.entity(record.property_id).display_name;
  slots["start_date"] = record.start_date.long_form();
  slots["end_date"] = record.end_date.long_form();
  slots["duration_months"] = std::to_string(
      whole_months_between(record.start_date, record.end_date));
  slots["monthly_rent"] = format_money(record.monthly_rent);
  slots["security_deposit"] = format_money(record.security_deposit);

  std::vector<std::string> present;
  if (record.agent_id) {
    slots["agent"] = store.entity(*record.agent_id).display_name;
    present.push_back("agent");
  }
  if (record.pet_deposit) {
    slots["pet_deposit"] = format_money(*record.pet_deposit);
    present.push_back("pet");
  }
  if (record.termination_notice_days) {
    slots["notice_days"] = std::to_string(*record.termination_notice_days);
    present.push_back("early_termination");
  }
  if (record.renewal_term_months) {
    slots["renewal_term"] = std::to_string(*record.renewal_term_months);
    present.push_back("renewal_option");
  }
  if (record.parking_fee) {
    slots["parking_fee"] = format_money(*record.parking_fee);
    present.push_back("parking");
  }
  return render_with(DocType::lease, record.lease_id, variant, slots, present);
}

RenderedDocument TemplateRegistry::render(const GroundTruthStore& store,
                                          const FieldReportRecord& record,
                                          const StyleVariant& variant) const {
  std::map<std::string, std::string> slots;
  slots["report_id"] = record.report_id;
  slots["agent"] = store.entity(record.agent_id).display_name;
  slots["prospect"] = store.entity(record.prospect_entity_id).display_name;
  slots["report_date"] = record.report_date.long_form();
  slots["calls"] = std::to_string(record.calls_made);
  slots["meetings"] = std::to_string(record.meetings_held);
  slots["site_visits"] = std::to_string(record.site_visits);
  static const std::map<ReportOutcome, std::string> outcome_text = {
      {ReportOutcome::interested, "Prospect interested"},
      {ReportOutcome::negotiating, "Negotiation in progress"},
      {ReportOutcome::closed_won, "Contract closed"},
      {ReportOutcome::closed_lost, "Prospect lost"},
      {ReportOutcome::follow_up_scheduled, "Follow-up scheduled"}};
  slots["outcome"] = outcome_text.at(record.outcome);

  std::vector<std::string> present;
  if (record.lease_id) {
    const LeaseRecord* lease = store.find_lease(*record.lease_id);
    if (!lease) throw UsageError("report links unknown lease: " +
                                 *record.lease_id);
    slots["lease_lessor"] = store.entity(lease->lessor_id).display_name;
    slots["lease_lessee"] = store.entity(lease->lessee_id).display_name;
    slots["lease_property"] = store.entity(lease->property_id).display_name;
    present.push_back("linked_lease");
  }
  return render_with(DocType::field_report, record.report_id, variant, slots,
                     present);
}

RenderedDocument TemplateRegistry::render(const GroundTruthStore& store,
                                          const HrEvaluationRecord& record,
                                          const StyleVariant& variant) const {
  std::map<std::string, std::string> slots;
  slots["eval_id"] = record.eval_id;
  slots["employee"] = store.entity(record.agent_id).display_name;
  slots["evaluator"] = store.entity(record.evaluator_id).display_name;
  slots["period"] = record.period.label();
  slots["rating"] = std::to_string(record.rating);
  slots["deals_closed"] = std::to_string(record.deals_closed);
  slots["client_meetings"] = std::to_string(record.client_meetings);
  return render_with(DocType::hr_evaluation, record.eval_id, variant, slots,
                     {});
}

std::vector<RenderedDocument> TemplateRegistry::render_corpus(
    const GroundTruthStore& store, RandomStream& stream) const {
  std::vector<RenderedDocument> docs;
  // Variants drawn sequentially in emit order; rendering itself is pure.
  for (const auto& l : store.leases)
    docs.push_back(render(store, l, select_variant(DocType::lease, stream)));
  for (const auto& r : store.field_reports)
    docs.push_back(
        render(store, r, select_variant(DocType::field_report, stream)));
  for (const auto& ev : store.hr_evaluations)
    docs.push_back(
        render(store, ev, select_variant(DocType::hr_evaluation, stream)));
  return docs;
}

}  // namespace riker
