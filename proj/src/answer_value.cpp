#include "riker/answer_value.hpp"

#include <algorithm>

#include "riker/rng.hpp"

namespace riker {

std::string answer_kind_name(AnswerValue::Kind k) {
  switch (k) {
    case AnswerValue::Kind::text: return "text";
    case AnswerValue::Kind::number: return "number";
    case AnswerValue::Kind::money: return "money";
    case AnswerValue::Kind::date: return "date";
    case AnswerValue::Kind::entity_name: return "entity_name";
    case AnswerValue::Kind::name_set: return "name_set";
    case AnswerValue::Kind::unknown_sentinel: return "unknown_sentinel";
    case AnswerValue::Kind::na_sentinel: return "na_sentinel";
  }
  return "text";
}

AnswerValue AnswerValue::make_text(std::string s) {
  AnswerValue v;
  v.kind = Kind::text;
  v.text = std::move(s);
  return v;
}

AnswerValue AnswerValue::make_entity(std::string s) {
  AnswerValue v;
  v.kind = Kind::entity_name;
  v.text = std::move(s);
  return v;
}

AnswerValue AnswerValue::make_number(std::int64_t n) {
  AnswerValue v;
  v.kind = Kind::number;
  v.number = n;
  return v;
}

AnswerValue AnswerValue::make_money(Cents c) {
  AnswerValue v;
  v.kind = Kind::money;
  v.cents = c;
  return v;
}

AnswerValue AnswerValue::make_date(Date d) {
  AnswerValue v;
  v.kind = Kind::date;
  v.date = d;
  return v;
}

AnswerValue AnswerValue::make_name_set(std::vector<std::string> names) {
  AnswerValue v;
  v.kind = Kind::name_set;
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  v.names = std::move(names);
  return v;
}

AnswerValue AnswerValue::unknown() {
  AnswerValue v;
  v.kind = Kind::unknown_sentinel;
  return v;
}

AnswerValue AnswerValue::not_applicable() {
  AnswerValue v;
  v.kind = Kind::na_sentinel;
  return v;
}

std::string AnswerValue::canonical_reply() const {
  switch (kind) {
    case Kind::text:
    case Kind::entity_name:
      return text;
    case Kind::number:
      return std::to_string(number);
    case Kind::money:
      return format_money(cents);
    case Kind::date:
      return date.iso();
    case Kind::name_set: {
      std::string out;
      for (const auto& n : names) {
        if (!out.empty()) out += ", ";
        out += n;
      }
      return out;
    }
    case Kind::unknown_sentinel:
      return "Unknown";
    case Kind::na_sentinel:
      return "N/A";
  }
  return text;
}

nlohmann::json AnswerValue::to_json() const {
  nlohmann::json j;
  j["kind"] = answer_kind_name(kind);
  switch (kind) {
    case Kind::text:
    case Kind::entity_name:
      j["value"] = text;
      break;
    case Kind::number:
      j["value"] = number;
      break;
    case Kind::money:
      j["cents"] = cents;
      break;
    case Kind::date:
      j["value"] = date.iso();
      break;
    case Kind::name_set:
      j["values"] = names;
      break;
    case Kind::unknown_sentinel:
    case Kind::na_sentinel:
      break;
  }
  return j;
}

AnswerValue AnswerValue::from_json(const nlohmann::json& j) {
  const std::string k = j.at("kind");
  if (k == "text") return make_text(j.at("value"));
  if (k == "entity_name") return make_entity(j.at("value"));
  if (k == "number") return make_number(j.at("value"));
  if (k == "money") return make_money(j.at("cents"));
  if (k == "date") {
    auto d = parse_iso_date(j.at("value"));
    if (!d) throw UsageError("bad date in answer key: " +
                             j.at("value").get<std::string>());
    return make_date(*d);
  }
  if (k == "name_set")
    return make_name_set(j.at("values").get<std::vector<std::string>>());
  if (k == "unknown_sentinel") return unknown();
  if (k == "na_sentinel") return not_applicable();
  throw UsageError("unknown answer kind: " + k);
}

}  // namespace riker
