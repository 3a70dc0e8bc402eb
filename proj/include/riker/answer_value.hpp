#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "riker/dates.hpp"
#include "riker/money.hpp"

namespace riker {

// Machine-checkable expected answer. Money and counts are stored exactly;
// name sets are kept canonically sorted and duplicate-free.
struct AnswerValue {
  enum class Kind {
    text,
    number,
    money,
    date,
    entity_name,
    name_set,
    unknown_sentinel,
    na_sentinel
  };

  Kind kind = Kind::text;
  std::string text;                 // text / entity_name
  std::int64_t number = 0;          // number
  Cents cents = 0;                  // money
  Date date;                        // date
  std::vector<std::string> names;   // name_set, sorted

  static AnswerValue make_text(std::string s);
  static AnswerValue make_entity(std::string s);
  static AnswerValue make_number(std::int64_t n);
  static AnswerValue make_money(Cents c);
  static AnswerValue make_date(Date d);
  static AnswerValue make_name_set(std::vector<std::string> v);
  static AnswerValue unknown();
  static AnswerValue not_applicable();

  // Canonical surface form, as declared in the corpus manifest
  // (money "$1,250.00", dates ISO, sets comma-joined).
  std::string canonical_reply() const;

  nlohmann::json to_json() const;
  static AnswerValue from_json(const nlohmann::json& j);

  bool operator==(const AnswerValue&) const = default;
};

std::string answer_kind_name(AnswerValue::Kind k);

}  // namespace riker
