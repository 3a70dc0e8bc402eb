#include "riker/scoring.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>

namespace riker {

std::string finish_state_name(FinishState s) {
  switch (s) {
    case FinishState::completed: return "completed";
    case FinishState::length_truncated: return "length_truncated";
    case FinishState::transport_error: return "transport_error";
  }
  return "completed";
}

FinishState finish_state_from_name(const std::string& s) {
  if (s == "completed") return FinishState::completed;
  if (s == "length_truncated") return FinishState::length_truncated;
  if (s == "transport_error") return FinishState::transport_error;
  throw UsageError("unknown finish state: " + s);
}

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::correct: return "correct";
    case Verdict::incorrect: return "incorrect";
    case Verdict::unscorable: return "unscorable";
  }
  return "incorrect";
}

std::string flag_name(ResponseFlag f) {
  switch (f) {
    case ResponseFlag::fabricated: return "fabricated";
    case ResponseFlag::coherence_loss: return "coherence_loss";
    case ResponseFlag::format_violation: return "format_violation";
  }
  return "fabricated";
}

nlohmann::json ScoredResponse::to_json() const {
  nlohmann::json j = {{"question_id", question_id},
                      {"run_index", run_index},
                      {"raw_text", raw_text},
                      {"finish_state", finish_state_name(finish_state)},
                      {"verdict", verdict_name(verdict)}};
  if (extracted_answer) j["extracted_answer"] = *extracted_answer;
  nlohmann::json flag_list = nlohmann::json::array();
  for (ResponseFlag f : flags) flag_list.push_back(flag_name(f));
  j["flags"] = std::move(flag_list);
  return j;
}

ScoredResponse ScoredResponse::from_json(const nlohmann::json& j) {
  ScoredResponse r;
  r.question_id = j.at("question_id");
  r.run_index = j.value("run_index", 0);
  r.raw_text = j.value("raw_text", "");
  r.finish_state = finish_state_from_name(j.at("finish_state"));
  if (j.contains("extracted_answer"))
    r.extracted_answer = j["extracted_answer"].get<std::string>();
  std::string v = j.at("verdict");
  r.verdict = v == "correct" ? Verdict::correct
              : v == "unscorable" ? Verdict::unscorable
                                  : Verdict::incorrect;
  for (const auto& f : j.value("flags", nlohmann::json::array())) {
    std::string name = f;
    if (name == "fabricated") r.flags.insert(ResponseFlag::fabricated);
    if (name == "coherence_loss") r.flags.insert(ResponseFlag::coherence_loss);
    if (name == "format_violation")
      r.flags.insert(ResponseFlag::format_violation);
  }
  return r;
}

namespace {

std::vector<std::string> load_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("missing lexicon file: " + path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line[0] != '#') out.push_back(line);
  }
  return out;
}

bool is_wrapper(char c) {
  return c == '[' || c == ']' || c == '(' || c == ')' || c == '{' ||
         c == '}' || c == '"' || c == '\'' || c == '*' || c == '_' ||
         c == '`';
}

std::string trim_wrappers(std::string s) {
  auto drop_front = [&](auto pred) {
    std::size_t i = 0;
    while (i < s.size() && pred(s[i])) ++i;
    s.erase(0, i);
  };
  auto drop_back = [&](auto pred) {
    while (!s.empty() && pred(s.back())) s.pop_back();
  };
  for (int pass = 0; pass < 3; ++pass) {
    drop_front([](char c) {
      return std::isspace(static_cast<unsigned char>(c)) || is_wrapper(c);
    });
    drop_back([](char c) {
      return std::isspace(static_cast<unsigned char>(c)) || is_wrapper(c) ||
             c == '.' || c == ',' || c == ';' || c == ':' || c == '!';
    });
  }
  return s;
}

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return s;
}

// First numeric token, commas stripped. Returns false when nothing parses.
bool parse_numeric_token(const std::string& text, double* value,
                         bool* is_integral, long long* int_value,
                         int* frac_digits, long long* scaled_by_100) {
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    char c = text[i];
    bool starts = std::isdigit(static_cast<unsigned char>(c)) ||
                  ((c == '-' || c == '+') && i + 1 < n &&
                   (std::isdigit(static_cast<unsigned char>(text[i + 1])) ||
                    (text[i + 1] == '.' && i + 2 < n &&
                     std::isdigit(static_cast<unsigned char>(text[i + 2]))))) ||
                  (c == '.' && i + 1 < n &&
                   std::isdigit(static_cast<unsigned char>(text[i + 1])));
    if (starts) break;
    ++i;
  }
  if (i >= n) return false;

  bool negative = false;
  if (text[i] == '-') {
    negative = true;
    ++i;
  } else if (text[i] == '+') {
    ++i;
  }
  std::string int_digits, frac;
  while (i < n && (std::isdigit(static_cast<unsigned char>(text[i])) ||
                   text[i] == ',')) {
    if (text[i] != ',') int_digits.push_back(text[i]);
    ++i;
  }
  if (i < n && text[i] == '.' && i + 1 < n &&
      std::isdigit(static_cast<unsigned char>(text[i + 1]))) {
    ++i;
    while (i < n && std::isdigit(static_cast<unsigned char>(text[i]))) {
      frac.push_back(text[i]);
      ++i;
    }
  }
  if (int_digits.empty() && frac.empty()) return false;
  if (int_digits.empty()) int_digits = "0";
  if (int_digits.size() > 15 || frac.size() > 12) return false;

  long long whole = std::stoll(int_digits);
  *frac_digits = static_cast<int>(frac.size());
  *is_integral = frac.empty() ||
                 std::all_of(frac.begin(), frac.end(),
                             [](char c) { return c == '0'; });
  long long fv = frac.empty() ? 0 : std::stoll(frac);
  double v = static_cast<double>(whole) +
             (frac.empty() ? 0.0
                           : static_cast<double>(fv) /
                                 std::pow(10.0, static_cast<double>(frac.size())));
  // Exact cents: take at most two fraction digits, reject deeper cents.
  long long cents_frac = 0;
  bool cents_exact = true;
  if (frac.size() >= 1) cents_frac += (frac[0] - '0') * 10;
  if (frac.size() >= 2) cents_frac += (frac[1] - '0');
  for (std::size_t k = 2; k < frac.size(); ++k)
    if (frac[k] != '0') cents_exact = false;
  long long scaled = whole * 100 + cents_frac;
  if (negative) {
    v = -v;
    whole = -whole;
    scaled = -scaled;
  }
  *value = v;
  *int_value = whole;
  *scaled_by_100 = cents_exact ? scaled : std::numeric_limits<long long>::min();
  return true;
}

}  // namespace

SentinelLexicons SentinelLexicons::load(const std::string& data_dir) {
  SentinelLexicons lex;
  lex.unknown_class = load_lines(data_dir + "/lexicons/unknown_equivalents.txt");
  lex.na_class = load_lines(data_dir + "/lexicons/na_equivalents.txt");
  return lex;
}

bool SentinelLexicons::is_unknown_class(const std::string& normalized) const {
  return std::find(unknown_class.begin(), unknown_class.end(), normalized) !=
         unknown_class.end();
}

bool SentinelLexicons::is_na_class(const std::string& normalized) const {
  return std::find(na_class.begin(), na_class.end(), normalized) !=
         na_class.end();
}

std::optional<std::string> extract_answer(const std::string& raw_text) {
  static const std::string marker = "final answer:";
  std::string lower = lowercase(raw_text);
  std::size_t pos = lower.rfind(marker);
  if (pos != std::string::npos) {
    std::size_t start = pos + marker.size();
    std::size_t eol = raw_text.find('\n', start);
    std::string rest = raw_text.substr(
        start, eol == std::string::npos ? std::string::npos : eol - start);
    return trim_wrappers(rest);
  }
  // Fallback: the final non-empty line.
  std::size_t end = raw_text.size();
  while (end > 0) {
    std::size_t begin = raw_text.rfind('\n', end - 1);
    std::size_t line_start = begin == std::string::npos ? 0 : begin + 1;
    std::string line =
        trim_wrappers(raw_text.substr(line_start, end - line_start));
    if (!line.empty()) return line;
    if (begin == std::string::npos) break;
    end = begin;
  }
  return std::nullopt;
}

std::string normalize_answer_text(const std::string& s) {
  std::string t = lowercase(trim_wrappers(s));
  std::string out;
  bool in_space = false;
  for (char c : t) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      in_space = true;
      continue;
    }
    if (in_space && !out.empty()) out.push_back(' ');
    in_space = false;
    out.push_back(c);
  }
  return out;
}

Verdict score_exact(const std::string& extracted, const AnswerValue& key) {
  return normalize_answer_text(extracted) == normalize_answer_text(key.text)
             ? Verdict::correct
             : Verdict::incorrect;
}

Verdict score_numeric(const std::string& extracted, const AnswerValue& key,
                      bool* format_violation) {
  if (format_violation) *format_violation = false;
  double value = 0;
  bool is_integral = false;
  long long int_value = 0, scaled = 0;
  int frac_digits = 0;
  if (!parse_numeric_token(extracted, &value, &is_integral, &int_value,
                           &frac_digits, &scaled)) {
    if (format_violation) *format_violation = true;
    return Verdict::incorrect;
  }
  if (key.kind == AnswerValue::Kind::money) {
    // Compared in cents, exactly.
    if (scaled == std::numeric_limits<long long>::min())
      return Verdict::incorrect;
    return scaled == key.cents ? Verdict::correct : Verdict::incorrect;
  }
  if (key.kind == AnswerValue::Kind::number) {
    if (is_integral)
      return int_value == key.number ? Verdict::correct : Verdict::incorrect;
    double rel = std::fabs(value - static_cast<double>(key.number)) /
                 std::max(1.0, std::fabs(static_cast<double>(key.number)));
    return rel <= 1e-6 ? Verdict::correct : Verdict::incorrect;
  }
  return Verdict::incorrect;
}

Verdict score_set(const std::string& extracted, const AnswerValue& key) {
  std::vector<std::string> parts;
  std::string current;
  auto flush = [&]() {
    std::string norm = normalize_answer_text(current);
    if (!norm.empty()) parts.push_back(norm);
    current.clear();
  };
  std::string padded = " " + extracted + " ";
  for (std::size_t i = 1; i < padded.size(); ++i) {
    char c = padded[i];
    if (c == ',' || c == ';' || c == '\n') {
      flush();
      continue;
    }
    // " and " as a separator (word-bounded).
    if ((c == 'a' || c == 'A') && padded[i - 1] == ' ' &&
        i + 3 < padded.size() &&
        lowercase(padded.substr(i, 3)) == "and" && padded[i + 3] == ' ') {
      flush();
      i += 2;
      continue;
    }
    current.push_back(c);
  }
  flush();
  std::sort(parts.begin(), parts.end());
  parts.erase(std::unique(parts.begin(), parts.end()), parts.end());

  std::vector<std::string> expected;
  for (const auto& n : key.names) expected.push_back(normalize_answer_text(n));
  std::sort(expected.begin(), expected.end());
  return parts == expected ? Verdict::correct : Verdict::incorrect;
}

Verdict score_semantic(const std::string& extracted, const AnswerValue& key,
                       const SentinelLexicons& lexicons) {
  std::string norm = normalize_answer_text(extracted);
  switch (key.kind) {
    case AnswerValue::Kind::date: {
      auto parsed = parse_flexible_date(trim_wrappers(extracted));
      return (parsed && *parsed == key.date) ? Verdict::correct
                                             : Verdict::incorrect;
    }
    case AnswerValue::Kind::unknown_sentinel:
      return lexicons.is_unknown_class(norm) ? Verdict::correct
                                             : Verdict::incorrect;
    case AnswerValue::Kind::na_sentinel:
      return lexicons.is_na_class(norm) ? Verdict::correct
                                        : Verdict::incorrect;
    default:
      // Other kinds fall back to the exact rule.
      return norm == normalize_answer_text(key.canonical_reply())
                 ? Verdict::correct
                 : Verdict::incorrect;
  }
}

bool detect_coherence_loss(FinishState finish_state) {
  return finish_state == FinishState::length_truncated;
}

ScoredResponse score_response(const QuestionForScoring& question,
                              const std::string& raw_text,
                              FinishState finish_state,
                              const SentinelLexicons& lexicons,
                              int run_index) {
  ScoredResponse r;
  r.question_id = question.question_id;
  r.run_index = run_index;
  r.raw_text = raw_text;
  r.finish_state = finish_state;
  if (detect_coherence_loss(finish_state))
    r.flags.insert(ResponseFlag::coherence_loss);

  if (finish_state == FinishState::transport_error) {
    r.verdict = Verdict::unscorable;
    return r;
  }

  r.extracted_answer = extract_answer(raw_text);
  if (!r.extracted_answer) {
    r.verdict = Verdict::incorrect;
    return r;
  }
  const std::string& extracted = *r.extracted_answer;

  switch (question.scoring_type) {
    case ScoringType::exact:
      r.verdict = score_exact(extracted, question.answer_key);
      break;
    case ScoringType::numeric: {
      bool violation = false;
      r.verdict = score_numeric(extracted, question.answer_key, &violation);
      if (violation) r.flags.insert(ResponseFlag::format_violation);
      break;
    }
    case ScoringType::set_match:
      r.verdict = score_set(extracted, question.answer_key);
      break;
    case ScoringType::semantic:
      r.verdict = score_semantic(extracted, question.answer_key, lexicons);
      break;
  }

  // A specific (non-sentinel) answer on a probe question is fabrication;
  // sentinel answers on answerable questions are merely incorrect.
  if (question.category == QuestionCategory::probe) {
    std::string norm = normalize_answer_text(extracted);
    bool sentinel = norm.empty() || lexicons.is_unknown_class(norm) ||
                    lexicons.is_na_class(norm);
    if (!sentinel) r.flags.insert(ResponseFlag::fabricated);
  }
  return r;
}

}  // namespace riker
