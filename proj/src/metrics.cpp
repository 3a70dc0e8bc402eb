#include "riker/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unordered_map>

#include "riker/rng.hpp"

namespace riker {

namespace {

double ratio(long long num, long long den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", v * 100.0);
  return buf;
}

}  // namespace

nlohmann::json MetricsSummary::to_json() const {
  nlohmann::json per_level = nlohmann::json::object();
  for (const auto& [level, acc] : per_level_accuracy) {
    char label[8];
    std::snprintf(label, sizeof(label), "L%02d", level);
    per_level[label] = {{"accuracy", acc},
                        {"scorable", per_level_scorable.at(level)}};
  }
  return {{"model_name", model_name},
          {"total_responses", total_responses},
          {"scorable_responses", scorable_responses},
          {"overall_accuracy", overall_accuracy},
          {"single_doc_accuracy", single_doc_accuracy},
          {"aggregation_accuracy", aggregation_accuracy},
          {"hallucination_detection_rate", hallucination_detection_rate},
          {"hallucination_rate", hallucination_rate},
          {"fabrication_rate", fabrication_rate},
          {"grounding_accuracy", grounding_accuracy},
          {"faithfulness", faithfulness},
          {"coherence_loss_rate", coherence_loss_rate},
          {"per_level", per_level},
          {"category_scorable", category_scorable}};
}

MetricsSummary summarize(const std::string& model_name,
                         const std::vector<ScoredResponse>& responses,
                         const std::vector<QuestionMeta>& questions) {
  std::unordered_map<std::string, const QuestionMeta*> by_id;
  for (const auto& q : questions) by_id[q.question_id] = &q;

  MetricsSummary m;
  m.model_name = model_name;

  long long correct_total = 0;
  std::map<QuestionCategory, long long> cat_correct, cat_scorable;
  std::map<int, long long> lvl_correct, lvl_scorable;
  long long faith_correct = 0, faith_scorable = 0;
  long long probe_detected = 0, probe_scorable = 0;
  long long coherence_losses = 0;

  for (const auto& r : responses) {
    auto it = by_id.find(r.question_id);
    if (it == by_id.end())
      throw UsageError("scored response references unknown question id: " +
                       r.question_id);
    const QuestionMeta& q = *it->second;
    ++m.total_responses;
    if (r.flags.count(ResponseFlag::coherence_loss)) ++coherence_losses;
    if (r.verdict == Verdict::unscorable) continue;

    ++m.scorable_responses;
    bool correct = r.verdict == Verdict::correct;
    if (correct) ++correct_total;
    ++cat_scorable[q.category];
    if (correct) ++cat_correct[q.category];
    ++lvl_scorable[q.level];
    if (correct) ++lvl_correct[q.level];

    bool faith_level = q.level <= 4 || q.level >= 11;
    if (faith_level) {
      ++faith_scorable;
      if (correct) ++faith_correct;
    }
    if (q.category == QuestionCategory::probe) {
      ++probe_scorable;
      if (!r.flags.count(ResponseFlag::fabricated)) ++probe_detected;
    }
  }

  m.overall_accuracy = ratio(correct_total, m.scorable_responses);
  m.single_doc_accuracy = ratio(cat_correct[QuestionCategory::single_doc],
                                cat_scorable[QuestionCategory::single_doc]);
  m.aggregation_accuracy = ratio(cat_correct[QuestionCategory::aggregation],
                                 cat_scorable[QuestionCategory::aggregation]);
  // With no scorable probes, detection is vacuously perfect so the
  // detection-rate/hallucination-rate complement identity still holds.
  m.hallucination_detection_rate =
      probe_scorable == 0 ? 1.0 : ratio(probe_detected, probe_scorable);
  m.hallucination_rate = 1.0 - m.hallucination_detection_rate;
  m.fabrication_rate = m.hallucination_rate;
  m.grounding_accuracy = m.single_doc_accuracy;
  m.faithfulness = ratio(faith_correct, faith_scorable);
  m.coherence_loss_rate = ratio(coherence_losses, m.total_responses);

  for (const auto& [level, n] : lvl_scorable) {
    m.per_level_scorable[level] = static_cast<int>(n);
    m.per_level_accuracy[level] = ratio(lvl_correct[level], n);
  }
  for (const auto& [cat, n] : cat_scorable)
    m.category_scorable[category_name(cat)] = static_cast<int>(n);

  return m;
}

double scaling_delta(double smaller_tier_accuracy,
                     double larger_tier_accuracy) {
  return (larger_tier_accuracy - smaller_tier_accuracy) * 100.0;
}

StabilityStats stability_stats(const std::vector<double>& values) {
  if (values.empty()) throw UsageError("stability_stats: no values");
  StabilityStats s;
  double sum = 0;
  double lo = values.front(), hi = values.front();
  for (double v : values) {
    sum += v;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  s.mean = sum / static_cast<double>(values.size());
  s.spread = hi - lo;
  double var = 0;
  for (double v : values) var += (v - s.mean) * (v - s.mean);
  var /= static_cast<double>(values.size());
  s.cv = s.mean == 0 ? 0 : std::sqrt(var) / s.mean;
  return s;
}

void render_report(const std::vector<MetricsSummary>& summaries,
                   const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<MetricsSummary> sorted = summaries;
  std::sort(sorted.begin(), sorted.end(),
            [](const MetricsSummary& a, const MetricsSummary& b) {
              if (a.overall_accuracy != b.overall_accuracy)
                return a.overall_accuracy > b.overall_accuracy;
              return a.model_name < b.model_name;
            });

  {
    std::ofstream csv(out_dir + "/report.csv", std::ios::trunc);
    if (!csv) throw UsageError("cannot write report csv in " + out_dir);
    csv << "model,overall,single_doc,aggregation,hallucination_detection,"
           "hallucination_rate,faithfulness,grounding,coherence_loss,"
           "scorable,total\n";
    for (const auto& m : sorted) {
      csv << m.model_name << ',' << pct(m.overall_accuracy) << ','
          << pct(m.single_doc_accuracy) << ',' << pct(m.aggregation_accuracy)
          << ',' << pct(m.hallucination_detection_rate) << ','
          << pct(m.hallucination_rate) << ',' << pct(m.faithfulness) << ','
          << pct(m.grounding_accuracy) << ',' << pct(m.coherence_loss_rate)
          << ',' << m.scorable_responses << ',' << m.total_responses << '\n';
    }
  }
  {
    std::ofstream md(out_dir + "/report.md", std::ios::trunc);
    if (!md) throw UsageError("cannot write report markdown in " + out_dir);
    md << "| Model | Overall | Single-doc | Aggregation | Probe detection | "
          "Faithfulness | Coherence loss |\n";
    md << "|---|---|---|---|---|---|---|\n";
    for (const auto& m : sorted) {
      md << "| " << m.model_name << " | " << pct(m.overall_accuracy) << " | "
         << pct(m.single_doc_accuracy) << " | " << pct(m.aggregation_accuracy)
         << " | " << pct(m.hallucination_detection_rate) << " | "
         << pct(m.faithfulness) << " | " << pct(m.coherence_loss_rate)
         << " |\n";
    }
    md << "\nRates are percentages over scorable responses; coherence loss is "
          "over all responses.\n";

    std::ofstream levels(out_dir + "/per_level.csv", std::ios::trunc);
    levels << "model,level,accuracy,scorable\n";
    for (const auto& m : sorted) {
      for (const auto& [level, acc] : m.per_level_accuracy) {
        char label[8];
        std::snprintf(label, sizeof(label), "L%02d", level);
        levels << m.model_name << ',' << label << ',' << pct(acc) << ','
               << m.per_level_scorable.at(level) << '\n';
      }
    }
  }
}

void render_stability_csv(const std::vector<StabilityRow>& rows,
                          const StabilityStats& stats,
                          const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw UsageError("cannot write stability csv: " + path);
  out << "set_id,metric,value,mean,spread,cv\n";
  char mean[32], spread[32], cv[32];
  std::snprintf(mean, sizeof(mean), "%.4f", stats.mean);
  std::snprintf(spread, sizeof(spread), "%.4f", stats.spread);
  std::snprintf(cv, sizeof(cv), "%.6f", stats.cv);
  for (const auto& r : rows) {
    char value[32];
    std::snprintf(value, sizeof(value), "%.4f", r.value);
    out << r.set_id << ',' << r.metric << ',' << value << ',' << mean << ','
        << spread << ',' << cv << '\n';
  }
}

}  // namespace riker
