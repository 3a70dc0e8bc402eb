#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "riker/scoring.hpp"

namespace riker {

struct MetricsSummary {
  std::string model_name;
  int total_responses = 0;
  int scorable_responses = 0;

  double overall_accuracy = 0;
  double single_doc_accuracy = 0;
  double aggregation_accuracy = 0;
  // Probe handling: detection rate is the share of probe responses answered
  // with the proper sentinel; hallucination rate is its complement.
  double hallucination_detection_rate = 0;
  double hallucination_rate = 0;
  double fabrication_rate = 0;  // identical to hallucination_rate by design
  double grounding_accuracy = 0;    // identical to single_doc_accuracy
  double faithfulness = 0;          // correct share over L01-L04 and L11-L12
  double coherence_loss_rate = 0;   // over all responses, scorable or not

  std::map<int, double> per_level_accuracy;
  std::map<int, int> per_level_scorable;
  std::map<std::string, int> category_scorable;

  nlohmann::json to_json() const;
};

// Joins scored responses to question metadata. Every response must match a
// known question id (orphans are a hard error). transport_error responses
// count toward total_responses but are excluded from every accuracy
// denominator.
MetricsSummary summarize(const std::string& model_name,
                         const std::vector<ScoredResponse>& responses,
                         const std::vector<QuestionMeta>& questions);

// Accuracy difference between two corpus sizes (percentage points,
// larger minus smaller).
double scaling_delta(double smaller_tier_accuracy, double larger_tier_accuracy);

struct StabilityStats {
  double mean = 0;
  double spread = 0;  // max - min
  double cv = 0;      // population stddev over mean
};
StabilityStats stability_stats(const std::vector<double>& values);

// reports/<...>: summary.csv plus a Markdown table, models sorted by
// overall accuracy descending.
void render_report(const std::vector<MetricsSummary>& summaries,
                   const std::string& out_dir);

struct StabilityRow {
  std::string set_id;
  std::string metric;
  double value = 0;
};
void render_stability_csv(const std::vector<StabilityRow>& rows,
                          const StabilityStats& stats,
                          const std::string& path);

}  // namespace riker
