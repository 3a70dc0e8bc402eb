#pragma once

#include <string>

#include <json.hpp>

#include "riker/ground_truth.hpp"
#include "riker/questions.hpp"

namespace riker {

struct PipelineConfig {
  std::string corpus_id;
  int tier_tokens = 32768;
  double headroom = 0.85;
  UniverseConfig universe;
  QuestionMix questions;

  void validate() const;
  nlohmann::json to_json() const;
  static PipelineConfig from_json(const nlohmann::json& j);
  static PipelineConfig load(const std::string& path);

  // Stable content digest over the canonical key-sorted dump; part of the
  // manifest so regeneration mismatches are detectable.
  std::string digest() const;
};

}  // namespace riker
