#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "riker/ground_truth.hpp"
#include "riker/rng.hpp"

namespace riker {

enum class DocType { lease, field_report, hr_evaluation };
std::string doc_type_name(DocType t);
DocType doc_type_from_name(const std::string& s);

// One register + section order + per-slot boilerplate choice, drawn
// independently per document.
struct StyleVariant {
  std::string register_name;           // formal | semi_formal | casual
  int section_order_idx = 0;           // index into the order whitelist
  std::map<std::string, int> boilerplate;  // section slot -> variant index
};

struct RenderedDocument {
  std::string doc_id;
  DocType doc_type = DocType::lease;
  std::string title;
  std::string body;
  std::string source_record_id;
  int token_estimate = 0;

  std::string relative_path() const;  // "<doc_type>/<doc_id>.txt"
};

// Templates are JSON data files under data/templates/. Each section slot has
// at least two boilerplate variants per register; section orderings come from
// a whitelist so documents stay grammatical.
class TemplateRegistry {
 public:
  static TemplateRegistry load(const std::string& data_dir);

  StyleVariant select_variant(DocType doc_type, RandomStream& stream) const;

  RenderedDocument render(const GroundTruthStore& store,
                          const LeaseRecord& record,
                          const StyleVariant& variant) const;
  RenderedDocument render(const GroundTruthStore& store,
                          const FieldReportRecord& record,
                          const StyleVariant& variant) const;
  RenderedDocument render(const GroundTruthStore& store,
                          const HrEvaluationRecord& record,
                          const StyleVariant& variant) const;

  // One document per store record, ordered (doc_type, record id); variants
  // are drawn sequentially from the stream in that same order.
  std::vector<RenderedDocument> render_corpus(const GroundTruthStore& store,
                                              RandomStream& stream) const;

  // Phrases that may only appear when the clause is present (absent-clause
  // invariant); maintained alongside the lease template.
  const std::vector<std::string>& trigger_phrases(ClauseFlag clause) const;

 private:
  struct DocTemplate {
    std::vector<std::string> registers;
    // section -> register -> variant texts
    std::map<std::string, std::map<std::string, std::vector<std::string>>>
        sections;
    std::vector<std::vector<std::string>> section_orders;
    std::map<std::string, std::vector<std::string>> titles;  // per register
    // optional sections rendered after the ordered ones, fixed order
    std::vector<std::string> optional_order;
  };

  const DocTemplate& tpl(DocType t) const;
  RenderedDocument render_with(DocType doc_type, const std::string& doc_id,
                               const StyleVariant& variant,
                               const std::map<std::string, std::string>& slots,
                               const std::vector<std::string>& present_optional)
      const;

  std::map<std::string, DocTemplate> templates_;
  std::map<std::string, std::vector<std::string>> trigger_phrases_;
};

}  // namespace riker
