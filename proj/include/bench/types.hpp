#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace bench {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

// --- enums -------------------------------------------------------------------

enum class DesignType { standard, adversarial };
enum class QuestionType { mcq_single, mcq_multi, open_ended, structured, judgment };
enum class Difficulty { L1, L2, L3, L4, L5 };

std::optional<DesignType> parse_design_type(const std::string& s);
std::optional<QuestionType> parse_question_type(const std::string& s);
std::optional<Difficulty> parse_difficulty(const std::string& s);

const char* to_string(DesignType t);
const char* to_string(QuestionType t);
const char* to_string(Difficulty t);

inline constexpr int kDifficultyTiers = 5;
inline constexpr int kQuestionTypes = 5;

// --- model identity ----------------------------------------------------------

// Family assignment is an explicit lookup table; there is no name-pattern
// inference. Unknown names must be registered via extra entries.
struct ModelId {
  std::string name;
  std::string family;

  bool operator==(const ModelId&) const = default;
  auto operator<=>(const ModelId&) const = default;
};

// Built-in table covering the designer/answerer/judge panels used in runs.
const std::map<std::string, std::string>& builtin_family_table();

// Throws ConfigError when the name is in neither the built-in table nor extra.
ModelId resolve_model(const std::string& name,
                      const std::map<std::string, std::string>& extra = {});

// --- dataset variant -----------------------------------------------------------

struct VariantId {
  std::string dataset;
  std::string language;   // e.g. "en", "zh"
  std::string modality;   // "text" | "multimodal"
  std::optional<std::string> condition;  // "textonly" | "visualprimed", multimodal only

  // Stable key used in file names and map ordering.
  std::string key() const;
  bool valid() const;

  bool operator==(const VariantId&) const = default;
  auto operator<=>(const VariantId&) const = default;
};

VariantId variant_from_json(const json& j);
ojson variant_to_json(const VariantId& v);

// --- item ----------------------------------------------------------------------

// One generated question. Enum-ish fields stay raw strings so that invalid
// designer output can be represented and validated rather than rejected at
// parse time; typed accessors are below.
struct Item {
  std::string id;
  std::string designer_model;
  std::string source_dataset;
  std::string super_parent;
  std::string subdomain;
  std::string design_type;
  std::string modality;
  std::string language;
  std::string question_type;
  std::string question_stem;
  std::vector<std::string> options;
  ojson answer;  // string, or array of letter strings for mcq_multi
  std::string answer_explanation;
  std::string declared_difficulty;
  std::int64_t estimated_time_sec = 0;
  bool uses_visual = false;
  std::optional<std::string> visual_instruction;

  std::optional<QuestionType> qtype() const { return parse_question_type(question_type); }
  std::optional<DesignType> dtype() const { return parse_design_type(design_type); }
  std::optional<Difficulty> difficulty() const { return parse_difficulty(declared_difficulty); }
};

// Canonical JSONL form: fixed field order, UTF-8, one item per line.
ojson item_to_json(const Item& it);
std::string item_to_line(const Item& it);
// Throws ItemParseError when a required field is missing or has the wrong type.
Item item_from_json(const json& j);
Item item_from_line(const std::string& line);

std::vector<Item> read_items_jsonl(const std::string& text);
std::string write_items_jsonl(const std::vector<Item>& items);

// --- static validation status ---------------------------------------------------

enum class StaticStatus { clean, suspect_static, broken_static, flagged_dynamic };
enum class QualityFlag {
  schema_violation,
  ambiguous,
  gold_incorrect,
  not_well_posed,
  constraint_violation,
};
enum class ScoringRoute { hard, soft, skip_core };

const char* to_string(StaticStatus s);
const char* to_string(QualityFlag f);
const char* to_string(ScoringRoute r);

struct ItemStatus {
  StaticStatus status = StaticStatus::clean;
  std::set<QualityFlag> flags;
  ScoringRoute scoring_route = ScoringRoute::hard;
  std::vector<std::string> notes;  // human-readable reasons for each deviation

  bool core_eligible() const {
    return (status == StaticStatus::clean || status == StaticStatus::suspect_static) &&
           scoring_route != ScoringRoute::skip_core;
  }
};

ojson status_to_json(const ItemStatus& s);

}  // namespace bench
