#include "bench/types.hpp"

#include <sstream>

#include "bench/error.hpp"
#include "bench/util.hpp"

namespace bench {

std::optional<DesignType> parse_design_type(const std::string& s) {
  if (s == "standard") return DesignType::standard;
  if (s == "adversarial") return DesignType::adversarial;
  return std::nullopt;
}

std::optional<QuestionType> parse_question_type(const std::string& s) {
  if (s == "mcq_single") return QuestionType::mcq_single;
  if (s == "mcq_multi") return QuestionType::mcq_multi;
  if (s == "open_ended") return QuestionType::open_ended;
  if (s == "structured") return QuestionType::structured;
  if (s == "judgment") return QuestionType::judgment;
  return std::nullopt;
}

std::optional<Difficulty> parse_difficulty(const std::string& s) {
  if (s.size() == 2 && s[0] == 'L' && s[1] >= '1' && s[1] <= '5')
    return static_cast<Difficulty>(s[1] - '1');
  return std::nullopt;
}

const char* to_string(DesignType t) {
  return t == DesignType::standard ? "standard" : "adversarial";
}

const char* to_string(QuestionType t) {
  switch (t) {
    case QuestionType::mcq_single: return "mcq_single";
    case QuestionType::mcq_multi: return "mcq_multi";
    case QuestionType::open_ended: return "open_ended";
    case QuestionType::structured: return "structured";
    case QuestionType::judgment: return "judgment";
  }
  return "?";
}

const char* to_string(Difficulty t) {
  switch (t) {
    case Difficulty::L1: return "L1";
    case Difficulty::L2: return "L2";
    case Difficulty::L3: return "L3";
    case Difficulty::L4: return "L4";
    case Difficulty::L5: return "L5";
  }
  return "?";
}

const char* to_string(StaticStatus s) {
  switch (s) {
    case StaticStatus::clean: return "clean";
    case StaticStatus::suspect_static: return "suspect_static";
    case StaticStatus::broken_static: return "broken_static";
    case StaticStatus::flagged_dynamic: return "flagged_dynamic";
  }
  return "?";
}

const char* to_string(QualityFlag f) {
  switch (f) {
    case QualityFlag::schema_violation: return "schema_violation";
    case QualityFlag::ambiguous: return "ambiguous";
    case QualityFlag::gold_incorrect: return "gold_incorrect";
    case QualityFlag::not_well_posed: return "not_well_posed";
    case QualityFlag::constraint_violation: return "constraint_violation";
  }
  return "?";
}

const char* to_string(ScoringRoute r) {
  switch (r) {
    case ScoringRoute::hard: return "hard";
    case ScoringRoute::soft: return "soft";
    case ScoringRoute::skip_core: return "skip_core";
  }
  return "?";
}

const std::map<std::string, std::string>& builtin_family_table() {
  static const std::map<std::string, std::string> table = {
      {"gpt-5-mini", "gpt"},
      {"gpt-4.1-mini", "gpt"},
      {"gemini-2.5-flash", "gemini"},
      {"gemini-2.0-flash", "gemini"},
      {"gemini-2.5-pro", "gemini"},
      {"deepseek-chat", "deepseek"},
      {"deepseek-v3.2-chat", "deepseek"},
      {"qwen3-next-80b-a3b-instruct", "qwen3"},
      {"qwen3-vl-flash", "qwen3"},
      {"doubao-seed-1-6-flash-250828", "doubao"},
      {"doubao-seed-1.6-flash", "doubao"},
      {"llama-4-maverick", "llama"},
      {"llama-3.3-70b-instruct", "llama"},
      {"claude-sonnet-4-5-20250929", "claude"},
      {"claude-sonnet-4.5", "claude"},
      {"grok-4.1-fast", "grok"},
      {"grok-4-1-fast", "grok"},
  };
  return table;
}

ModelId resolve_model(const std::string& name,
                      const std::map<std::string, std::string>& extra) {
  if (auto it = extra.find(name); it != extra.end()) return ModelId{name, it->second};
  const auto& table = builtin_family_table();
  if (auto it = table.find(name); it != table.end()) return ModelId{name, it->second};
  throw Error(Errc::config_error, "model '" + name + "' has no family table entry");
}

std::string VariantId::key() const {
  std::string k = dataset + "__" + language + "__" + modality;
  if (condition) k += "__" + *condition;
  return k;
}

bool VariantId::valid() const {
  if (dataset.empty() || language.empty() || modality.empty()) return false;
  if (condition && modality != "multimodal") return false;
  if (condition && condition->empty()) return false;
  return true;
}

VariantId variant_from_json(const json& j) {
  VariantId v;
  v.dataset = j.at("dataset").get<std::string>();
  v.language = j.at("language").get<std::string>();
  v.modality = j.at("modality").get<std::string>();
  if (j.contains("condition") && !j["condition"].is_null())
    v.condition = j["condition"].get<std::string>();
  if (!v.valid()) throw Error(Errc::config_error, "invalid variant " + v.key());
  return v;
}

ojson variant_to_json(const VariantId& v) {
  ojson j;
  j["dataset"] = v.dataset;
  j["language"] = v.language;
  j["modality"] = v.modality;
  j["condition"] = v.condition ? ojson(*v.condition) : ojson(nullptr);
  return j;
}

// --- item serialization -----------------------------------------------------

ojson item_to_json(const Item& it) {
  ojson j;
  j["id"] = it.id;
  j["designer_model"] = it.designer_model;
  j["source_dataset"] = it.source_dataset;
  j["super_parent"] = it.super_parent;
  j["subdomain"] = it.subdomain;
  j["design_type"] = it.design_type;
  j["modality"] = it.modality;
  j["language"] = it.language;
  j["question_type"] = it.question_type;
  j["question_stem"] = it.question_stem;
  j["options"] = it.options;
  j["answer"] = it.answer;
  j["answer_explanation"] = it.answer_explanation;
  j["declared_difficulty"] = it.declared_difficulty;
  j["estimated_time_sec"] = it.estimated_time_sec;
  j["uses_visual"] = it.uses_visual;
  j["visual_instruction"] = it.visual_instruction ? ojson(*it.visual_instruction) : ojson(nullptr);
  return j;
}

std::string item_to_line(const Item& it) { return item_to_json(it).dump(); }

namespace {

std::string require_string(const json& j, const char* field) {
  if (!j.contains(field) || !j[field].is_string())
    throw Error(Errc::item_parse, std::string("field '") + field + "' missing or not a string");
  return j[field].get<std::string>();
}

}  // namespace

Item item_from_json(const json& j) {
  if (!j.is_object()) throw Error(Errc::item_parse, "item is not a JSON object");
  Item it;
  it.id = require_string(j, "id");
  it.designer_model = require_string(j, "designer_model");
  it.source_dataset = require_string(j, "source_dataset");
  it.super_parent = require_string(j, "super_parent");
  it.subdomain = require_string(j, "subdomain");
  it.design_type = require_string(j, "design_type");
  it.modality = require_string(j, "modality");
  it.language = require_string(j, "language");
  it.question_type = require_string(j, "question_type");
  it.question_stem = require_string(j, "question_stem");
  if (!j.contains("options") || !j["options"].is_array())
    throw Error(Errc::item_parse, "field 'options' missing or not an array");
  for (const auto& o : j["options"]) {
    if (!o.is_string()) throw Error(Errc::item_parse, "option is not a string");
    it.options.push_back(o.get<std::string>());
  }
  if (!j.contains("answer") || !(j["answer"].is_string() || j["answer"].is_array() ||
                                 j["answer"].is_number() || j["answer"].is_boolean()))
    throw Error(Errc::item_parse, "field 'answer' missing or unusable type");
  it.answer = ojson(j["answer"]);
  it.answer_explanation = require_string(j, "answer_explanation");
  it.declared_difficulty = require_string(j, "declared_difficulty");
  if (!j.contains("estimated_time_sec") || !j["estimated_time_sec"].is_number_integer())
    throw Error(Errc::item_parse, "field 'estimated_time_sec' missing or not an integer");
  it.estimated_time_sec = j["estimated_time_sec"].get<std::int64_t>();
  if (!j.contains("uses_visual") || !j["uses_visual"].is_boolean())
    throw Error(Errc::item_parse, "field 'uses_visual' missing or not a boolean");
  it.uses_visual = j["uses_visual"].get<bool>();
  if (j.contains("visual_instruction") && j["visual_instruction"].is_string())
    it.visual_instruction = j["visual_instruction"].get<std::string>();
  else if (j.contains("visual_instruction") && !j["visual_instruction"].is_null())
    throw Error(Errc::item_parse, "field 'visual_instruction' must be string or null");
  return it;
}

Item item_from_line(const std::string& line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded()) throw Error(Errc::item_parse, "invalid JSON line");
  return item_from_json(j);
}

std::vector<Item> read_items_jsonl(const std::string& text) {
  std::vector<Item> items;
  std::istringstream in(text);
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    try {
      items.push_back(item_from_line(line));
    } catch (const Error& e) {
      throw Error(Errc::item_parse, "line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return items;
}

std::string write_items_jsonl(const std::vector<Item>& items) {
  std::string out;
  for (const auto& it : items) {
    out += item_to_line(it);
    out += '\n';
  }
  return out;
}

ojson status_to_json(const ItemStatus& s) {
  ojson j;
  j["status"] = to_string(s.status);
  ojson flags = ojson::array();
  for (auto f : s.flags) flags.push_back(to_string(f));
  j["flags"] = flags;
  j["scoring_route"] = to_string(s.scoring_route);
  j["notes"] = s.notes;
  return j;
}

}  // namespace bench
