#include "bench/validate.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "bench/util.hpp"

namespace bench {

namespace {

struct Verdict {
  ItemStatus st;

  void suspect(const std::string& note) {
    if (st.status == StaticStatus::clean) st.status = StaticStatus::suspect_static;
    st.notes.push_back(note);
  }
  void broken(const std::string& note) {
    st.status = StaticStatus::broken_static;
    st.flags.insert(QualityFlag::schema_violation);
    st.notes.push_back(note);
  }
};

// A single letter A..E (possibly lowercase / padded). Returns the canonical
// uppercase letter, flagging whether repair was needed.
std::optional<char> normalize_letter(const std::string& raw, bool* repaired) {
  std::string t = trim(raw);
  if (t.size() != 1) return std::nullopt;
  char c = t[0];
  if (c >= 'a' && c <= 'e') {
    *repaired = true;
    c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  if (t.size() != raw.size()) *repaired = true;
  if (c < 'A' || c > 'E') return std::nullopt;
  return c;
}

bool is_bool_answer(const std::string& raw, bool* repaired) {
  std::string t = to_lower(trim(raw));
  if (t != raw) *repaired = true;
  return t == "true" || t == "false" || t == "yes" || t == "no";
}

void check_id_shape(const Item& item, Verdict& v) {
  // <prefix>_q + zero-padded index
  auto pos = item.id.rfind("_q");
  if (pos == std::string::npos || pos == 0) {
    v.broken("id '" + item.id + "' does not match <prefix>_qNNN");
    return;
  }
  std::string digits = item.id.substr(pos + 2);
  if (digits.size() < 3 || !std::all_of(digits.begin(), digits.end(), [](char c) {
        return std::isdigit(static_cast<unsigned char>(c));
      }))
    v.broken("id '" + item.id + "' lacks a zero-padded numeric index");
}

void check_mcq_single(const Item& item, Verdict& v) {
  if (item.options.size() < 4 || item.options.size() > 5)
    v.broken("mcq_single needs 4-5 options, got " + std::to_string(item.options.size()));
  if (!item.answer.is_string()) {
    v.broken("mcq_single answer must be a single letter string");
    return;
  }
  bool repaired = false;
  auto letter = normalize_letter(item.answer.get<std::string>(), &repaired);
  if (!letter) {
    v.broken("mcq_single answer is not a letter A-E");
    return;
  }
  if (repaired) v.suspect("answer letter canonicalized");
  if (!item.options.empty() && *letter - 'A' >= static_cast<int>(item.options.size()))
    v.broken(std::string("answer letter ") + *letter + " outside option range");
}

void check_mcq_multi(const Item& item, Verdict& v) {
  if (item.options.size() < 4 || item.options.size() > 5)
    v.broken("mcq_multi needs 4-5 options, got " + std::to_string(item.options.size()));
  if (!item.answer.is_array()) {
    v.broken("mcq_multi answer must be a JSON list of letters");
    return;
  }
  if (item.answer.empty()) {
    v.broken("mcq_multi answer set is empty");
    return;
  }
  std::set<char> seen;
  bool repaired = false;
  std::vector<char> order;
  for (const auto& el : item.answer) {
    if (!el.is_string()) {
      v.broken("mcq_multi answer entries must be strings");
      return;
    }
    auto letter = normalize_letter(el.get<std::string>(), &repaired);
    if (!letter) {
      v.broken("mcq_multi answer entry is not a letter A-E");
      return;
    }
    if (!seen.insert(*letter).second) {
      v.broken("duplicate letter in mcq_multi answer");
      return;
    }
    order.push_back(*letter);
    if (!item.options.empty() && *letter - 'A' >= static_cast<int>(item.options.size()))
      v.broken(std::string("answer letter ") + *letter + " outside option range");
  }
  if (repaired) v.suspect("answer letters canonicalized");
  if (!std::is_sorted(order.begin(), order.end())) v.suspect("answer letter set reordered");
}

void check_text_answer(const Item& item, Verdict& v) {
  if (!item.options.empty())
    v.broken(item.question_type + " must have empty options");
  if (!item.answer.is_string()) {
    v.broken(item.question_type + " answer must be a text string");
    return;
  }
  std::string text = item.answer.get<std::string>();
  if (trim(text).empty()) {
    v.broken(item.question_type + " answer text is empty");
    return;
  }
  if (trim(text) != text) v.suspect("answer text trimmed");
}

void check_judgment(const Item& item, Verdict& v) {
  if (!item.options.empty()) v.broken("judgment must have empty options");
  if (!item.answer.is_string()) {
    v.broken("judgment answer must be a boolean-like string");
    return;
  }
  bool repaired = false;
  if (!is_bool_answer(item.answer.get<std::string>(), &repaired)) {
    v.broken("judgment answer must be one of true/false/yes/no");
    return;
  }
  if (repaired) v.suspect("judgment answer canonicalized");
}

}  // namespace

ItemStatus validate_item_static(const Item& item) {
  Verdict v;

  check_id_shape(item, v);

  auto qt = item.qtype();
  if (!qt) {
    // Unknown types are hard failures; see the pooled-composition note in
    // the gate module for how such rows are reported.
    v.broken("unknown question_type '" + item.question_type + "'");
  } else {
    switch (*qt) {
      case QuestionType::mcq_single: check_mcq_single(item, v); break;
      case QuestionType::mcq_multi: check_mcq_multi(item, v); break;
      case QuestionType::open_ended:
      case QuestionType::structured: check_text_answer(item, v); break;
      case QuestionType::judgment: check_judgment(item, v); break;
    }
  }

  if (!item.dtype()) v.broken("unknown design_type '" + item.design_type + "'");
  if (!item.difficulty())
    v.broken("unknown declared_difficulty '" + item.declared_difficulty + "'");

  size_t explen = item.answer_explanation.size();
  if (explen < 5)
    v.broken("answer_explanation shorter than 5 chars");
  else if (explen < 10)
    v.suspect("answer_explanation length " + std::to_string(explen) + " (<10)");

  if (item.question_stem.empty()) v.broken("question_stem is empty");
  if (item.estimated_time_sec <= 0) v.broken("estimated_time_sec must be positive");

  if (!item.uses_visual && item.visual_instruction)
    v.suspect("visual_instruction present while uses_visual=false");
  if (item.modality.empty()) v.broken("modality is empty");
  if (item.language.empty()) v.broken("language is empty");

  if (v.st.status != StaticStatus::broken_static && qt) {
    v.st.scoring_route = (*qt == QuestionType::open_ended || *qt == QuestionType::structured)
                             ? ScoringRoute::soft
                             : ScoringRoute::hard;
  }
  return v.st;
}

Item canonicalize_item(const Item& item) {
  ItemStatus st = validate_item_static(item);
  if (st.status == StaticStatus::broken_static) return item;

  Item out = item;
  auto qt = item.qtype();
  if (!qt) return out;

  switch (*qt) {
    case QuestionType::mcq_single: {
      bool rep = false;
      if (auto l = normalize_letter(out.answer.get<std::string>(), &rep))
        out.answer = std::string(1, *l);
      break;
    }
    case QuestionType::mcq_multi: {
      std::vector<std::string> letters;
      bool rep = false;
      for (const auto& el : out.answer)
        if (auto l = normalize_letter(el.get<std::string>(), &rep))
          letters.push_back(std::string(1, *l));
      std::sort(letters.begin(), letters.end());
      out.answer = letters;
      break;
    }
    case QuestionType::open_ended:
    case QuestionType::structured:
      out.answer = trim(out.answer.get<std::string>());
      break;
    case QuestionType::judgment: {
      std::string t = to_lower(trim(out.answer.get<std::string>()));
      out.answer = (t == "yes" || t == "true") ? "true" : "false";
      break;
    }
  }
  if (!out.uses_visual) out.visual_instruction.reset();
  return out;
}

std::string make_item_id(const std::string& prefix, int index, int total) {
  int width = total > 999 ? 4 : 3;
  std::string digits = std::to_string(index);
  while (static_cast<int>(digits.size()) < width) digits.insert(digits.begin(), '0');
  return prefix + "_q" + digits;
}

std::vector<IdViolation> verify_id_sequence(const std::vector<Item>& items,
                                            const std::string& prefix) {
  std::vector<IdViolation> out;
  int total = static_cast<int>(items.size());
  std::map<std::string, int> counts;
  for (const auto& it : items) counts[it.id]++;

  std::set<std::string> expected;
  for (int i = 1; i <= total; ++i) expected.insert(make_item_id(prefix, i, total));

  for (const auto& id : expected) {
    auto it = counts.find(id);
    if (it == counts.end())
      out.push_back({IdViolation::Kind::gap, "gap at " + id});
  }
  for (const auto& [id, n] : counts) {
    if (!expected.count(id))
      out.push_back({IdViolation::Kind::foreign, "foreign id " + id});
    else if (n > 1)
      out.push_back({IdViolation::Kind::duplicate, "duplicate " + id});
  }
  return out;
}

}  // namespace bench
