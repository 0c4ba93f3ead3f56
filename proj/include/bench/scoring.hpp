#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bench/templates.hpp"
#include "bench/types.hpp"

namespace bench {

enum class AnswerKind { letter, letter_set, numeric, expression, text, unparseable };
const char* to_string(AnswerKind k);

struct ParsedAnswer {
  AnswerKind kind = AnswerKind::unparseable;
  std::string value;                  // normalized payload ("B", "A,C", the text, ...)
  std::vector<std::string> letters;   // letter_set: sorted, deduplicated
  std::vector<std::string> notes;     // parse diagnostics
};

enum class ScoreMethod { exact, set, numeric, symbolic, judge, skip_core };
const char* to_string(ScoreMethod m);

enum class JudgeLabel { correct, partially_correct, incorrect, broken_item };
const char* to_string(JudgeLabel l);
std::optional<JudgeLabel> parse_judge_label(const std::string& s);

struct ScoreRecord {
  std::string answerer;
  std::string item_id;
  ScoreMethod method = ScoreMethod::skip_core;
  std::optional<int> hard;       // c: {0,1} or absent
  std::optional<double> soft;    // s: [0,1] or absent
  std::optional<double> final;   // z: hard if present, else soft, else absent
  std::optional<JudgeLabel> judge_label;
  std::set<std::string> flags;
  ParsedAnswer parsed;

  ojson to_json() const;
};

// Format-aware answer parsing; never throws — failures land in kind
// unparseable with diagnostics.
ParsedAnswer parse_answer(const std::string& raw, QuestionType question_type);

// Objective matchers. nullopt = not decidable (unparseable side).
std::optional<int> match_exact(const ParsedAnswer& parsed, const Item& item);
std::optional<int> match_set(const ParsedAnswer& parsed, const Item& item);
std::optional<int> match_numeric_symbolic(const std::string& answer_text,
                                          const std::string& gold_text);

// One judge invocation: prompt in, raw reply out. The sim context rides along
// for offline backends.
using JudgeFn = std::function<std::string(const RequestPair&, const ojson& sim_context)>;

struct JudgeOutcome {
  std::optional<JudgeLabel> label;
  std::optional<double> soft;
  std::set<std::string> flags;
};

// Parses the grading reply, clamps the score into the label's rubric band,
// and re-asks once on contract violations before raising JudgeProtocolError.
JudgeOutcome judge_answer(const Item& item, const std::string& raw_answer,
                          const JudgeFn& judge);

// The objective-first hierarchy: exact -> set -> numeric/symbolic -> judge ->
// skip_core. The first applicable method wins; a judge is consulted only when
// no objective verifier applies.
ScoreRecord route_and_score(const Item& item, const ModelId& answerer,
                            const std::string& raw_answer, const JudgeFn& judge);

ojson methods_histogram(const std::vector<ScoreRecord>& records);

}  // namespace bench
