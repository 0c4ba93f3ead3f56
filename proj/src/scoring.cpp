#include "bench/scoring.hpp"

#include <algorithm>
#include <cctype>

#include "bench/error.hpp"
#include "bench/rational.hpp"
#include "bench/sim_backend.hpp"
#include "bench/util.hpp"

namespace bench {

const char* to_string(AnswerKind k) {
  switch (k) {
    case AnswerKind::letter: return "letter";
    case AnswerKind::letter_set: return "letter_set";
    case AnswerKind::numeric: return "numeric";
    case AnswerKind::expression: return "expression";
    case AnswerKind::text: return "text";
    case AnswerKind::unparseable: return "unparseable";
  }
  return "?";
}

const char* to_string(ScoreMethod m) {
  switch (m) {
    case ScoreMethod::exact: return "exact";
    case ScoreMethod::set: return "set";
    case ScoreMethod::numeric: return "numeric";
    case ScoreMethod::symbolic: return "symbolic";
    case ScoreMethod::judge: return "judge";
    case ScoreMethod::skip_core: return "skip_core";
  }
  return "?";
}

const char* to_string(JudgeLabel l) {
  switch (l) {
    case JudgeLabel::correct: return "correct";
    case JudgeLabel::partially_correct: return "partially_correct";
    case JudgeLabel::incorrect: return "incorrect";
    case JudgeLabel::broken_item: return "broken_item";
  }
  return "?";
}

std::optional<JudgeLabel> parse_judge_label(const std::string& s) {
  if (s == "correct") return JudgeLabel::correct;
  if (s == "partially_correct") return JudgeLabel::partially_correct;
  if (s == "incorrect") return JudgeLabel::incorrect;
  if (s == "broken_item") return JudgeLabel::broken_item;
  return std::nullopt;
}

namespace {

// Lines like "```json" / "```" vanish; the payload between fences survives.
std::string strip_fences(const std::string& raw, std::vector<std::string>* notes) {
  if (raw.find("```") == std::string::npos) return raw;
  std::string out;
  bool stripped = false;
  size_t pos = 0;
  while (pos <= raw.size()) {
    size_t nl = raw.find('\n', pos);
    std::string line = raw.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
    pos = nl == std::string::npos ? raw.size() + 1 : nl + 1;
    if (trim(line).rfind("```", 0) == 0) {
      stripped = true;
      continue;
    }
    out += line;
    out += '\n';
  }
  if (stripped && notes) notes->push_back("markdown fences stripped");
  return out;
}

const char* kBoilerplate[] = {
    "the correct answer is", "the answer is", "final answer:", "final answer is",
    "correct answer:",       "answer:",       "answer is",     "option",
};

std::string strip_boilerplate(std::string text, std::vector<std::string>* notes) {
  std::string t = trim(text);
  bool again = true;
  while (again) {
    again = false;
    for (const char* prefix : kBoilerplate) {
      if (starts_with_icase(t, prefix)) {
        t = trim(t.substr(std::string(prefix).size()));
        if (notes) notes->push_back("boilerplate stripped");
        again = true;
      }
    }
    while (!t.empty() && (t.front() == ':' || t.front() == '*' || t.front() == '"' ||
                          t.front() == '\'' || t.front() == '(')) {
      t.erase(t.begin());
      again = true;
    }
  }
  return trim(t);
}

std::optional<char> single_letter_token(const std::string& text,
                                        std::vector<std::string>* notes) {
  std::string cur;
  auto check = [&](const std::string& tok) -> std::optional<char> {
    if (tok.size() != 1) return std::nullopt;
    char c = tok[0];
    if (c >= 'A' && c <= 'E') return c;
    if (c >= 'a' && c <= 'e') {
      if (notes) notes->push_back("lowercase letter uppercased");
      return static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    return std::nullopt;
  };
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      cur.push_back(c);
    } else if (!cur.empty()) {
      if (auto l = check(cur)) return l;
      cur.clear();
    }
  }
  if (!cur.empty())
    if (auto l = check(cur)) return l;
  return std::nullopt;
}

ParsedAnswer parse_mcq_single(const std::string& raw) {
  ParsedAnswer out;
  std::string text = strip_boilerplate(strip_fences(raw, &out.notes), &out.notes);
  auto letter = single_letter_token(text, &out.notes);
  if (!letter) {
    out.kind = AnswerKind::unparseable;
    out.notes.push_back("no standalone letter A-E found");
    return out;
  }
  out.kind = AnswerKind::letter;
  out.value = std::string(1, *letter);
  return out;
}

ParsedAnswer parse_mcq_multi(const std::string& raw) {
  ParsedAnswer out;
  std::string text = trim(strip_fences(raw, &out.notes));

  std::vector<std::string> letters;
  json arr = json::parse(text, nullptr, false);
  if (arr.is_discarded()) {
    // tolerate an embedded array
    size_t first = text.find('[');
    size_t last = text.rfind(']');
    if (first != std::string::npos && last != std::string::npos && last > first) {
      arr = json::parse(text.substr(first, last - first + 1), nullptr, false);
      if (!arr.is_discarded()) out.notes.push_back("array extracted from surrounding text");
    }
  }
  if (!arr.is_discarded() && arr.is_array()) {
    for (const auto& el : arr) {
      if (!el.is_string()) {
        out.kind = AnswerKind::unparseable;
        out.notes.push_back("array entry is not a string");
        return out;
      }
      letters.push_back(el.get<std::string>());
    }
  } else {
    // bare comma-separated letters, suspect level
    std::string stripped = strip_boilerplate(text, &out.notes);
    for (const auto& part : split(stripped, ',')) {
      std::string t = trim(part);
      if (t.empty()) continue;
      letters.push_back(t);
    }
    if (!letters.empty()) out.notes.push_back("bare comma-separated letters");
  }

  std::set<char> set;
  for (const auto& l : letters) {
    std::string t = trim(l);
    if (t.size() != 1) {
      out.kind = AnswerKind::unparseable;
      out.notes.push_back("entry '" + l + "' is not a single letter");
      return out;
    }
    char c = static_cast<char>(std::toupper(static_cast<unsigned char>(t[0])));
    if (c < 'A' || c > 'E') {
      out.kind = AnswerKind::unparseable;
      out.notes.push_back("entry '" + l + "' outside A-E");
      return out;
    }
    set.insert(c);
  }
  if (set.empty()) {
    out.kind = AnswerKind::unparseable;
    out.notes.push_back("no letters recovered");
    return out;
  }
  out.kind = AnswerKind::letter_set;
  for (char c : set) out.letters.push_back(std::string(1, c));
  for (size_t i = 0; i < out.letters.size(); ++i) {
    if (i) out.value += ",";
    out.value += out.letters[i];
  }
  return out;
}

ParsedAnswer parse_judgment(const std::string& raw) {
  ParsedAnswer out;
  std::string text =
      to_lower(strip_boilerplate(strip_fences(raw, &out.notes), &out.notes));
  while (!text.empty() && (text.back() == '.' || text.back() == '!')) text.pop_back();
  text = trim(text);
  if (text == "true" || text == "yes") {
    out.kind = AnswerKind::text;
    out.value = "true";
  } else if (text == "false" || text == "no") {
    out.kind = AnswerKind::text;
    out.value = "false";
  } else {
    out.kind = AnswerKind::unparseable;
    out.notes.push_back("expected true/false, got '" + text + "'");
  }
  return out;
}

ParsedAnswer parse_free_text(const std::string& raw) {
  ParsedAnswer out;
  std::string text = trim(strip_fences(raw, &out.notes));
  if (text.empty()) {
    out.kind = AnswerKind::unparseable;
    out.notes.push_back("empty answer");
    return out;
  }
  out.value = text;
  if (auto v = rational::evaluate(text)) {
    out.kind = v->kind == rational::LiteralKind::expression ? AnswerKind::expression
                                                            : AnswerKind::numeric;
    out.notes.push_back("whole payload parses in the rational grammar");
  } else {
    out.kind = AnswerKind::text;
  }
  return out;
}

}  // namespace

ParsedAnswer parse_answer(const std::string& raw, QuestionType question_type) {
  switch (question_type) {
    case QuestionType::mcq_single: return parse_mcq_single(raw);
    case QuestionType::mcq_multi: return parse_mcq_multi(raw);
    case QuestionType::judgment: return parse_judgment(raw);
    case QuestionType::open_ended:
    case QuestionType::structured: return parse_free_text(raw);
  }
  ParsedAnswer out;
  out.notes.push_back("unknown question type");
  return out;
}

std::optional<int> match_exact(const ParsedAnswer& parsed, const Item& item) {
  if (parsed.kind == AnswerKind::unparseable) return std::nullopt;
  if (item.qtype() == QuestionType::judgment) {
    std::string gold = to_lower(trim(item.answer.is_string() ? item.answer.get<std::string>()
                                                             : ""));
    std::string canonical = (gold == "yes" || gold == "true") ? "true" : "false";
    return parsed.value == canonical ? 1 : 0;
  }
  if (!item.answer.is_string()) return std::nullopt;
  std::string gold = to_upper(trim(item.answer.get<std::string>()));
  return parsed.value == gold ? 1 : 0;
}

std::optional<int> match_set(const ParsedAnswer& parsed, const Item& item) {
  if (parsed.kind != AnswerKind::letter_set) return std::nullopt;
  if (!item.answer.is_array()) return std::nullopt;
  std::set<std::string> gold;
  for (const auto& el : item.answer)
    if (el.is_string()) gold.insert(to_upper(trim(el.get<std::string>())));
  std::set<std::string> got(parsed.letters.begin(), parsed.letters.end());
  return gold == got ? 1 : 0;  // strict equality, no partial credit
}

std::optional<int> match_numeric_symbolic(const std::string& answer_text,
                                          const std::string& gold_text) {
  auto a = rational::evaluate(answer_text);
  auto g = rational::evaluate(gold_text);
  if (!a || !g) return std::nullopt;
  return rational::equivalent(*a, *g) ? 1 : 0;
}

JudgeOutcome judge_answer(const Item& item, const std::string& raw_answer,
                          const JudgeFn& judge) {
  RequestPair prompt = answer_judge_prompt(item, raw_answer);
  ojson context = sim_judge_context(item, raw_answer);

  auto try_parse = [](const std::string& reply) -> std::optional<std::pair<JudgeLabel, double>> {
    json j = json::parse(reply, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return std::nullopt;
    if (!j.contains("label") || !j["label"].is_string()) return std::nullopt;
    auto label = parse_judge_label(j["label"].get<std::string>());
    if (!label) return std::nullopt;
    double score = 0.0;
    if (j.contains("score") && j["score"].is_number())
      score = j["score"].get<double>();
    else if (*label != JudgeLabel::broken_item)
      return std::nullopt;
    return std::make_pair(*label, score);
  };

  std::string reply = judge(prompt, context);
  auto parsed = try_parse(reply);
  if (!parsed) {
    RequestPair retry = prompt;
    retry.user += "\n\nREMINDER: reply with the JSON object only, exactly as specified.";
    reply = judge(retry, context);
    parsed = try_parse(reply);
    if (!parsed)
      throw Error(Errc::judge_protocol, "judge reply violates the JSON contract twice");
  }

  JudgeOutcome out;
  out.label = parsed->first;
  if (parsed->first == JudgeLabel::broken_item) {
    out.soft = std::nullopt;
    out.flags.insert("judge_broken_item");
    return out;
  }
  double lo = 0.0, hi = 1.0;
  switch (parsed->first) {
    case JudgeLabel::correct: lo = 0.9; hi = 1.0; break;
    case JudgeLabel::partially_correct: lo = 0.4; hi = 0.8; break;
    case JudgeLabel::incorrect: lo = 0.0; hi = 0.3; break;
    case JudgeLabel::broken_item: break;
  }
  double score = parsed->second;
  if (score < lo || score > hi) {
    out.flags.insert("protocol_warning");
    score = std::min(hi, std::max(lo, score));
  }
  out.soft = score;
  return out;
}

ScoreRecord route_and_score(const Item& item, const ModelId& answerer,
                            const std::string& raw_answer, const JudgeFn& judge) {
  ScoreRecord rec;
  rec.answerer = answerer.name;
  rec.item_id = item.id;

  auto qt = item.qtype();
  if (!qt) {
    rec.method = ScoreMethod::skip_core;
    rec.flags.insert("unknown_question_type");
    return rec;
  }
  rec.parsed = parse_answer(raw_answer, *qt);

  switch (*qt) {
    case QuestionType::mcq_single:
    case QuestionType::judgment:
      rec.method = ScoreMethod::exact;
      rec.hard = match_exact(rec.parsed, item);
      break;
    case QuestionType::mcq_multi:
      rec.method = ScoreMethod::set;
      rec.hard = match_set(rec.parsed, item);
      break;
    case QuestionType::open_ended:
    case QuestionType::structured: {
      std::string gold =
          item.answer.is_string() ? item.answer.get<std::string>() : item.answer.dump();
      bool answer_numeric = rec.parsed.kind == AnswerKind::numeric ||
                            rec.parsed.kind == AnswerKind::expression;
      if (answer_numeric) {
        if (auto hard = match_numeric_symbolic(rec.parsed.value, gold)) {
          bool literal = rec.parsed.kind == AnswerKind::numeric;
          auto gold_eval = rational::evaluate(gold);
          if (gold_eval && gold_eval->kind == rational::LiteralKind::expression)
            literal = false;
          rec.method = literal ? ScoreMethod::numeric : ScoreMethod::symbolic;
          rec.hard = hard;
          break;
        }
      }
      if (rec.parsed.kind == AnswerKind::unparseable) {
        rec.method = ScoreMethod::skip_core;
        rec.flags.insert("unparseable_response");
        break;
      }
      rec.method = ScoreMethod::judge;
      JudgeOutcome outcome = judge_answer(item, raw_answer, judge);
      rec.judge_label = outcome.label;
      rec.soft = outcome.soft;
      for (const auto& f : outcome.flags) rec.flags.insert(f);
      break;
    }
  }

  // Eq-style final: hard wins, then soft, else absent.
  if (rec.hard)
    rec.final = static_cast<double>(*rec.hard);
  else if (rec.soft)
    rec.final = *rec.soft;
  return rec;
}

ojson ScoreRecord::to_json() const {
  ojson j;
  j["answerer"] = answerer;
  j["item_id"] = item_id;
  j["method"] = to_string(method);
  j["hard"] = hard ? ojson(*hard) : ojson(nullptr);
  j["soft"] = soft ? ojson(*soft) : ojson(nullptr);
  j["final"] = final ? ojson(*final) : ojson(nullptr);
  j["judge_label"] = judge_label ? ojson(to_string(*judge_label)) : ojson(nullptr);
  ojson flags_json = ojson::array();
  for (const auto& f : flags) flags_json.push_back(f);
  j["flags"] = flags_json;
  ojson parsed_json;
  parsed_json["kind"] = to_string(parsed.kind);
  parsed_json["value"] = parsed.value;
  parsed_json["notes"] = parsed.notes;
  j["parsed"] = parsed_json;
  return j;
}

ojson methods_histogram(const std::vector<ScoreRecord>& records) {
  std::map<std::string, int> counts;
  for (const auto& r : records) counts[to_string(r.method)]++;
  ojson j = ojson::object();
  for (const auto& [k, v] : counts) j[k] = v;
  return j;
}

}  // namespace bench
