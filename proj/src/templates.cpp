#include "bench/templates.hpp"

#include <regex>

#include "bench/error.hpp"
#include "bench/util.hpp"
#include "bench/validate.hpp"

namespace bench {

namespace {

const char* kDesignerSystem = R"(You are an expert exam-question writer for {dataset_display} ({dataset_name}).

Your ONLY job: given a user message describing domains, counts and distributions,
reply with ONE JSON array of question objects and NOTHING else.

Schema (field names and allowed values):

{id, designer_model, source_dataset, super_parent, subdomain,
  design_type in ["standard","adversarial"],
  modality, language,
  question_type in ["mcq_single","mcq_multi","open_ended","structured"],
  question_stem, options, answer, answer_explanation,
  declared_difficulty in ["L1","L2","L3","L4","L5"],
  estimated_time_sec (int),
  uses_visual (bool), visual_instruction}

Every question object MUST include all of these fields.

Conventions:
- designer_model = "{designer_model}"
- source_dataset = "{dataset_name}"
- Defaults if not specified by the user:
  * modality = "text", uses_visual = false, visual_instruction = null
  * language = dataset language (English by default)
- Difficulty: L1..L5 go from very easy recall (L1) to very hard multi-step reasoning (L5, ~90-120s).
- Question types:
  * mcq_single: 4-5 options, exactly 1 correct; answer is a single letter.
  * mcq_multi: 4-5 options, usually 2-3 correct; answer is an array of letters.
  * open_ended / structured: options = []; answer is a short gold text; also provide a concise answer_explanation.
    Keep both answer and explanation strictly under 20 words; avoid multi-paragraph outputs.
- design_type:
  * "standard" = normal fair exam questions.
  * "adversarial" = harder / edge-case but still precise and unambiguous.

Quality rules (for EVERY question):
- Original (no copying from examples), domain-correct, solvable from standard knowledge.
- Clear, unambiguous stem and options; plausible distractors, no nonsense.
- Avoid pure trivia and obscure implementation details unless canonical.

Output:
- Return exactly the requested number of questions in a single JSON array.
- No markdown, comments, or prose outside the array.
)";

const char* kDesignerUser = R"(Task: generate <TOTAL_QUESTIONS> questions for dataset '<DATASET_DISPLAY_NAME>'.

Target super_parent domains (choose exactly one per question):
<TARGET_DOMAINS_BLOCK>

Language: <LANGUAGE_INSTRUCTIONS>
Modality: <MODALITY_INSTRUCTIONS>

Quantitative targets (match as closely as possible):
- standard_questions: <N_STANDARD>
- adversarial_questions: <N_ADVERSARIAL>
- difficulty_targets: <DIFFICULTY_TARGETS>
- question_type_targets: <QUESTION_TYPE_TARGETS>
- super_parent_targets: <COVERAGE_TARGETS>

ID rules:
- Use IDs of the form "<ID_PREFIX>_qXXX" with zero-padded index.
- Use sequential IDs from <ID_FIRST> to <ID_LAST> with no gaps.

Per-question fixed fields:
- designer_model = "<DESIGNER_MODEL>"
- source_dataset = "<DATASET_NAME>"

Schema reminders (strict):
- answer_explanation must be >= 10 characters.
- For question_type="mcq_multi", answer MUST be a JSON list (e.g., ["A","C"]).
- For question_type="mcq_single", answer MUST be a single string (e.g., "B").
- For question_type="open_ended" or "structured", answer MUST be a string.

Output:
- Return only one single JSON array with exactly <TOTAL_QUESTIONS> question objects and nothing else.
- Output only the JSON array; do not include commentary, summaries, or extra text before/after it.
)";

std::string replace_all(std::string text, const std::string& from, const std::string& to) {
  size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
  return text;
}

std::string counts_json(const std::map<std::string, int>& m) {
  ojson j = ojson::object();
  for (const auto& [k, v] : m) j[k] = v;
  return j.dump();
}

void check_resolved(const std::string& text, const char* which) {
  static const std::regex angle("<[A-Z][A-Z0-9_]*>");
  static const std::regex curly("\\{[a-z][a-z0-9_]*\\}");
  std::vector<std::string> leftover;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), angle);
       it != std::sregex_iterator(); ++it)
    leftover.push_back(it->str());
  for (auto it = std::sregex_iterator(text.begin(), text.end(), curly);
       it != std::sregex_iterator(); ++it)
    leftover.push_back(it->str());
  if (!leftover.empty()) {
    std::string msg = std::string(which) + " prompt has unresolved placeholders:";
    for (const auto& p : leftover) msg += " " + p;
    throw Error(Errc::template_error, msg);
  }
}

}  // namespace

PromptTemplates PromptTemplates::defaults() {
  return PromptTemplates{kDesignerSystem, kDesignerUser};
}

RequestPair assemble_generation_request(const DomainCard& card, const BatchPlan& plan,
                                        const ModelId& designer,
                                        const PromptTemplates& templates,
                                        const std::string& id_prefix) {
  if (designer.name.empty())
    throw Error(Errc::template_error, "designer_model placeholder value is empty");
  if (card.meta.dataset.empty())
    throw Error(Errc::template_error, "dataset_name placeholder value is empty");

  std::string system = templates.designer_system;
  system = replace_all(system, "{dataset_display}", card.meta.dataset);
  system = replace_all(system, "{dataset_name}", card.meta.dataset);
  system = replace_all(system, "{designer_model}", designer.name);
  // The schema block's braces are literal, not placeholders; mask the two
  // legitimate residues before the check by construction: the schema block
  // uses multi-line braces that the placeholder regex does not match.
  check_resolved(system, "system");

  // Per-domain block: ontology order, glossary terms and sample snippets.
  std::string domains;
  std::map<std::string, const DomainCard::GlossaryEntry*> glossary;
  for (const auto& ge : card.glossary) glossary[ge.super_parent] = &ge;
  std::map<std::string, const DomainCard::SampleEntry*> samples;
  for (const auto& se : card.samples) samples[se.super_parent] = &se;
  for (const auto& oe : card.ontology) {
    if (!plan.coverage_request.count(oe.super_parent)) continue;
    domains += "- " + oe.super_parent + " (target: " +
               std::to_string(plan.coverage_request.at(oe.super_parent)) + ")\n";
    if (!oe.mid_level_parents.empty()) {
      domains += "  Subdomains: ";
      for (size_t i = 0; i < oe.mid_level_parents.size(); ++i) {
        if (i) domains += ", ";
        domains += oe.mid_level_parents[i];
      }
      domains += "\n";
    }
    if (auto g = glossary.find(oe.super_parent);
        g != glossary.end() && !g->second->typical_terms.empty()) {
      domains += "  Topics: ";
      for (size_t i = 0; i < g->second->typical_terms.size(); ++i) {
        if (i) domains += ", ";
        domains += g->second->typical_terms[i];
      }
      domains += "\n";
    }
    if (auto s = samples.find(oe.super_parent);
        s != samples.end() && !s->second->examples.empty()) {
      domains += "  Example items: ";
      for (size_t i = 0; i < s->second->examples.size(); ++i) {
        if (i) domains += " | ";
        domains += "[" + s->second->examples[i].item_id + "] " +
                   s->second->examples[i].question;
      }
      domains += "\n";
    }
  }
  if (domains.empty()) domains = "- (no coverage targets)\n";
  while (!domains.empty() && domains.back() == '\n') domains.pop_back();

  int n_std = 0, n_adv = 0;
  if (auto it = plan.intent_request.find("standard"); it != plan.intent_request.end())
    n_std = it->second;
  if (auto it = plan.intent_request.find("adversarial"); it != plan.intent_request.end())
    n_adv = it->second;

  std::string user = templates.designer_user;
  user = replace_all(user, "<TOTAL_QUESTIONS>", std::to_string(plan.size));
  user = replace_all(user, "<DATASET_DISPLAY_NAME>", card.meta.dataset);
  user = replace_all(user, "<TARGET_DOMAINS_BLOCK>", domains);
  user = replace_all(user, "<LANGUAGE_INSTRUCTIONS>",
                     plan.language.empty() ? "write in English (en)"
                                           : "write in language tag '" + plan.language + "'");
  user = replace_all(user, "<MODALITY_INSTRUCTIONS>",
                     plan.modality_directives.empty() ? "text-only questions"
                                                      : plan.modality_directives);
  user = replace_all(user, "<N_STANDARD>", std::to_string(n_std));
  user = replace_all(user, "<N_ADVERSARIAL>", std::to_string(n_adv));
  user = replace_all(user, "<DIFFICULTY_TARGETS>", counts_json(plan.difficulty_request));
  user = replace_all(user, "<QUESTION_TYPE_TARGETS>", counts_json(plan.format_request));
  user = replace_all(user, "<COVERAGE_TARGETS>", counts_json(plan.coverage_request));
  user = replace_all(user, "<ID_PREFIX>", id_prefix);
  user = replace_all(user, "<ID_FIRST>", make_item_id(id_prefix, plan.id_start, plan.id_end));
  user = replace_all(user, "<ID_LAST>", make_item_id(id_prefix, plan.id_end, plan.id_end));
  user = replace_all(user, "<DESIGNER_MODEL>", designer.name);
  user = replace_all(user, "<DATASET_NAME>", card.meta.dataset);
  check_resolved(user, "user");

  return {system, user};
}

RequestPair answer_prompt(const Item& item) {
  auto qt = item.qtype();
  std::string system, user;
  std::string options;
  for (size_t i = 0; i < item.options.size(); ++i)
    options += std::string(1, static_cast<char>('A' + i)) + ". " + item.options[i] + "\n";

  if (qt == QuestionType::mcq_single) {
    system =
        "You are taking an exam. Choose exactly one correct option. Do not show any "
        "reasoning or steps.";
    std::string letters;
    for (size_t i = 0; i < item.options.size(); ++i) {
      if (i) letters += ", ";
      letters += static_cast<char>('A' + i);
    }
    user = "Question:\n" + item.question_stem + "\n\nOptions:\n" + options +
           "\nRespond with only one capital letter (" + letters +
           ") and nothing else.\nNo explanation, no justification, no markdown.";
  } else if (qt == QuestionType::mcq_multi) {
    system =
        "You are taking an exam. Some questions may have multiple correct options. Do not "
        "show any reasoning or steps.";
    user = "Question:\n" + item.question_stem + "\n\nOptions:\n" + options +
           "\nReturn the correct options as a JSON array of capital letters.\n"
           "Examples: [\"A\"], [\"A\",\"C\"], [\"B\",\"D\",\"E\"].\n"
           "Answer with only the JSON array and nothing else.";
  } else if (qt == QuestionType::structured) {
    system =
        "You are taking a structured exam. Follow the requested output format exactly.";
    user = "Question:\n" + item.question_stem +
           "\nProduce your answer in the requested structure only (e.g., numbered list / "
           "table schema / JSON),\nwith no additional commentary, reasoning, or prose.";
  } else if (qt == QuestionType::judgment) {
    system =
        "You are taking an exam. Decide whether the statement is true or false. Do not "
        "show any reasoning or steps.";
    user = "Statement:\n" + item.question_stem +
           "\nAnswer with only \"true\" or \"false\" and nothing else.";
  } else {  // open_ended and anything unknown falls back to short answer
    system =
        "You are taking a short-answer exam. Give concise, direct answers. Do not include "
        "reasoning or steps.";
    user = "Question:\n" + item.question_stem +
           "\nAnswer with ONLY the final answer. No reasoning, no markdown, no extra words.";
  }
  if (item.uses_visual && item.visual_instruction)
    user = "Visual context: " + *item.visual_instruction + "\n\n" + user;
  return {system, user};
}

RequestPair quality_judge_prompt(
    const Item& item, const std::vector<std::pair<std::string, std::string>>& samples) {
  std::string system =
      "You are an expert dataset quality judge. Be concise and deterministic. Do not "
      "explain your reasoning.";
  std::string user = "Question quality check\n";
  user += "Question type: " + item.question_type + "\n";
  user += "Stem: " + item.question_stem + "\n";
  if (!item.options.empty()) {
    user += "Options:\n";
    for (const auto& o : item.options) user += "- " + o + "\n";
  }
  user += "Gold answer: " + (item.answer.is_string() ? item.answer.get<std::string>()
                                                     : item.answer.dump()) +
          "\n\nSample model answers:\n";
  for (const auto& [who, what] : samples) user += "- " + who + ": " + what + "\n";
  user +=
      "\nReturn minified JSON only, one line, with key \"decision\"\n"
      "set to one of [\"clean\",\"not_well_posed\",\"gold_incorrect\",\"ambiguous\"].";
  return {system, user};
}

RequestPair answer_judge_prompt(const Item& item, const std::string& model_answer) {
  std::string gold =
      item.answer.is_string() ? item.answer.get<std::string>() : item.answer.dump();
  std::string user = "You are an expert grader evaluating a student's answer.\n\n";
  user += "Question:\n" + item.question_stem + "\n\n";
  user += "Gold reference answer:\n" + gold + "\n\n";
  user += "Student answer:\n" + model_answer + "\n\n";
  user +=
      "Instructions:\n"
      "- Be strict on technical accuracy, but tolerant of rephrasing or extra correct "
      "detail.\n"
      "- If uncertain, output \"broken_item\". Do NOT guess.\n\n"
      "Grading rubric:\n"
      "correct (0.9-1.0): All core ideas present; minor phrasing differences OK.\n"
      "partially_correct (0.4-0.8): Main idea present, but key details missing/vague/"
      "misstated.\n"
      "incorrect (0.0-0.3): Core concept missing or fundamentally wrong.\n"
      "broken_item: Question/gold answer is flawed, ambiguous, or factually incorrect.\n\n"
      "Output requirements:\n"
      "- JSON only. No markdown, no extra text.\n"
      "- \"missing\" and \"errors\" must be lists (empty if none).\n"
      "- Keep items in \"missing\"/\"errors\" concise (<=12 words).\n\n"
      "{\n"
      "  \"label\": \"correct\" | \"partially_correct\" | \"incorrect\" | \"broken_item\",\n"
      "  \"score\": <float>,\n"
      "  \"missing\": [\"...\"],\n"
      "  \"errors\": [\"...\"]\n"
      "}";
  return {"", user};
}

}  // namespace bench
