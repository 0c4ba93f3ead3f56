#pragma once

// The 50-response golden corpus: every question type, fenced and boilerplate
// answers, numeric/fraction equivalences, judge-band clamps, and judge
// protocol recovery. Scripted judge replies make scoring fully offline.

#include <string>
#include <vector>

#include "bench/types.hpp"

namespace testsup {

struct GoldenCase {
  bench::Item item;
  std::string raw;
  std::vector<std::string> judge_replies;  // consumed in order by the scripted judge
};

inline std::vector<GoldenCase> make_golden_corpus() {
  using bench::Item;
  using bench::ojson;
  std::vector<GoldenCase> out;
  int next = 1;

  auto base = [&next](const std::string& qtype) {
    Item it;
    char id[16];
    std::snprintf(id, sizeof id, "gold_q%03d", next++);
    it.id = id;
    it.designer_model = "gpt-5-mini";
    it.source_dataset = "golden";
    it.super_parent = "mixed";
    it.subdomain = "corpus";
    it.design_type = "standard";
    it.modality = "text";
    it.language = "en";
    it.question_type = qtype;
    it.question_stem = "Golden stem for " + std::string(id);
    it.answer_explanation = "Reference rationale for the golden corpus.";
    it.declared_difficulty = "L2";
    it.estimated_time_sec = 30;
    it.uses_visual = false;
    return it;
  };
  auto mcq = [&](const std::string& gold, int n_options, const std::string& raw) {
    Item it = base("mcq_single");
    for (int i = 0; i < n_options; ++i)
      it.options.push_back("choice " + std::to_string(i + 1));
    it.answer = gold;
    out.push_back({it, raw, {}});
  };
  auto multi = [&](std::vector<std::string> gold, const std::string& raw) {
    Item it = base("mcq_multi");
    for (int i = 0; i < 5; ++i) it.options.push_back("choice " + std::to_string(i + 1));
    ojson arr = ojson::array();
    for (const auto& g : gold) arr.push_back(g);
    it.answer = arr;
    out.push_back({it, raw, {}});
  };
  auto judgment = [&](const std::string& gold, const std::string& raw) {
    Item it = base("judgment");
    it.answer = gold;
    out.push_back({it, raw, {}});
  };
  auto open_numeric = [&](const std::string& gold, const std::string& raw) {
    Item it = base("open_ended");
    it.answer = gold;
    out.push_back({it, raw, {}});
  };
  auto judged = [&](const std::string& qtype, const std::string& gold, const std::string& raw,
                    std::vector<std::string> replies) {
    Item it = base(qtype);
    it.answer = gold;
    out.push_back({it, raw, std::move(replies)});
  };

  // --- mcq_single (12): plain, casing, boilerplate, fences, wrong, unparseable
  mcq("B", 4, "B");
  mcq("B", 4, "b");
  mcq("C", 4, "The answer is C.");
  mcq("A", 4, "```\nA\n```");
  mcq("D", 4, "Answer: D.");
  mcq("B", 4, "A");
  mcq("B", 4, "I cannot decide between these options.");
  mcq("D", 4, "E");  // parseable letter outside the option range
  mcq("B", 4, "**B**");
  mcq("C", 4, "(C)");
  mcq("A", 5, "The correct answer is A");
  mcq("B", 4, "b.");

  // --- mcq_multi (8): arrays, order, casing, bare letters, strictness
  multi({"A", "C"}, "[\"A\",\"C\"]");
  multi({"A", "C"}, "[\"C\",\"A\"]");
  multi({"A", "C"}, "[\"a\",\"c\"]");
  multi({"A", "C"}, "A, C");
  multi({"B", "D"}, "B,D,");
  multi({"A", "C"}, "[\"A\"]");            // subset scores 0
  multi({"A", "C"}, "[\"A\",\"C\",\"D\"]");  // superset scores 0
  multi({"A", "C"}, "whatever comes to mind");

  // --- judgment (6)
  judgment("true", "true");
  judgment("true", "True.");
  judgment("true", "yes");
  judgment("false", "false");
  judgment("false", "no");
  judgment("true", "possibly");

  // --- open numeric / symbolic (14)
  open_numeric("1/2", "0.5");
  open_numeric("1024", "2^10");
  open_numeric("1/3", "0.3333");
  open_numeric("0.5", "50%");
  open_numeric("42", "42.0");
  open_numeric("3/4", "(3)/(4)");
  open_numeric("0.25", "1/4");
  open_numeric("2", "6/3");
  open_numeric("10", "11");
  open_numeric("1e-3", "0.001");
  open_numeric("7", "  7 ");
  open_numeric("100", "10^2");
  open_numeric("0.1", "1/10");
  open_numeric("5/8", "0.625");

  // --- judged open/structured (10): bands, clamps, broken, protocol recovery
  judged("open_ended", "the scheduler preempts the running task",
         "the scheduler preempts the running task",
         {R"({"label":"correct","score":0.95,"missing":[],"errors":[]})"});
  judged("open_ended", "caches exploit temporal locality",
         "caches exploit temporal locality of reference",
         {R"({"label":"correct","score":0.5,"missing":[],"errors":[]})"});  // clamp up to 0.9
  judged("open_ended", "routers forward packets between networks",
         "routers forward packets",
         {R"({"label":"partially_correct","score":0.6,"missing":["between networks"],"errors":[]})"});
  judged("open_ended", "mutexes guarantee mutual exclusion",
         "mutexes are about exclusion",
         {R"({"label":"partially_correct","score":0.95,"missing":[],"errors":[]})"});  // clamp 0.8
  judged("open_ended", "compilers lower source code to machine code",
         "interpreters execute code line by line",
         {R"({"label":"incorrect","score":0.1,"missing":[],"errors":["wrong mechanism"]})"});
  judged("open_ended", "DNS resolves names to addresses", "DNS encrypts traffic",
         {R"({"label":"incorrect","score":0.7,"missing":[],"errors":["wrong function"]})"});  // clamp 0.3
  judged("open_ended", "ambiguous reference answer", "any response at all",
         {R"({"label":"broken_item","score":0.0,"missing":[],"errors":["gold is ambiguous"]})"});
  judged("structured", "1. parse 2. plan 3. execute", "1. parse 2. plan 3. execute",
         {"the grading is: correct",  // protocol violation, judge re-asked once
          R"({"label":"correct","score":0.93,"missing":[],"errors":[]})"});
  judged("structured", "rows then columns", "columns then rows",
         {R"({"label":"partially_correct","score":0.44,"missing":["order"],"errors":[]})"});
  judged("structured", "a numbered list of steps", "   ", {});  // blank: unparseable, no judge

  return out;
}

}  // namespace testsup
