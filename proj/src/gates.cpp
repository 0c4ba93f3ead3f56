#include "bench/gates.hpp"

#include <algorithm>
#include <map>

#include "bench/error.hpp"
#include "bench/sim_backend.hpp"
#include "bench/templates.hpp"

namespace bench {

const char* to_string(DynamicDecision d) {
  switch (d) {
    case DynamicDecision::clean: return "clean";
    case DynamicDecision::not_well_posed: return "not_well_posed";
    case DynamicDecision::gold_incorrect: return "gold_incorrect";
    case DynamicDecision::ambiguous: return "ambiguous";
  }
  return "?";
}

std::optional<DynamicDecision> parse_dynamic_decision(const std::string& s) {
  if (s == "clean") return DynamicDecision::clean;
  if (s == "not_well_posed") return DynamicDecision::not_well_posed;
  if (s == "gold_incorrect") return DynamicDecision::gold_incorrect;
  if (s == "ambiguous") return DynamicDecision::ambiguous;
  return std::nullopt;
}

ojson CoreDecision::to_json() const {
  ojson j;
  j["item_id"] = item_id;
  j["in_core"] = in_core;
  j["item_status"] = status_to_json(item_status);
  j["dynamic_decision"] =
      dynamic_decision ? ojson(to_string(*dynamic_decision)) : ojson(nullptr);
  j["reasons"] = reasons;
  return j;
}

DynamicPassResult dynamic_quality_pass(const Item& item,
                                       const std::vector<ScoreRecord>& records,
                                       const JudgeFn& judge) {
  // usable samples need a parsed answer to show the judge
  std::vector<const ScoreRecord*> usable;
  for (const auto& r : records)
    if (r.item_id == item.id && r.parsed.kind != AnswerKind::unparseable)
      usable.push_back(&r);

  if (usable.size() < 2)
    return {DynamicDecision::clean, "low evidence: fewer than 2 panel answers"};

  // most-disagreeing pair: extreme final scores, ties by answerer name
  auto value_of = [](const ScoreRecord* r) { return r->final ? *r->final : -1.0; };
  auto by_score = [&](const ScoreRecord* a, const ScoreRecord* b) {
    if (value_of(a) != value_of(b)) return value_of(a) < value_of(b);
    return a->answerer < b->answerer;
  };
  const ScoreRecord* low = *std::min_element(usable.begin(), usable.end(), by_score);
  const ScoreRecord* high = *std::max_element(usable.begin(), usable.end(), by_score);
  if (low == high) high = usable.back();

  std::vector<std::pair<std::string, std::string>> samples = {
      {high->answerer, high->parsed.value},
      {low->answerer, low->parsed.value},
  };
  RequestPair prompt = quality_judge_prompt(item, samples);
  ojson context = sim_quality_context(item);

  auto try_parse = [](const std::string& reply) -> std::optional<DynamicDecision> {
    json j = json::parse(reply, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("decision") ||
        !j["decision"].is_string())
      return std::nullopt;
    return parse_dynamic_decision(j["decision"].get<std::string>());
  };

  std::string reply = judge(prompt, context);
  auto decision = try_parse(reply);
  if (!decision) {
    RequestPair retry = prompt;
    retry.user += "\n\nREMINDER: reply with the minified JSON object only.";
    reply = judge(retry, context);
    decision = try_parse(reply);
    if (!decision)
      throw Error(Errc::judge_protocol, "quality judge reply violates contract twice");
  }
  return {*decision, "quality judge decision"};
}

std::vector<CoreDecision> build_core(
    const std::vector<Item>& suite, const std::vector<ItemStatus>& statuses,
    const std::vector<std::optional<DynamicDecision>>& decisions,
    const std::vector<ScoreRecord>& records) {
  if (suite.size() != statuses.size())
    throw Error(Errc::domain_error, "suite/status size mismatch");

  std::map<std::string, std::pair<int, int>> scorable;  // id -> (with final, judged broken)
  for (const auto& r : records) {
    auto& slot = scorable[r.item_id];
    if (r.final) slot.first++;
    if (r.flags.count("judge_broken_item")) slot.second++;
  }

  std::vector<CoreDecision> out;
  out.reserve(suite.size());
  for (size_t i = 0; i < suite.size(); ++i) {
    CoreDecision d;
    d.item_id = suite[i].id;
    d.item_status = statuses[i];
    if (i < decisions.size()) d.dynamic_decision = decisions[i];

    bool static_ok = d.item_status.status == StaticStatus::clean ||
                     d.item_status.status == StaticStatus::suspect_static;
    if (!static_ok) {
      d.reasons.push_back("static: " + std::string(to_string(d.item_status.status)));
      for (const auto& n : d.item_status.notes) d.reasons.push_back("static: " + n);
    }

    auto sc = scorable.find(suite[i].id);
    bool route_skip = d.item_status.scoring_route == ScoringRoute::skip_core;
    if (sc != scorable.end()) {
      if (sc->second.first == 0) route_skip = true;       // nobody produced a score
      if (sc->second.second > 0) {
        route_skip = true;                                 // answer judge declared it broken
        d.reasons.push_back("dynamic: judge flagged broken_item");
      }
    } else if (!records.empty()) {
      route_skip = true;  // scored suite, but this item has no records at all
    }
    if (route_skip && d.reasons.empty())
      d.reasons.push_back("scoring_route: skip_core (no scorable responses)");
    else if (route_skip && sc != scorable.end() && sc->second.first == 0)
      d.reasons.push_back("scoring_route: skip_core (no scorable responses)");

    bool dynamic_bad = d.dynamic_decision && *d.dynamic_decision != DynamicDecision::clean;
    if (dynamic_bad)
      d.reasons.push_back("dynamic: " + std::string(to_string(*d.dynamic_decision)));

    d.in_core = static_ok && !route_skip && !dynamic_bad;
    if (d.in_core) d.reasons.clear();
    out.push_back(std::move(d));
  }
  return out;
}

double noncore_rate(std::int64_t suite_size, std::int64_t core_size) {
  if (suite_size <= 0) throw Error(Errc::domain_error, "suite is empty");
  if (core_size > suite_size || core_size < 0)
    throw Error(Errc::domain_error, "core exceeds suite");
  return 1.0 - static_cast<double>(core_size) / static_cast<double>(suite_size);
}

ojson core_manifest(const std::vector<CoreDecision>& decisions) {
  ojson j;
  ojson core_ids = ojson::array();
  std::map<std::string, int> histogram;
  std::int64_t in_core = 0;
  for (const auto& d : decisions) {
    if (d.in_core) {
      core_ids.push_back(d.item_id);
      ++in_core;
    } else {
      for (const auto& r : d.reasons) histogram[r.substr(0, r.find(':'))]++;
    }
  }
  j["core_ids"] = core_ids;
  j["core_count"] = in_core;
  j["suite_count"] = decisions.size();
  j["noncore_rate"] =
      decisions.empty() ? 0.0 : noncore_rate(static_cast<std::int64_t>(decisions.size()), in_core);
  ojson hist = ojson::object();
  for (const auto& [k, v] : histogram) hist[k] = v;
  j["exclusion_reasons"] = hist;
  ojson detail = ojson::array();
  for (const auto& d : decisions) detail.push_back(d.to_json());
  j["decisions"] = detail;
  return j;
}

}  // namespace bench
