#include <doctest.h>

#include <algorithm>

#include "bench/error.hpp"
#include "bench/quota.hpp"
#include "bench/suite.hpp"
#include "bench/templates.hpp"
#include "bench/util.hpp"
#include "test_support.hpp"

using namespace bench;

namespace {

DomainCard demo_card(int n_labels = 3) {
  DomainCard card;
  card.meta.dataset = "demo";
  card.meta.total_items = 30;
  card.meta.text = true;
  for (int i = 0; i < n_labels; ++i) {
    std::string label = "topic-" + std::to_string(i);
    card.ontology.push_back({label, {}});
    card.glossary.push_back({label, {"term-a", "term-b"}});
    card.samples.push_back({label, {{"s_q00" + std::to_string(i + 1), "sample stem"}}});
  }
  return card;
}

Item quota_item(const std::string& intent, const std::string& diff, const std::string& fmt,
                const std::string& topic) {
  Item it;
  it.id = "q_q001";
  it.design_type = intent;
  it.declared_difficulty = diff;
  it.question_type = fmt;
  it.super_parent = topic;
  return it;
}

// independent oracle: enumerate every floor/ceil rounding consistent with the
// total and verify the implementation picked the largest-remainder one
bool is_largest_remainder_choice(const std::map<std::string, double>& weights, int total,
                                 const std::map<std::string, int>& picked) {
  double wsum = 0;
  for (const auto& [k, w] : weights) wsum += w;
  int sum = 0;
  double err_picked = 0;
  for (const auto& [k, w] : weights) {
    double exact = total * w / wsum;
    int got = picked.at(k);
    if (got != static_cast<int>(std::floor(exact)) && got != static_cast<int>(std::ceil(exact)))
      return false;
    sum += got;
    err_picked += std::fabs(got - exact);
  }
  if (sum != total) return false;
  // no alternative floor/ceil assignment with the same total may beat it
  std::vector<std::pair<std::string, double>> keys(weights.begin(), weights.end());
  size_t n = keys.size();
  for (size_t mask = 0; mask < (1ull << n); ++mask) {
    int alt_sum = 0;
    double err = 0;
    for (size_t i = 0; i < n; ++i) {
      double exact = total * keys[i].second / wsum;
      int v = static_cast<int>(std::floor(exact)) + ((mask >> i) & 1 ? 1 : 0);
      alt_sum += v;
      err += std::fabs(v - exact);
    }
    if (alt_sum == total && err < err_picked - 1e-12) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("intent quota splits exactly on round fractions") {
  QuotaConfig cfg;
  QuotaSpec spec = derive_quota(demo_card(), cfg, 300);
  CHECK(spec.intent_targets.at("standard") == 225);
  CHECK(spec.intent_targets.at("adversarial") == 75);
}

TEST_CASE("largest remainder puts the leftover unit on the largest remainder, ties first") {
  QuotaConfig cfg;  // difficulty fractions .14/.24/.32/.20/.10
  QuotaSpec spec = derive_quota(demo_card(), cfg, 10);
  CHECK(spec.difficulty_targets.at("L1") == 2);  // tie with L2 broken toward L1
  CHECK(spec.difficulty_targets.at("L2") == 2);
  CHECK(spec.difficulty_targets.at("L3") == 3);
  CHECK(spec.difficulty_targets.at("L4") == 2);
  CHECK(spec.difficulty_targets.at("L5") == 1);
}

TEST_CASE("property: apportionment matches the enumeration oracle") {
  KeyedRng rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    std::string t = "lr:" + std::to_string(trial);
    int n = 2 + static_cast<int>(rng.pick(t + "n", 5));
    std::map<std::string, double> weights;
    for (int i = 0; i < n; ++i)
      weights["k" + std::to_string(i)] = 0.05 + rng.uniform(t + "w" + std::to_string(i));
    int total = 1 + static_cast<int>(rng.pick(t + "T", 60));
    auto picked = largest_remainder(weights, total);
    INFO("trial ", trial);
    CHECK(is_largest_remainder_choice(weights, total, picked));
  }
}

TEST_CASE("more super_parents than total is infeasible") {
  QuotaConfig cfg;
  CHECK_THROWS_AS(derive_quota(demo_card(5), cfg, 3), Error);
  try {
    derive_quota(demo_card(5), cfg, 3);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::infeasible_quota);
  }
}

TEST_CASE("coverage targets give every super_parent at least one item") {
  QuotaConfig cfg;
  QuotaSpec spec = derive_quota(demo_card(7), cfg, 9);
  int total = 0;
  for (const auto& [label, n] : spec.coverage_targets) {
    CHECK(n >= 1);
    total += n;
  }
  CHECK(total == 9);
}

TEST_CASE("deficit arithmetic: clamping and satisfaction") {
  QuotaSpec spec;
  spec.total = 5;
  spec.difficulty_targets = {{"L1", 2}, {"L2", 3}};
  spec.intent_targets = {{"standard", 5}};
  spec.format_targets = {{"mcq_single", 5}};
  spec.coverage_targets = {{"t", 5}};

  std::vector<Item> realized;
  for (int i = 0; i < 2; ++i) realized.push_back(quota_item("standard", "L1", "mcq_single", "t"));
  realized.push_back(quota_item("standard", "L2", "mcq_single", "t"));

  DeficitReport rep = compute_deficit(spec, realized);
  CHECK(rep.difficulty.deficit.at("L1") == 0);
  CHECK(rep.difficulty.deficit.at("L2") == 2);
  CHECK(!rep.satisfied);

  // over-delivery clamps at zero deficit, records surplus
  for (int i = 0; i < 4; ++i) realized.push_back(quota_item("standard", "L1", "mcq_single", "t"));
  rep = compute_deficit(spec, realized);
  CHECK(rep.difficulty.deficit.at("L1") == 0);
  CHECK(rep.difficulty.surplus.at("L1") == 4);
}

TEST_CASE("empty realized set leaves the full total as deficit on every axis") {
  QuotaConfig cfg;
  QuotaSpec spec = derive_quota(demo_card(), cfg, 40);
  DeficitReport rep = compute_deficit(spec, {});
  CHECK(rep.intent.deficit_total() == 40);
  CHECK(rep.difficulty.deficit_total() == 40);
  CHECK(rep.format.deficit_total() == 40);
  CHECK(rep.coverage.deficit_total() == 40);
  CHECK(!rep.satisfied);
}

TEST_CASE("satisfied deficit means no next batch") {
  QuotaSpec spec;
  spec.total = 1;
  spec.intent_targets = {{"standard", 1}};
  spec.difficulty_targets = {{"L1", 1}};
  spec.format_targets = {{"mcq_single", 1}};
  spec.coverage_targets = {{"t", 1}};
  DeficitReport rep = compute_deficit(spec, {quota_item("standard", "L1", "mcq_single", "t")});
  REQUIRE(rep.satisfied);
  CHECK(!plan_next_batch(spec, rep, 20, 1).has_value());
}

TEST_CASE("single-cell deficit yields a forced plan") {
  QuotaSpec spec;
  spec.total = 10;
  spec.intent_targets = {{"standard", 5}, {"adversarial", 5}};
  spec.difficulty_targets = {{"L1", 10}};
  spec.format_targets = {{"mcq_single", 10}};
  spec.coverage_targets = {{"t", 10}};
  std::vector<Item> realized;
  for (int i = 0; i < 5; ++i) realized.push_back(quota_item("standard", "L1", "mcq_single", "t"));
  DeficitReport rep = compute_deficit(spec, realized);
  auto plan = plan_next_batch(spec, rep, 20, 5);
  REQUIRE(plan);
  CHECK(plan->size == 5);
  CHECK(plan->intent_request.at("adversarial") == 5);
  CHECK(plan->intent_request.count("standard") == 0);
  CHECK(plan->id_start == 6);
  CHECK(plan->id_end == 10);
}

TEST_CASE("property: allocation matches a unit-greedy re-simulation") {
  KeyedRng rng(55);
  for (int trial = 0; trial < 100; ++trial) {
    std::string t = "plan:" + std::to_string(trial);
    QuotaSpec spec;
    spec.total = 60;
    spec.intent_targets = {{"standard", 45}, {"adversarial", 15}};
    spec.difficulty_targets = {{"L1", 12}, {"L2", 18}, {"L3", 30}};
    spec.format_targets = {{"mcq_single", 40}, {"open_ended", 20}};
    spec.coverage_targets = {{"a", 30}, {"b", 30}};

    std::vector<Item> realized;
    int n_realized = static_cast<int>(rng.pick(t + "n", 50));
    const char* intents[] = {"standard", "adversarial"};
    const char* diffs[] = {"L1", "L2", "L3"};
    const char* fmts[] = {"mcq_single", "open_ended"};
    const char* tops[] = {"a", "b"};
    for (int i = 0; i < n_realized; ++i) {
      std::string k = t + "i" + std::to_string(i);
      realized.push_back(quota_item(intents[rng.pick(k + "a", 2)], diffs[rng.pick(k + "d", 3)],
                                    fmts[rng.pick(k + "f", 2)], tops[rng.pick(k + "t", 2)]));
    }
    DeficitReport rep = compute_deficit(spec, realized);
    if (rep.satisfied) continue;
    int cap = 5 + static_cast<int>(rng.pick(t + "cap", 30));
    auto plan = plan_next_batch(spec, rep, cap, n_realized);
    REQUIRE(plan);
    CHECK(plan->size == std::min(cap, rep.max_axis_deficit()));  // fresh state: yield 1.0

    // oracle: greedy unit allocation over each axis's deficits
    auto greedy = [&](const std::map<std::string, int>& deficit) {
      std::map<std::string, int> rem = deficit, out;
      for (int u = 0; u < plan->size; ++u) {
        auto best = rem.begin();
        for (auto it = rem.begin(); it != rem.end(); ++it)
          if (it->second > best->second) best = it;
        out[best->first]++;
        best->second--;
      }
      std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
      return out;
    };
    for (QuotaAxis axis : {QuotaAxis::intent, QuotaAxis::difficulty, QuotaAxis::format,
                           QuotaAxis::coverage}) {
      if (rep.axis(axis).deficit_total() == 0) continue;
      INFO("trial ", trial, " axis ", static_cast<int>(axis));
      CHECK(plan->axis(axis) == greedy(rep.axis(axis).deficit));
    }
    // requested maps are mutually consistent
    for (QuotaAxis axis : {QuotaAxis::intent, QuotaAxis::difficulty, QuotaAxis::format,
                           QuotaAxis::coverage}) {
      int sum = 0;
      for (const auto& [k, v] : plan->axis(axis)) sum += v;
      CHECK(sum == plan->size);
    }
  }
}

TEST_CASE("generation request fills every placeholder deterministically") {
  DomainCard card = demo_card();
  QuotaConfig cfg;
  QuotaSpec spec = derive_quota(card, cfg, 30);
  DeficitReport rep = compute_deficit(spec, {});
  auto plan = plan_next_batch(spec, rep, 30, 0);
  REQUIRE(plan);
  ModelId designer{"gpt-5-mini", "gpt"};
  RequestPair a =
      assemble_generation_request(card, *plan, designer, PromptTemplates::defaults(), "demo_gpt");
  RequestPair b =
      assemble_generation_request(card, *plan, designer, PromptTemplates::defaults(), "demo_gpt");
  CHECK(a.system == b.system);
  CHECK(a.user == b.user);
  CHECK(a.user.find("generate 30 questions") != std::string::npos);
  CHECK(a.user.find("demo_gpt_q001") != std::string::npos);
  bool no_residual = a.user.find("<TOTAL_QUESTIONS>") == std::string::npos &&
                     a.user.find("<ID_PREFIX>") == std::string::npos &&
                     a.user.find("<DESIGNER_MODEL>") == std::string::npos;
  CHECK(no_residual);
  CHECK(a.system.find("gpt-5-mini") != std::string::npos);
}

TEST_CASE("missing placeholder values raise TemplateError") {
  DomainCard card = demo_card();
  card.meta.dataset = "";  // no dataset name available
  QuotaConfig cfg;
  QuotaSpec spec = derive_quota(demo_card(), cfg, 10);
  DeficitReport rep = compute_deficit(spec, {});
  auto plan = plan_next_batch(spec, rep, 10, 0);
  ModelId designer{"gpt-5-mini", "gpt"};
  CHECK_THROWS_AS(assemble_generation_request(card, *plan, designer,
                                              PromptTemplates::defaults(), "p"),
                  Error);
  PromptTemplates broken = PromptTemplates::defaults();
  broken.designer_user += "\nExtra: <UNKNOWN_FIELD>\n";
  try {
    assemble_generation_request(demo_card(), *plan, designer, broken, "p");
    FAIL("expected TemplateError");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::template_error);
    CHECK(std::string(e.what()).find("<UNKNOWN_FIELD>") != std::string::npos);
  }
}

TEST_CASE("designer batch parsing tolerates fences and prose") {
  KeyedRng rng(3);
  ojson arr = ojson::array();
  for (int i = 0; i < 3; ++i)
    arr.push_back(item_to_json(testsup::random_valid_item(rng, i, 3)));
  BatchPlan plan;
  plan.size = 3;

  auto direct = parse_designer_batch(arr.dump(), plan);
  CHECK(direct.accepted.size() == 3);
  CHECK(direct.rejects.empty());
  CHECK(!direct.suspect);

  auto fenced = parse_designer_batch("```json\n" + arr.dump() + "\n```", plan);
  CHECK(fenced.accepted.size() == 3);
  CHECK(fenced.suspect);

  auto prose = parse_designer_batch("Here are your questions!\n" + arr.dump() + "\nEnjoy!",
                                    plan);
  CHECK(prose.accepted.size() == 3);
  CHECK(prose.suspect);

  CHECK_THROWS_AS(parse_designer_batch("no array here at all", plan), Error);
}

TEST_CASE("count mismatch and bad elements are recorded as rejects") {
  KeyedRng rng(4);
  ojson arr = ojson::array();
  arr.push_back(item_to_json(testsup::random_valid_item(rng, 0, 2)));
  ojson bad = item_to_json(testsup::random_valid_item(rng, 1, 2));
  bad.erase("question_stem");
  arr.push_back(bad);
  BatchPlan plan;
  plan.size = 3;
  auto parsed = parse_designer_batch(arr.dump(), plan);
  CHECK(parsed.accepted.size() == 1);
  REQUIRE(parsed.rejects.size() == 2);
  CHECK(parsed.rejects[0].first == 1);   // element-level failure
  CHECK(parsed.rejects[1].first == -1);  // batch-level count mismatch
}
