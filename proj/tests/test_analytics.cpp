#include <doctest.h>

#include <cmath>

#include "bench/analytics.hpp"
#include "bench/error.hpp"
#include "bench/reference.hpp"
#include "bench/scoring.hpp"
#include "bench/sim_backend.hpp"
#include "bench/util.hpp"
#include "test_support.hpp"

using namespace bench;

namespace {

ItemRow row_with_hard(const std::string& id, const std::vector<std::optional<int>>& hard) {
  ItemRow row;
  row.item_id = id;
  row.designer = "d";
  row.in_core = true;
  row.hard = hard;
  for (const auto& h : hard)
    row.final.push_back(h ? std::optional<double>(static_cast<double>(*h)) : std::nullopt);
  return row;
}

// Synthetic matrix straight from cells (support 1 unless told otherwise).
ResponseMatrix matrix_from_cells(const std::vector<std::string>& answerers,
                                 const std::vector<std::string>& designers,
                                 const std::vector<std::vector<double>>& cells,
                                 int support = 100) {
  ResponseMatrix m;
  m.variant = {"fixture", "en", "text", std::nullopt};
  m.answerers = answerers;
  m.designers = designers;
  m.cell_mean = cells;
  m.cell_support.assign(answerers.size(), std::vector<int>(designers.size(), support));
  return m;
}

}  // namespace

TEST_CASE("item difficulty is the mean hard score; no hard scores raises") {
  CHECK(item_difficulty(row_with_hard("i", {1, 1, 1, 1})) == doctest::Approx(1.0));
  CHECK(item_difficulty(row_with_hard("i", {1, 0, 1, 0})) == doctest::Approx(0.5));
  CHECK(item_difficulty(row_with_hard("i", {1, std::nullopt, 0, std::nullopt})) ==
        doctest::Approx(0.5));
  CHECK_THROWS_AS(item_difficulty(row_with_hard("i", {std::nullopt, std::nullopt})), Error);
}

TEST_CASE("point-biserial matches the worked example: c=[1,1,0,0], rest=[3,2,2,1]") {
  ItemRow row = row_with_hard("i", {1, 1, 0, 0});
  std::vector<std::optional<double>> rest = {3.0, 2.0, 2.0, 1.0};
  DiscriminationResult r = item_discrimination(row, rest);
  REQUIRE(r.r.has_value());
  CHECK(*r.r == doctest::Approx(0.7071067811).epsilon(1e-9));
}

TEST_CASE("degenerate discrimination cases are reported, not averaged") {
  ItemRow row = row_with_hard("i", {1, 1, 1, 1});  // zero item variance
  std::vector<std::optional<double>> rest = {3.0, 2.0, 2.0, 1.0};
  CHECK(item_discrimination(row, rest).degenerate);
  ItemRow two = row_with_hard("i", {1, 0});  // below the 3-answerer floor
  CHECK(item_discrimination(two, {1.0, 2.0}).degenerate);
}

TEST_CASE("anti-aligned item scores get a negative discrimination (brute force, 4 answerers)") {
  // verify against the one-item-vs-rest brute force over all answerer data
  std::vector<std::vector<std::optional<int>>> hard_by_item = {
      {1, 1, 1, 0},  // item 0
      {1, 1, 0, 0},  // item 1
      {0, 0, 1, 1},  // item 2: anti-aligned with the rest
      {1, 1, 0, 0},  // item 3
  };
  // production path
  std::vector<const ItemRow*> rows;
  std::vector<ItemRow> storage;
  for (size_t i = 0; i < hard_by_item.size(); ++i)
    storage.push_back(row_with_hard("i" + std::to_string(i), hard_by_item[i]));
  for (const auto& r : storage) rows.push_back(&r);
  auto rest = rest_scores(rows, 4);
  DiscriminationResult got = item_discrimination(storage[2], rest[2]);
  auto oracle = ref::point_biserial_naive(hard_by_item, 2);
  REQUIRE(got.r.has_value());
  REQUIRE(oracle.has_value());
  CHECK(*got.r == doctest::Approx(*oracle).epsilon(1e-12));
  CHECK(*got.r < 0);
}

TEST_CASE("kendall tau-b endpoints and the adjacent swap among 3") {
  CHECK(kendall_tau_b({3, 2, 1}, {3, 2, 1}) == doctest::Approx(1.0));
  CHECK(kendall_tau_b({3, 2, 1}, {1, 2, 3}) == doctest::Approx(-1.0));
  // one adjacent swap among 3: 2 concordant, 1 discordant
  CHECK(kendall_tau_b({3, 2, 1}, {2, 3, 1}) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("tau preservation: identical and reversed rankings on a matrix") {
  auto m = matrix_from_cells({"a1", "a2", "a3", "a4"}, {"d1"},
                             {{0.9}, {0.7}, {0.5}, {0.3}});
  TauResult same = kendall_tau_preservation(m, "d1", {"a1", "a2", "a3", "a4"}, 0, 1);
  CHECK(same.tau == doctest::Approx(1.0));
  TauResult reversed = kendall_tau_preservation(m, "d1", {"a4", "a3", "a2", "a1"}, 0, 1);
  CHECK(reversed.tau == doctest::Approx(-1.0));
}

TEST_CASE("tau and consensus depend only on rank order (scale invariance)") {
  auto m = matrix_from_cells({"a1", "a2", "a3", "a4"}, {"d1", "d2"},
                             {{0.9, 0.8}, {0.7, 0.75}, {0.5, 0.6}, {0.3, 0.2}});
  auto transformed = m;
  for (auto& row : transformed.cell_mean)
    for (double& v : row) v = std::exp(3.0 * v) + 5.0;  // strictly increasing

  auto ref_rank = consensus_reference({m}, std::nullopt);
  auto ref_rank_t = consensus_reference({transformed}, std::nullopt);
  CHECK(ref_rank == ref_rank_t);
  TauResult t1 = kendall_tau_preservation(m, "d1", ref_rank, 0, 1);
  TauResult t2 = kendall_tau_preservation(transformed, "d1", ref_rank, 0, 1);
  CHECK(t1.tau == doctest::Approx(t2.tau));
}

TEST_CASE("consensus reference: hold-one-out and symmetry") {
  auto m = matrix_from_cells({"a1", "a2"}, {"d1", "d2"}, {{0.9, 0.2}, {0.1, 0.8}});
  // holding out d1 leaves d2's column ordering
  auto held = consensus_reference({m}, std::string("d1"));
  CHECK(held == std::vector<std::string>{"a2", "a1"});
  // symmetric fixture: reference invariant to the held-out designer
  auto sym = matrix_from_cells({"a1", "a2"}, {"d1", "d2"}, {{0.9, 0.9}, {0.4, 0.4}});
  CHECK(consensus_reference({sym}, std::string("d1")) ==
        consensus_reference({sym}, std::string("d2")));
  // random fixture matches a mean-and-sort oracle
  KeyedRng rng(64);
  std::vector<std::vector<double>> cells(5, std::vector<double>(4));
  for (int a = 0; a < 5; ++a)
    for (int d = 0; d < 4; ++d)
      cells[a][d] = rng.uniform("c" + std::to_string(a) + "_" + std::to_string(d));
  auto rand_m = matrix_from_cells({"a1", "a2", "a3", "a4", "a5"}, {"d1", "d2", "d3", "d4"},
                                  cells);
  auto got = consensus_reference({rand_m}, std::string("d2"));
  std::vector<std::pair<double, std::string>> oracle;
  for (int a = 0; a < 5; ++a) {
    double sum = 0;
    int n = 0;
    for (int d = 0; d < 4; ++d)
      if (d != 1) {
        sum += cells[a][d];
        ++n;
      }
    oracle.emplace_back(-sum / n, rand_m.answerers[a]);
  }
  std::sort(oracle.begin(), oracle.end());
  for (size_t i = 0; i < oracle.size(); ++i) CHECK(got[i] == oracle[i].second);
}

TEST_CASE("alignment divergences: endpoints and the forced half case") {
  std::map<std::string, double> p = {{"a", 0.5}, {"b", 0.5}};
  Divergence same = alignment_divergence(p, p);
  CHECK(same.l1 == doctest::Approx(0.0));
  CHECK(same.js == doctest::Approx(0.0));

  std::map<std::string, double> point_a = {{"a", 1.0}, {"b", 0.0}};
  std::map<std::string, double> point_b = {{"a", 0.0}, {"b", 1.0}};
  Divergence disjoint = alignment_divergence(point_a, point_b);
  CHECK(disjoint.l1 == doctest::Approx(2.0));
  CHECK(disjoint.js == doctest::Approx(1.0));  // base-2 maximum

  Divergence half = alignment_divergence(p, point_a);
  CHECK(half.l1 == doctest::Approx(1.0));

  std::map<std::string, double> mismatched = {{"a", 1.0}};
  CHECK_THROWS_AS(alignment_divergence(p, mismatched), Error);
}

TEST_CASE("property: JS is symmetric and bounded, L1 within [0,2]") {
  KeyedRng rng(12);
  for (int trial = 0; trial < 400; ++trial) {
    std::string t = "js:" + std::to_string(trial);
    int n = 2 + static_cast<int>(rng.pick(t + "n", 6));
    std::map<std::string, double> p, q;
    double sp = 0, sq = 0;
    for (int i = 0; i < n; ++i) {
      std::string k = "k" + std::to_string(i);
      p[k] = rng.uniform(t + "p" + k) + 1e-6;
      q[k] = rng.uniform(t + "q" + k) + 1e-6;
      sp += p[k];
      sq += q[k];
    }
    for (auto& [k, v] : p) v /= sp;
    for (auto& [k, v] : q) v /= sq;
    Divergence pq = alignment_divergence(p, q);
    Divergence qp = alignment_divergence(q, p);
    CHECK(pq.js == doctest::Approx(qp.js).epsilon(1e-12));
    CHECK(pq.js >= -1e-12);
    CHECK(pq.js <= 1.0 + 1e-12);
    CHECK(pq.l1 >= -1e-12);
    CHECK(pq.l1 <= 2.0 + 1e-12);
  }
}

TEST_CASE("family advantage reproduces uniform-cell fixtures exactly") {
  // one answerer per family, one designer per family, own cells acc_own,
  // other cells acc_other
  auto fam = [](const std::string& name) { return name.substr(0, name.find('-')); };
  std::vector<std::string> answerers = {"gpt-ans", "claude-ans"};
  std::vector<std::string> designers = {"gpt-des", "claude-des"};
  auto m = matrix_from_cells(answerers, designers,
                             {{0.936, 0.910}, {0.881, 0.790}});
  FamilyBias bias = family_advantage(m, fam);
  REQUIRE(bias.per_answerer_delta.count("gpt-ans"));
  CHECK(*bias.per_answerer_delta["gpt-ans"] == doctest::Approx(0.026).epsilon(1e-9));
  CHECK(*bias.per_answerer_delta["claude-ans"] == doctest::Approx(-0.091).epsilon(1e-9));
  CHECK(bias.per_family["gpt"].delta_pp == doctest::Approx(2.6).epsilon(1e-9));
  CHECK(bias.per_family["claude"].delta_pp == doctest::Approx(-9.1).epsilon(1e-9));
  // family matrix mirrors the cells
  CHECK(bias.family_matrix["gpt"]["gpt"] == doctest::Approx(0.936));
  CHECK(bias.family_matrix["claude"]["gpt"] == doctest::Approx(0.881));
}

TEST_CASE("family advantage is absent without an own-family designer") {
  auto fam = [](const std::string& name) { return name.substr(0, name.find('-')); };
  auto m = matrix_from_cells({"solo-ans"}, {"gpt-des", "claude-des"}, {{0.5, 0.7}});
  FamilyBias bias = family_advantage(m, fam);
  CHECK(!bias.per_answerer_delta["solo-ans"].has_value());
  CHECK(bias.per_family.empty());
}

TEST_CASE("adversarial effect: identical subsets zero, missing subset absent") {
  ResponseMatrix m;
  m.variant = {"fx", "en", "text", std::nullopt};
  m.answerers = {"a1", "a2", "a3", "a4"};
  m.designers = {"d1", "d2"};
  m.cell_mean.assign(4, std::vector<double>(2, 0.5));
  m.cell_support.assign(4, std::vector<int>(2, 10));
  int counter = 0;
  auto add_item = [&](const std::string& designer, const std::string& dtype,
                      std::vector<std::optional<int>> hard) {
    ItemRow row = row_with_hard("i" + std::to_string(counter++), hard);
    row.designer = designer;
    row.design_type = dtype;
    m.items.push_back(row);
  };
  // d1: standard and adversarial subsets behave identically
  for (int i = 0; i < 6; ++i) {
    add_item("d1", "standard", {1, 1, 0, 0});
    add_item("d1", "adversarial", {1, 1, 0, 0});
  }
  // d2: all standard
  for (int i = 0; i < 6; ++i) add_item("d2", "standard", {1, 0, 1, 0});

  auto drops = adversarial_effect(m, 3);
  REQUIRE(drops.count("d1"));
  REQUIRE(drops.at("d1").has_value());
  CHECK(*drops.at("d1") == doctest::Approx(0.0));
  CHECK(!drops.at("d2").has_value());  // EmptySubset reported as absent
}

TEST_CASE("DQI is computed with population z-scores; degenerate cohorts raise") {
  std::vector<LeaderboardRow> rows(3);
  rows[0] = {"x", 10.0, 0.30, 5.0, 0.8, 100, 0};
  rows[1] = {"y", 20.0, 0.20, 10.0, 0.8, 100, 0};
  rows[2] = {"z", 30.0, 0.10, 15.0, 0.8, 100, 0};
  StrengthDesignReport rep = strength_vs_design(rows, {});
  REQUIRE(rep.dqi.size() == 3);
  CHECK(rep.dqi[0].designer == "x");
  CHECK(rep.dqi[2].designer == "z");
  // population sigma for {10,20,30} is sqrt(200/3); check one z directly
  CHECK(rep.dqi[0].z_broken == doctest::Approx((10.0 - 20.0) / std::sqrt(200.0 / 3.0)));

  std::vector<LeaderboardRow> flat(2);
  flat[0] = {"x", 10.0, 0.30, 5.0, 0.8, 100, 0};
  flat[1] = {"y", 10.0, 0.20, 10.0, 0.8, 100, 0};  // broken variance is zero
  CHECK_THROWS_AS(strength_vs_design(flat, {}), Error);
}

TEST_CASE("perfectly monotone strength-DQI fixture gives rho = 1") {
  std::vector<LeaderboardRow> rows(4);
  rows[0] = {"m1", 5.0, 0.40, 4.0, 0.8, 100, 0};
  rows[1] = {"m2", 10.0, 0.30, 8.0, 0.8, 100, 0};
  rows[2] = {"m3", 15.0, 0.20, 12.0, 0.8, 100, 0};
  rows[3] = {"m4", 20.0, 0.10, 16.0, 0.8, 100, 0};
  std::map<std::string, double> strength = {
      {"m1", 0.9}, {"m2", 0.8}, {"m3", 0.7}, {"m4", 0.6}};
  StrengthDesignReport rep = strength_vs_design(rows, strength);
  REQUIRE(rep.spearman_rho.has_value());
  CHECK(*rep.spearman_rho == doctest::Approx(1.0));
}

TEST_CASE("krippendorff alpha endpoints") {
  using L = std::vector<std::optional<int>>;
  // perfect agreement with variation
  std::vector<L> perfect = {{1, 0, 1, 0}, {1, 0, 1, 0}};
  auto a = krippendorff_alpha(perfect, AlphaDistance::nominal);
  REQUIRE(a.has_value());
  CHECK(*a == doctest::Approx(1.0));
  // constant labels: no variation, alpha undefined
  std::vector<L> constant = {{1, 1, 1}, {1, 1, 1}};
  CHECK(!krippendorff_alpha(constant, AlphaDistance::nominal).has_value());
}

TEST_CASE("alpha on the two-rater alternating table matches the coincidence brute force") {
  using L = std::vector<std::optional<int>>;
  std::vector<L> labels = {{0, 0, 1, 1}, {0, 1, 0, 1}};
  auto impl = krippendorff_alpha(labels, AlphaDistance::nominal);
  auto oracle = ref::alpha_naive(labels, AlphaDistance::nominal);
  REQUIRE(impl.has_value());
  REQUIRE(oracle.has_value());
  CHECK(*impl == doctest::Approx(*oracle).epsilon(1e-12));
  // direct enumeration for this table: Do = 1/2, De = 4/7 -> alpha = 1/8
  CHECK(*impl == doctest::Approx(0.125).epsilon(1e-12));
}

TEST_CASE("ordinal alpha uses cumulative-margin squared distances") {
  using L = std::vector<std::optional<int>>;
  std::vector<L> labels = {{0, 1, 2, 3, 4, 0, 2}, {0, 2, 2, 4, 4, 1, 2}};
  auto impl = krippendorff_alpha(labels, AlphaDistance::ordinal);
  auto oracle = ref::alpha_naive(labels, AlphaDistance::ordinal);
  REQUIRE(impl.has_value());
  REQUIRE(oracle.has_value());
  CHECK(*impl == doctest::Approx(*oracle).epsilon(1e-9));
  // ordinal must differ from nominal on this table
  auto nominal = krippendorff_alpha(labels, AlphaDistance::nominal);
  CHECK(*impl != doctest::Approx(*nominal).epsilon(1e-6));
}

TEST_CASE("alpha handles missing labels and needs a pairable item") {
  using L = std::vector<std::optional<int>>;
  std::vector<L> sparse = {{1, std::nullopt, 0, 1}, {1, 0, std::nullopt, 0},
                           {std::nullopt, 0, 0, 1}};
  auto impl = krippendorff_alpha(sparse, AlphaDistance::nominal);
  auto oracle = ref::alpha_naive(sparse, AlphaDistance::nominal);
  REQUIRE(impl.has_value());
  CHECK(*impl == doctest::Approx(*oracle).epsilon(1e-12));
  std::vector<L> unpaired = {{1, std::nullopt}, {std::nullopt, 0}};
  CHECK_THROWS_AS(krippendorff_alpha(unpaired, AlphaDistance::nominal), Error);
}

TEST_CASE("observed agreement: all equal, the 146-item audit ratio, none equal") {
  using L = std::vector<std::optional<int>>;
  L a(146), b(146);
  for (int i = 0; i < 146; ++i) {
    a[i] = 0;
    b[i] = i < 142 ? 0 : 1;  // 142 of 146 equal
  }
  CHECK(observed_agreement(a, a) == doctest::Approx(1.0));
  CHECK(observed_agreement(a, b) == doctest::Approx(0.9726).epsilon(1e-4));
  L c(4, 0), d(4, 1);
  CHECK(observed_agreement(c, d) == doctest::Approx(0.0));
}

TEST_CASE("matrix cells equal a brute-force recompute and the serial twin") {
  KeyedRng rng(111);
  VariantId variant{"fx", "en", "text", std::nullopt};
  std::vector<Item> suite;
  std::vector<CoreDecision> core;
  std::vector<ScoreRecord> records;
  for (int i = 0; i < 60; ++i) {
    Item it = testsup::random_valid_item(rng, i, 60);
    suite.push_back(it);
    CoreDecision cd;
    cd.item_id = it.id;
    cd.in_core = rng.pick("core:" + it.id, 5) != 0;
    core.push_back(cd);
    for (int a = 0; a < 5; ++a) {
      ScoreRecord r;
      r.answerer = "ans-" + std::to_string(a);
      r.item_id = it.id;
      r.method = ScoreMethod::exact;
      if (rng.pick("miss:" + it.id + std::to_string(a), 7) != 0) {
        r.hard = rng.pick("h:" + it.id + std::to_string(a), 2) == 0 ? 0 : 1;
        r.final = static_cast<double>(*r.hard);
      }
      records.push_back(r);
    }
  }
  ResponseMatrix fast = build_matrix(variant, suite, core, records);
  ResponseMatrix slow = ref::build_matrix_serial(variant, suite, core, records);
  REQUIRE(fast.answerers == slow.answerers);
  REQUIRE(fast.designers == slow.designers);
  for (size_t a = 0; a < fast.answerers.size(); ++a) {
    for (size_t d = 0; d < fast.designers.size(); ++d) {
      CHECK(fast.cell_support[a][d] == slow.cell_support[a][d]);
      CHECK(fast.cell_mean[a][d] == doctest::Approx(slow.cell_mean[a][d]).epsilon(1e-12));
    }
  }
  // serialization round-trip preserves the matrix bytes
  std::string bytes = fast.to_json().dump();
  ResponseMatrix back = ResponseMatrix::from_json(json::parse(bytes));
  CHECK(back.to_json().dump() == bytes);
}

TEST_CASE("bootstrap CI is deterministic and matches the serial reference") {
  KeyedRng rng(222);
  VariantId variant{"fx", "en", "text", std::nullopt};
  std::vector<Item> suite;
  std::vector<CoreDecision> core;
  std::vector<ScoreRecord> records;
  for (int i = 0; i < 40; ++i) {
    Item it = testsup::random_valid_item(rng, i, 40);
    it.designer_model = "designer-0";
    suite.push_back(it);
    core.push_back({it.id, true, {}, std::nullopt, {}});
    for (int a = 0; a < 6; ++a) {
      ScoreRecord r;
      r.answerer = "ans-" + std::to_string(a);
      r.item_id = it.id;
      r.hard = rng.uniform("h:" + it.id + std::to_string(a)) < 0.3 + 0.1 * a ? 1 : 0;
      r.final = static_cast<double>(*r.hard);
      records.push_back(r);
    }
  }
  ResponseMatrix m = build_matrix(variant, suite, core, records);
  auto reference = consensus_reference({m}, std::nullopt);
  TauResult a = kendall_tau_preservation(m, "designer-0", reference, 500, 33);
  TauResult b = kendall_tau_preservation(m, "designer-0", reference, 500, 33);
  CHECK(a.tau == b.tau);
  CHECK(a.ci_lo == b.ci_lo);
  CHECK(a.ci_hi == b.ci_hi);
  CHECK(a.ci_lo <= a.tau);
  CHECK(a.ci_hi >= a.tau);
  TauResult serial = ref::tau_preservation_serial(m, "designer-0", reference, 500, 33);
  CHECK(a.tau == doctest::Approx(serial.tau).epsilon(1e-12));
  CHECK(a.ci_lo == doctest::Approx(serial.ci_lo).epsilon(1e-12));
  CHECK(a.ci_hi == doctest::Approx(serial.ci_hi).epsilon(1e-12));
}

TEST_CASE("planted adversarial shift yields a positive strong-panel drop near the MC prediction") {
  // simulated panel: one designer, plenty of items, +1 logit on adversarial
  SimPanelSpec spec;
  spec.seed = 31337;
  for (int a = 0; a < 6; ++a)
    spec.abilities["ans-" + std::to_string(a)] = 1.5 - 0.5 * a;
  spec.adversarial_difficulty_shift = 1.0;
  SimBackend sim(spec);

  KeyedRng rng(808);
  VariantId variant{"adv", "en", "text", std::nullopt};
  std::vector<Item> suite;
  std::vector<CoreDecision> core;
  std::vector<ScoreRecord> records;
  JudgeFn no_judge = [](const RequestPair&, const ojson&) -> std::string {
    throw Error(Errc::judge_protocol, "mcq suites must not judge");
  };
  for (int i = 0; i < 4000 && suite.size() < 1200; ++i) {
    Item it = testsup::random_valid_item(rng, i, 4000);
    if (it.question_type != "mcq_single") continue;
    it.designer_model = "designer-0";
    suite.push_back(it);
    core.push_back({it.id, true, {}, std::nullopt, {}});
    for (int a = 0; a < 6; ++a) {
      ModelId m{"ans-" + std::to_string(a), "fam"};
      records.push_back(route_and_score(it, m, sim.simulate_response(m, it), no_judge));
    }
  }
  ResponseMatrix matrix = build_matrix(variant, suite, core, records);
  auto drops = adversarial_effect(matrix, 3);
  REQUIRE(drops.count("designer-0"));
  REQUIRE(drops.at("designer-0").has_value());
  double drop = *drops.at("designer-0");

  // Monte-Carlo prediction from the planted response model over the strong panel
  auto panel = strong_panel(matrix, 3);
  double p_std = 0, p_adv = 0;
  int n_std = 0, n_adv = 0;
  for (const auto& it : suite) {
    for (const auto& name : panel) {
      ModelId m{name, "fam"};
      double p = sim.correct_probability(m, it);
      if (it.design_type == "adversarial") {
        p_adv += p;
        ++n_adv;
      } else {
        p_std += p;
        ++n_std;
      }
    }
  }
  double predicted = p_std / n_std - p_adv / n_adv;
  MESSAGE("drop = ", drop, ", MC prediction = ", predicted);
  CHECK(drop > 0.0);
  // binomial-style CI band around the prediction
  double band = 3.0 * std::sqrt(0.25 / n_adv + 0.25 / n_std);
  CHECK(std::fabs(drop - predicted) <= band);
}

TEST_CASE("consensus pools cells across multiple variant matrices") {
  auto m1 = matrix_from_cells({"a1", "a2", "a3"}, {"d1", "d2"},
                              {{0.9, 0.7}, {0.5, 0.6}, {0.2, 0.3}});
  auto m2 = matrix_from_cells({"a1", "a2", "a3"}, {"d1", "d2"},
                              {{0.1, 0.2}, {0.8, 0.9}, {0.4, 0.3}});
  // oracle: per answerer, mean over the four non-held cells of both matrices
  auto got = consensus_reference({m1, m2}, std::string("d2"));
  // held out d2: a1 -> (0.9+0.1)/2 = 0.5, a2 -> (0.5+0.8)/2 = 0.65, a3 -> 0.3
  CHECK(got == std::vector<std::string>{"a2", "a1", "a3"});
  auto all = consensus_reference({m1, m2}, std::nullopt);
  // a1 -> 0.475, a2 -> 0.7, a3 -> 0.3
  CHECK(all == std::vector<std::string>{"a2", "a1", "a3"});
}
