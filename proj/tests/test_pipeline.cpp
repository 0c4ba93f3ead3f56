#include <doctest.h>

#include <filesystem>

#include "bench/error.hpp"
#include "bench/domain_card.hpp"
#include "bench/pipeline.hpp"
#include "bench/util.hpp"
#include "test_support.hpp"

using namespace bench;

namespace {

std::filesystem::path temp_dir(const std::string& tag) {
  auto p = std::filesystem::temp_directory_path() / ("bench_pipe_" + tag);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

// Small seed file so the extract stage has real input.
std::filesystem::path write_seed(const std::filesystem::path& dir) {
  KeyedRng rng(1);
  std::vector<Item> seeds;
  for (int i = 0; i < 24; ++i) {
    Item it = testsup::random_valid_item(rng, i, 24, "seed");
    it.source_dataset = "demo";
    seeds.push_back(it);
  }
  auto path = dir / "seed.jsonl";
  write_file(path, write_items_jsonl(seeds));
  return path;
}

RunConfig small_config(const std::filesystem::path& seed_path, std::uint64_t seed = 5) {
  RunConfig c;
  c.run_name = "pipe-test";
  c.seed = seed;
  c.backend = "sim";
  BackendProfile prof;
  prof.provider = "sim";
  prof.max_in_flight = 8;
  c.providers = {{"sim", prof}};

  VariantConfig v;
  v.id = {"demo", "en", "text", std::nullopt};
  v.seed_path = seed_path.string();
  v.total = 40;
  v.id_prefix = "demo";
  c.variants = {v};

  c.designers = {{"sim-designer-a", "fam_a", "sim"}, {"sim-designer-b", "fam_b", "sim"}};
  c.answerers = {{"sim-ans-0", "fam_a", "sim"},
                 {"sim-ans-1", "fam_b", "sim"},
                 {"sim-ans-2", "fam_c", "sim"},
                 {"sim-ans-3", "fam_d", "sim"}};
  c.judge = {"sim-judge", "fam_j", "sim"};
  c.batch_cap = 20;
  c.workers = 3;
  c.sim.seed = seed;
  c.sim.abilities = {{"sim-ans-0", 1.2}, {"sim-ans-1", 0.6}, {"sim-ans-2", 0.0},
                     {"sim-ans-3", -0.6}};
  for (const auto& m : c.designers) c.sim.families[m.name] = m.family;
  for (const auto& m : c.answerers) c.sim.families[m.name] = m.family;
  c.sim.families[c.judge.name] = c.judge.family;
  c.analytics.bootstrap_b = 200;
  c.analytics.dynamic_pass = "all";
  return c;
}

void run_all(Pipeline& pipe) {
  pipe.stage_extract_cards();
  pipe.stage_generate();
  pipe.stage_answer();
  pipe.stage_score();
  pipe.stage_gate();
  pipe.stage_analyze();
  pipe.stage_report();
}

}  // namespace

TEST_CASE("config round-trips through JSON") {
  auto dir = temp_dir("cfg");
  RunConfig c = small_config(write_seed(dir));
  RunConfig back = RunConfig::from_json(json::parse(c.to_json().dump()));
  CHECK(back.to_json().dump() == c.to_json().dump());
  CHECK(back.digest() == c.digest());
}

TEST_CASE("full simulated pipeline produces every stage artifact") {
  auto dir = temp_dir("full");
  RunConfig config = small_config(write_seed(dir));
  Pipeline pipe(config, dir / "run");
  run_all(pipe);

  const VariantConfig& v = config.variants[0];
  CHECK(std::filesystem::exists(pipe.card_path(v)));
  for (const auto& g : config.designers) {
    CHECK(std::filesystem::exists(pipe.suite_path(v, g)));
    CHECK(std::filesystem::exists(pipe.quota_path(v, g)));
    CHECK(std::filesystem::exists(pipe.responses_path(v, g)));
    CHECK(std::filesystem::exists(pipe.scores_path(v, g)));
    CHECK(std::filesystem::exists(pipe.core_path(v, g)));

    // quota satisfied with the fault-free designer, so realized == targets
    json quota = json::parse(read_file(pipe.quota_path(v, g)));
    CHECK(quota.at("satisfied").get<bool>());
    CHECK(quota.at("total_items").get<int>() == 40);
    for (const char* axis : {"intent", "difficulty", "format", "coverage"}) {
      for (auto it = quota["final_deficit"][axis]["deficit"].begin();
           it != quota["final_deficit"][axis]["deficit"].end(); ++it)
        CHECK(it.value().get<int>() == 0);
      for (auto it = quota["final_deficit"][axis]["surplus"].begin();
           it != quota["final_deficit"][axis]["surplus"].end(); ++it)
        CHECK(it.value().get<int>() == 0);  // exact: no over-delivery either
    }

    auto suite = read_items_jsonl(read_file(pipe.suite_path(v, g)));
    CHECK(suite.size() == 40);
    CHECK(verify_id_sequence(suite, v.id_prefix + "_" + g.family).empty());
  }

  CHECK(std::filesystem::exists(pipe.matrix_path(v)));
  json metrics = json::parse(read_file(pipe.metrics_path()));
  CHECK(metrics.contains("leaderboard"));
  CHECK(metrics["leaderboard"].size() == 2);
  const json& section = metrics["per_variant"][v.id.key()];
  // perfect designer: zero alignment divergence on every axis
  for (const auto& g : config.designers) {
    const json& align = section["alignment"][g.name];
    CHECK(align["format"]["l1"].get<double>() == doctest::Approx(0.0));
    CHECK(align["domain"]["l1"].get<double>() == doctest::Approx(0.0));
  }
  double judged = section["judged_core_response_fraction"].get<double>();
  CHECK(judged > 0.0);   // prose open items exist in the mix
  CHECK(judged < 0.5);

  CHECK(std::filesystem::exists(dir / "run" / "report" / "leaderboard.csv"));
  CHECK(std::filesystem::exists(dir / "run" / "report" / "tradeoff.svg"));
  CHECK(std::filesystem::exists(dir / "run" / "report" /
                                ("heatmap_" + v.id.key() + ".svg")));
}

TEST_CASE("rerunning a completed pipeline is a byte-level no-op") {
  auto dir = temp_dir("idem");
  RunConfig config = small_config(write_seed(dir));
  {
    Pipeline pipe(config, dir / "run");
    run_all(pipe);
  }
  const VariantConfig& v = config.variants[0];
  Pipeline probe(config, dir / "run");
  std::string matrix_before = read_file(probe.matrix_path(v));
  std::string metrics_before = read_file(probe.metrics_path());
  std::string scores_before = read_file(probe.scores_path(v, config.designers[0]));
  {
    Pipeline pipe(config, dir / "run");
    run_all(pipe);  // every stage sees its done marker and returns
  }
  CHECK(read_file(probe.matrix_path(v)) == matrix_before);
  CHECK(read_file(probe.metrics_path()) == metrics_before);
  CHECK(read_file(probe.scores_path(v, config.designers[0])) == scores_before);
}

TEST_CASE("two independent runs with the same seed are byte-identical") {
  auto dir = temp_dir("repro");
  auto seed_file = write_seed(dir);
  RunConfig config = small_config(seed_file);
  Pipeline a(config, dir / "run_a");
  run_all(a);
  Pipeline b(config, dir / "run_b");
  run_all(b);
  const VariantConfig& v = config.variants[0];
  CHECK(read_file(a.matrix_path(v)) == read_file(b.matrix_path(v)));
  CHECK(read_file(a.metrics_path()) == read_file(b.metrics_path()));
  for (const auto& g : config.designers) {
    CHECK(read_file(a.suite_path(v, g)) == read_file(b.suite_path(v, g)));
    CHECK(read_file(a.scores_path(v, g)) == read_file(b.scores_path(v, g)));
    CHECK(read_file(a.core_path(v, g)) == read_file(b.core_path(v, g)));
  }
}

TEST_CASE("faulty designers leave a non-core trail and still converge") {
  auto dir = temp_dir("faulty");
  RunConfig config = small_config(write_seed(dir), 11);
  config.sim_designer.schema_break_fraction = 0.1;
  config.sim_designer.dynamic_bad_fraction = 0.08;
  Pipeline pipe(config, dir / "run");
  run_all(pipe);

  json metrics = json::parse(read_file(pipe.metrics_path()));
  const json& section = metrics["per_variant"][config.variants[0].id.key()];
  double pooled = section["noncore_rate_pooled"].get<double>();
  CHECK(pooled > 0.02);
  CHECK(pooled < 0.5);
  // leaderboard broken% agrees with the pooled rate shape
  for (const auto& row : metrics["leaderboard"]) {
    CHECK(row["broken_pct"].get<double>() >= 0.0);
    CHECK(row["core_count"].get<std::int64_t>() > 0);
  }
}

TEST_CASE("missing responses fail the score stage with a stale-log error") {
  auto dir = temp_dir("stale");
  RunConfig config = small_config(write_seed(dir));
  Pipeline pipe(config, dir / "run");
  pipe.stage_extract_cards();
  pipe.stage_generate();
  // skip the answer stage entirely
  CHECK_THROWS_AS(pipe.stage_score(), Error);
}

TEST_CASE("audit labels feed the agreement metrics and report") {
  auto dir = temp_dir("audit");
  // two raters over 146 items: binary fatal-flaw plus an ordinal dimension
  ojson audit;
  ojson fatal, solv;
  fatal["scale"] = "nominal";
  solv["scale"] = "ordinal";
  ojson r1 = ojson::array(), r2 = ojson::array(), s1 = ojson::array(), s2 = ojson::array();
  KeyedRng rng(3);
  for (int i = 0; i < 146; ++i) {
    int flaw = rng.pick("f" + std::to_string(i), 12) == 0 ? 1 : 0;
    r1.push_back(flaw);
    r2.push_back(i < 142 ? flaw : 1 - flaw);  // 4 disagreements
    s1.push_back(static_cast<int>(rng.pick("s" + std::to_string(i), 5)));
    s2.push_back(static_cast<int>(rng.pick("t" + std::to_string(i), 5)));
  }
  fatal["labels"] = ojson::array({r1, r2});
  solv["labels"] = ojson::array({s1, s2});
  audit["dimensions"] = ojson{{"fatal_flaw", fatal}, {"solvability", solv}};
  write_file(dir / "audit.json", audit.dump());

  RunConfig config = small_config(write_seed(dir));
  config.analytics.audit_labels_path = (dir / "audit.json").string();
  Pipeline pipe(config, dir / "run");
  run_all(pipe);

  json metrics = json::parse(read_file(pipe.metrics_path()));
  REQUIRE(metrics.contains("agreement"));
  const json& fatal_out = metrics["agreement"]["fatal_flaw"];
  CHECK(fatal_out["observed_agreement"].get<double>() ==
        doctest::Approx(142.0 / 146.0).epsilon(1e-9));
  CHECK(!fatal_out["alpha"].is_null());
  CHECK(fatal_out["alpha"].get<double>() <= 1.0);
  CHECK(metrics["agreement"]["solvability"]["scale"] == "ordinal");
  CHECK(std::filesystem::exists(dir / "run" / "report" / "agreement.csv"));
}

#ifdef BENCH_CLI_DEFAULT
TEST_CASE("CLI extract-card exits 0 on success and 2 on an empty seed") {
  std::filesystem::path cli = BENCH_CLI_DEFAULT;
  REQUIRE(std::filesystem::exists(cli));
  auto dir = temp_dir("cli");
  auto seed = write_seed(dir);
  std::string ok_cmd = "\"" + cli.string() + "\" extract-card --seed \"" + seed.string() +
                       "\" --out \"" + (dir / "card.yaml").string() + "\" > /dev/null 2>&1";
  CHECK(std::system(ok_cmd.c_str()) == 0);
  CHECK(std::filesystem::exists(dir / "card.yaml"));
  // the written card parses back
  CHECK_NOTHROW(parse_card(read_file(dir / "card.yaml")));

  write_file(dir / "empty.jsonl", "");
  std::string bad_cmd = "\"" + cli.string() + "\" extract-card --seed \"" +
                        (dir / "empty.jsonl").string() + "\" --out \"" +
                        (dir / "card2.yaml").string() + "\" > /dev/null 2>&1";
  int rc = std::system(bad_cmd.c_str());
  CHECK(WEXITSTATUS(rc) == 2);
}
#endif

TEST_CASE("a run replays from transcripts alone: zero fresh calls, identical artifacts") {
  auto dir = temp_dir("replay");
  RunConfig config = small_config(write_seed(dir));
  Pipeline baseline(config, dir / "run_a");
  run_all(baseline);
  size_t transcript_lines = read_lines(dir / "run_a" / "transcripts" / "gateway.jsonl").size();
  CHECK(transcript_lines > 0);

  // fresh run dir seeded only with the transcript; every call must hit the cache
  std::filesystem::create_directories(dir / "run_b" / "transcripts");
  std::filesystem::copy_file(dir / "run_a" / "transcripts" / "gateway.jsonl",
                             dir / "run_b" / "transcripts" / "gateway.jsonl");
  Pipeline replay(config, dir / "run_b");
  run_all(replay);

  CHECK(read_lines(dir / "run_b" / "transcripts" / "gateway.jsonl").size() ==
        transcript_lines);  // append-only log did not grow: no live calls
  const VariantConfig& v = config.variants[0];
  CHECK(read_file(baseline.matrix_path(v)) == read_file(replay.matrix_path(v)));
  CHECK(read_file(baseline.metrics_path()) == read_file(replay.metrics_path()));
  for (const auto& g : config.designers)
    CHECK(read_file(baseline.scores_path(v, g)) == read_file(replay.scores_path(v, g)));
}

TEST_CASE("seed-mode tau reference uses the configured ranking") {
  auto dir = temp_dir("seedrank");
  RunConfig config = small_config(write_seed(dir));
  config.analytics.tau_reference = "seed";
  // reverse of the planted ability order: taus should come out negative
  config.analytics.seed_ranking = {"sim-ans-3", "sim-ans-2", "sim-ans-1", "sim-ans-0"};
  Pipeline pipe(config, dir / "run");
  run_all(pipe);
  json metrics = json::parse(read_file(pipe.metrics_path()));
  const json& taus = metrics["per_variant"][config.variants[0].id.key()]["kendall_tau"];
  for (auto it = taus.begin(); it != taus.end(); ++it) {
    REQUIRE(!it.value().is_null());
    CHECK(it.value()["tau"].get<double>() < 0.0);
  }
}

TEST_CASE("heatmap renders one cell per (answerer family, designer family)") {
  auto dir = temp_dir("heat");
  RunConfig config = small_config(write_seed(dir));
  Pipeline pipe(config, dir / "run");
  run_all(pipe);
  std::string svg = read_file(dir / "run" / "report" /
                              ("heatmap_" + config.variants[0].id.key() + ".svg"));
  size_t rects = 0, pos = 0;
  while ((pos = svg.find("<rect", pos)) != std::string::npos) {
    ++rects;
    pos += 5;
  }
  // 4 answerer families x 2 designer families in the small config
  CHECK(rects == 8);
}

TEST_CASE("visual-primed multimodal variants carry visual metadata end to end") {
  auto dir = temp_dir("visual");
  RunConfig config = small_config(write_seed(dir));
  config.variants[0].id = {"demo", "en", "multimodal", "visualprimed"};
  Pipeline pipe(config, dir / "run");
  run_all(pipe);

  const VariantConfig& v = config.variants[0];
  int visual_items = 0;
  for (const auto& g : config.designers) {
    auto suite = read_items_jsonl(read_file(pipe.suite_path(v, g)));
    for (const auto& it : suite) {
      CHECK(it.modality == "multimodal");
      if (it.uses_visual) {
        ++visual_items;
        CHECK(it.visual_instruction.has_value());
      }
    }
  }
  CHECK(visual_items > 0);
  // a text-only condition of the same seed produces zero visual items
  RunConfig textonly = small_config(write_seed(dir));
  textonly.variants[0].id = {"demo", "en", "multimodal", "textonly"};
  Pipeline pipe2(textonly, dir / "run_text");
  pipe2.stage_extract_cards();
  pipe2.stage_generate();
  for (const auto& g : textonly.designers) {
    auto suite = read_items_jsonl(read_file(pipe2.suite_path(textonly.variants[0], g)));
    for (const auto& it : suite) CHECK(!it.uses_visual);
  }
}

TEST_CASE("disagreement predicate judges only split items") {
  auto dir = temp_dir("disagree");
  RunConfig config = small_config(write_seed(dir));
  config.analytics.dynamic_pass = "disagreement";
  Pipeline pipe(config, dir / "run");
  run_all(pipe);
  // unanimous items keep a null dynamic decision in the manifest
  const VariantConfig& v = config.variants[0];
  json manifest = json::parse(read_file(pipe.core_path(v, config.designers[0])));
  int with_decision = 0, without = 0;
  for (const auto& d : manifest["decisions"]) {
    if (d["dynamic_decision"].is_null()) ++without;
    else ++with_decision;
  }
  CHECK(with_decision > 0);
  CHECK(without > 0);
}
