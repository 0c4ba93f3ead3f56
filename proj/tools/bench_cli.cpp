// Pipeline driver: extract-card, generate, answer, judge, gate, analyze,
// report. Stages are idempotent; rerunning a finished stage is a no-op, and
// an interrupted stage resumes from its append-only logs.

#include <CLI11.hpp>

#include <cstdio>
#include <functional>
#include <memory>

#include "bench/domain_card.hpp"
#include "bench/error.hpp"
#include "bench/pipeline.hpp"
#include "bench/util.hpp"

namespace {

using namespace bench;

int direct_extract_card(const std::string& seed, const std::string& out,
                        const std::string& labeler_kind, const std::string& terms_path) {
  try {
    auto items = read_items_jsonl(read_file(seed));
    TopicLabeler labeler;
    if (labeler_kind == "keyword") {
      std::map<std::string, std::string> table;
      if (!terms_path.empty()) {
        json terms = json::parse(read_file(terms_path));
        for (auto it = terms.begin(); it != terms.end(); ++it)
          table[it.key()] = it.value().get<std::string>();
      }
      labeler = keyword_labeler(table);
    } else {
      labeler = field_labeler();
    }
    DomainCard card = canonicalize_card(build_card(items, labeler));
    write_file(out, serialize_card(card));
    std::printf("card written: %s\n", out.c_str());
    return 0;
  } catch (const Error& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return (e.code() == Errc::empty_seed || e.code() == Errc::card_format ||
            e.code() == Errc::item_parse)
               ? 2
               : 1;
  }
}

// Every stage command settles its prerequisites first; finished stages
// no-op, so this is cheap and keeps resumes single-command.
int run_to(const std::string& config_path, const std::string& run_dir,
           const std::string& stage) {
  RunConfig config = load_config(config_path);
  Pipeline pipe(config, run_dir);
  write_file(std::filesystem::path(run_dir) / "config.json",
             config.to_json().dump(2) + "\n");

  std::vector<std::pair<std::string, std::function<void()>>> chain = {
      {"extract-card", [&] { pipe.stage_extract_cards(); }},
      {"generate", [&] { pipe.stage_generate(); }},
      {"answer", [&] { pipe.stage_answer(); }},
      {"judge", [&] { pipe.stage_score(); }},
      {"gate", [&] { pipe.stage_gate(); }},
      {"analyze", [&] { pipe.stage_analyze(); }},
      {"report", [&] { pipe.stage_report(); }},
  };
  for (const auto& [name, body] : chain) {
    int rc = run_stage_with_manifest(pipe, name, body);
    if (rc != 0) return rc;
    std::printf("stage %s: done\n", name.c_str());
    if (name == stage) break;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"benchmark-designer evaluation pipeline"};
  app.require_subcommand(1);

  std::string config_path, run_dir;
  std::string seed_path, out_path, labeler = "field", terms_path;

  auto add_stage = [&](const std::string& name, const std::string& desc) {
    CLI::App* cmd = app.add_subcommand(name, desc);
    cmd->add_option("--config", config_path, "run configuration (JSON)")->required();
    cmd->add_option("--run", run_dir, "run directory")->required();
    return cmd;
  };

  CLI::App* extract = app.add_subcommand("extract-card", "build a domain card");
  extract->add_option("--seed", seed_path, "seed items (JSONL)");
  extract->add_option("--out", out_path, "output card path (YAML)");
  extract->add_option("--labeler", labeler, "topic oracle: field | keyword");
  extract->add_option("--terms", terms_path, "term->label map (JSON) for keyword labeler");
  extract->add_option("--config", config_path, "run configuration (JSON)");
  extract->add_option("--run", run_dir, "run directory");

  add_stage("generate", "quota-controlled suite generation with top-ups");
  add_stage("answer", "collect panel responses");
  add_stage("judge", "score responses through the objective-first hierarchy");
  add_stage("gate", "static/dynamic quality gating into the core set");
  add_stage("analyze", "matrices and the metric suite");
  add_stage("report", "CSV tables and SVG figures");
  add_stage("pipeline", "run every stage in order");

  CLI11_PARSE(app, argc, argv);

  std::string sub = app.get_subcommands().front()->get_name();
  if (sub == "extract-card") {
    if (!seed_path.empty() && !out_path.empty())
      return direct_extract_card(seed_path, out_path, labeler, terms_path);
    if (!config_path.empty() && !run_dir.empty()) return run_to(config_path, run_dir, sub);
    std::fprintf(stderr, "extract-card needs --seed/--out or --config/--run\n");
    return 1;
  }
  if (sub == "pipeline") return run_to(config_path, run_dir, "report");
  return run_to(config_path, run_dir, sub);
}
