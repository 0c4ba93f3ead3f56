#include "bench/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>

#include "bench/error.hpp"
#include "bench/templates.hpp"
#include "bench/util.hpp"
#include "bench/validate.hpp"

namespace bench {

namespace {

std::map<std::string, double> json_to_dmap(const json& j) {
  std::map<std::string, double> out;
  for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = it.value().get<double>();
  return out;
}

std::map<std::string, std::string> json_to_smap(const json& j) {
  std::map<std::string, std::string> out;
  for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = it.value().get<std::string>();
  return out;
}

PanelModel panel_from_json(const json& j) {
  PanelModel m;
  m.name = j.at("name").get<std::string>();
  m.family = j.value("family", "");
  if (m.family.empty()) m.family = resolve_model(m.name).family;
  m.provider = j.value("provider", "default");
  return m;
}

ojson panel_to_json(const PanelModel& m) {
  ojson j;
  j["name"] = m.name;
  j["family"] = m.family;
  j["provider"] = m.provider;
  return j;
}

}  // namespace

RunConfig RunConfig::from_json(const json& j) {
  RunConfig c;
  c.run_name = j.value("run_name", "run");
  c.seed = j.value("seed", 1ull);
  c.backend = j.value("backend", "sim");
  if (j.contains("providers")) {
    for (auto it = j["providers"].begin(); it != j["providers"].end(); ++it) {
      BackendProfile p;
      p.provider = it.key();
      const json& v = it.value();
      p.base_url = v.value("base_url", "");
      p.api_key_env = v.value("api_key_env", "");
      p.max_in_flight = v.value("max_in_flight", 4);
      p.max_retries = v.value("max_retries", 3);
      p.backoff_base = std::chrono::milliseconds(v.value("backoff_base_ms", 250));
      p.backoff_ceiling = std::chrono::milliseconds(v.value("backoff_ceiling_ms", 8000));
      if (v.contains("temperature") || v.contains("max_tokens")) {
        DecodeParams d;
        d.temperature = v.value("temperature", 0.0);
        d.max_tokens = v.value("max_tokens", 4096);
        p.decode_override = d;
      }
      c.providers[it.key()] = p;
    }
  }
  if (c.providers.empty()) {
    BackendProfile fallback;
    fallback.provider = "default";
    c.providers["default"] = fallback;
  }

  for (const auto& v : j.value("variants", json::array())) {
    VariantConfig vc;
    vc.id = variant_from_json(v);
    vc.card_path = v.value("card", "");
    vc.seed_path = v.value("seed_items", "");
    vc.total = v.value("total", 60);
    vc.id_prefix = v.value("id_prefix", vc.id.dataset);
    c.variants.push_back(vc);
  }
  for (const auto& d : j.value("designers", json::array()))
    c.designers.push_back(panel_from_json(d));
  for (const auto& a : j.value("answerers", json::array()))
    c.answerers.push_back(panel_from_json(a));
  if (j.contains("judge")) c.judge = panel_from_json(j["judge"]);

  if (j.contains("quota")) {
    const json& q = j["quota"];
    if (q.contains("intent_fractions")) c.quota.intent_fractions = json_to_dmap(q["intent_fractions"]);
    if (q.contains("difficulty_fractions"))
      c.quota.difficulty_fractions = json_to_dmap(q["difficulty_fractions"]);
    if (q.contains("format_fractions")) c.quota.format_fractions = json_to_dmap(q["format_fractions"]);
  }
  c.batch_cap = j.value("batch_cap", 30);
  c.workers = j.value("workers", 4);

  if (j.contains("sim")) {
    const json& s = j["sim"];
    c.sim.seed = s.value("seed", c.seed);
    if (s.contains("abilities")) c.sim.abilities = json_to_dmap(s["abilities"]);
    if (s.contains("families")) c.sim.families = json_to_smap(s["families"]);
    c.sim.default_discrimination = s.value("default_discrimination", 1.0);
    if (s.contains("difficulty_by_tier"))
      c.sim.difficulty_by_tier = json_to_dmap(s["difficulty_by_tier"]);
    c.sim.difficulty_jitter = s.value("difficulty_jitter", 0.25);
    c.sim.adversarial_difficulty_shift = s.value("adversarial_difficulty_shift", 0.0);
    if (s.contains("family_affinity")) c.sim.family_affinity = json_to_dmap(s["family_affinity"]);
    if (s.contains("designer_faults")) {
      const json& f = s["designer_faults"];
      c.sim_designer.drop_fraction = f.value("drop_fraction", 0.0);
      c.sim_designer.difficulty_mislabel_fraction = f.value("difficulty_mislabel_fraction", 0.0);
      c.sim_designer.schema_break_fraction = f.value("schema_break_fraction", 0.0);
      c.sim_designer.dynamic_bad_fraction = f.value("dynamic_bad_fraction", 0.0);
      c.sim_designer.numeric_open_fraction = f.value("numeric_open_fraction", 0.2);
      c.sim_designer.mcq_boilerplate_fraction = f.value("mcq_boilerplate_fraction", 0.1);
    }
  } else {
    c.sim.seed = c.seed;
  }

  if (j.contains("analytics")) {
    const json& a = j["analytics"];
    c.analytics.bootstrap_b = a.value("bootstrap_b", 1000);
    c.analytics.strong_panel_k = a.value("strong_panel_k", 3);
    c.analytics.tau_reference = a.value("tau_reference", "matrix");
    if (a.contains("seed_ranking"))
      c.analytics.seed_ranking = a["seed_ranking"].get<std::vector<std::string>>();
    c.analytics.dynamic_pass = a.value("dynamic_pass", "all");
    c.analytics.audit_labels_path = a.value("audit_labels", "");
  }

  // families of configured models are visible to the sim backend
  for (const auto& m : c.designers) c.sim.families[m.name] = m.family;
  for (const auto& m : c.answerers) c.sim.families[m.name] = m.family;
  if (!c.judge.name.empty()) c.sim.families[c.judge.name] = c.judge.family;
  return c;
}

ojson RunConfig::to_json() const {
  ojson j;
  j["run_name"] = run_name;
  j["seed"] = seed;
  j["backend"] = backend;
  ojson prov = ojson::object();
  for (const auto& [name, p] : providers) {
    ojson pj;
    pj["base_url"] = p.base_url;
    pj["api_key_env"] = p.api_key_env;
    pj["max_in_flight"] = p.max_in_flight;
    pj["max_retries"] = p.max_retries;
    pj["backoff_base_ms"] = p.backoff_base.count();
    pj["backoff_ceiling_ms"] = p.backoff_ceiling.count();
    if (p.decode_override) {
      pj["temperature"] = p.decode_override->temperature;
      pj["max_tokens"] = p.decode_override->max_tokens;
    }
    prov[name] = pj;
  }
  j["providers"] = prov;
  ojson vars = ojson::array();
  for (const auto& v : variants) {
    ojson vj = variant_to_json(v.id);
    vj["card"] = v.card_path;
    vj["seed_items"] = v.seed_path;
    vj["total"] = v.total;
    vj["id_prefix"] = v.id_prefix;
    vars.push_back(vj);
  }
  j["variants"] = vars;
  ojson designers = ojson::array(), answerers = ojson::array();
  for (const auto& d : this->designers) designers.push_back(panel_to_json(d));
  for (const auto& a : this->answerers) answerers.push_back(panel_to_json(a));
  j["designers"] = designers;
  j["answerers"] = answerers;
  j["judge"] = panel_to_json(judge);
  ojson q;
  auto dmap = [](const std::map<std::string, double>& m) {
    ojson out = ojson::object();
    for (const auto& [k, v] : m) out[k] = v;
    return out;
  };
  q["intent_fractions"] = dmap(quota.intent_fractions);
  q["difficulty_fractions"] = dmap(quota.difficulty_fractions);
  q["format_fractions"] = dmap(quota.format_fractions);
  j["quota"] = q;
  j["batch_cap"] = batch_cap;
  j["workers"] = workers;
  ojson s;
  s["seed"] = sim.seed;
  s["abilities"] = dmap(sim.abilities);
  ojson fams = ojson::object();
  for (const auto& [k, v] : sim.families) fams[k] = v;
  s["families"] = fams;
  s["default_discrimination"] = sim.default_discrimination;
  s["difficulty_by_tier"] = dmap(sim.difficulty_by_tier);
  s["difficulty_jitter"] = sim.difficulty_jitter;
  s["adversarial_difficulty_shift"] = sim.adversarial_difficulty_shift;
  s["family_affinity"] = dmap(sim.family_affinity);
  ojson faults;
  faults["drop_fraction"] = sim_designer.drop_fraction;
  faults["difficulty_mislabel_fraction"] = sim_designer.difficulty_mislabel_fraction;
  faults["schema_break_fraction"] = sim_designer.schema_break_fraction;
  faults["dynamic_bad_fraction"] = sim_designer.dynamic_bad_fraction;
  faults["numeric_open_fraction"] = sim_designer.numeric_open_fraction;
  faults["mcq_boilerplate_fraction"] = sim_designer.mcq_boilerplate_fraction;
  s["designer_faults"] = faults;
  j["sim"] = s;
  ojson a;
  a["bootstrap_b"] = analytics.bootstrap_b;
  a["strong_panel_k"] = analytics.strong_panel_k;
  a["tau_reference"] = analytics.tau_reference;
  a["seed_ranking"] = analytics.seed_ranking;
  a["dynamic_pass"] = analytics.dynamic_pass;
  a["audit_labels"] = analytics.audit_labels_path;
  j["analytics"] = a;
  return j;
}

std::string RunConfig::digest() const { return sha256_hex(to_json().dump()); }

RunConfig load_config(const std::filesystem::path& path) {
  json j = json::parse(read_file(path), nullptr, false);
  if (j.is_discarded())
    throw Error(Errc::config_error, "config is not valid JSON: " + path.string());
  return RunConfig::from_json(j);
}

// --- pipeline ------------------------------------------------------------------

Pipeline::Pipeline(RunConfig config, std::filesystem::path run_dir)
    : config_(std::move(config)), run_dir_(std::move(run_dir)) {
  std::filesystem::create_directories(run_dir_);
  transcript_ = std::make_shared<TranscriptLog>(run_dir_ / "transcripts" / "gateway.jsonl");

  std::map<std::string, std::shared_ptr<Backend>> backends;
  if (config_.backend == "sim") {
    sim_ = std::make_shared<SimBackend>(config_.sim, config_.sim_designer);
    for (const auto& [name, prof] : config_.providers) backends[name] = sim_;
  } else if (config_.backend == "http") {
    for (const auto& [name, prof] : config_.providers)
      backends[name] = std::make_shared<HttpBackend>(prof);
  } else {
    throw Error(Errc::config_error, "unknown backend '" + config_.backend + "'");
  }
  gateway_ = std::make_unique<Gateway>(config_.providers, backends, transcript_);
}

Gateway& Pipeline::gateway() { return *gateway_; }

std::filesystem::path Pipeline::card_path(const VariantConfig& v) const {
  return run_dir_ / "domain_cards" / (v.id.key() + ".yaml");
}
std::filesystem::path Pipeline::suite_path(const VariantConfig& v, const PanelModel& g) const {
  return run_dir_ / "suites" / (v.id.key() + "__" + g.name + ".jsonl");
}
std::filesystem::path Pipeline::quota_path(const VariantConfig& v, const PanelModel& g) const {
  return run_dir_ / "suites" / (v.id.key() + "__" + g.name + ".quota.json");
}
std::filesystem::path Pipeline::responses_path(const VariantConfig& v,
                                               const PanelModel& g) const {
  return run_dir_ / "responses" / (v.id.key() + "__" + g.name + ".jsonl");
}
std::filesystem::path Pipeline::scores_path(const VariantConfig& v, const PanelModel& g) const {
  return run_dir_ / "scores" / (v.id.key() + "__" + g.name + ".jsonl");
}
std::filesystem::path Pipeline::core_path(const VariantConfig& v, const PanelModel& g) const {
  return run_dir_ / "gates" / (v.id.key() + "__" + g.name + ".core.json");
}
std::filesystem::path Pipeline::matrix_path(const VariantConfig& v) const {
  return run_dir_ / "analytics" / (v.id.key() + ".matrix.json");
}
std::filesystem::path Pipeline::metrics_path() const {
  return run_dir_ / "analytics" / "metrics.json";
}

std::string Pipeline::files_digest(const std::vector<std::filesystem::path>& files) const {
  std::string acc = config_.digest();
  for (const auto& f : files) {
    acc += "\n" + f.filename().string() + ":";
    acc += std::filesystem::exists(f) ? sha256_hex(read_file(f)) : "missing";
  }
  return sha256_hex(acc);
}

bool Pipeline::stage_done(const std::string& stage, const std::string& inputs_digest) const {
  auto marker = run_dir_ / "state" / (stage + ".done.json");
  if (!std::filesystem::exists(marker)) return false;
  json j = json::parse(read_file(marker), nullptr, false);
  if (j.is_discarded()) return false;
  return j.value("inputs_digest", "") == inputs_digest;
}

void Pipeline::mark_done(const std::string& stage, const std::string& inputs_digest,
                         const std::vector<std::filesystem::path>& outputs) {
  ojson j;
  j["stage"] = stage;
  j["inputs_digest"] = inputs_digest;
  ojson outs = ojson::object();
  for (const auto& o : outputs)
    outs[o.lexically_relative(run_dir_).string()] =
        std::filesystem::exists(o) ? sha256_hex(read_file(o)) : "missing";
  j["outputs"] = outs;
  write_file(run_dir_ / "state" / (stage + ".done.json"), j.dump(2) + "\n");
}

// --- stages -----------------------------------------------------------------------

void Pipeline::stage_extract_cards() {
  std::vector<std::filesystem::path> inputs;
  for (const auto& v : config_.variants) {
    if (!v.card_path.empty()) inputs.push_back(v.card_path);
    if (!v.seed_path.empty()) inputs.push_back(v.seed_path);
  }
  std::string digest = files_digest(inputs);
  if (stage_done("extract-card", digest)) return;

  std::vector<std::filesystem::path> outputs;
  for (const auto& v : config_.variants) {
    DomainCard card;
    if (!v.card_path.empty()) {
      card = parse_card(read_file(v.card_path));
    } else if (!v.seed_path.empty()) {
      auto seed_items = read_items_jsonl(read_file(v.seed_path));
      card = canonicalize_card(build_card(seed_items, field_labeler()));
    } else {
      throw Error(Errc::config_error, "variant " + v.id.key() + " has neither card nor seed");
    }
    card.meta.dataset = v.id.dataset;
    write_file(card_path(v), serialize_card(card));
    outputs.push_back(card_path(v));
  }
  mark_done("extract-card", digest, outputs);
}

namespace {

ojson plan_context(const BatchPlan& plan, const VariantConfig& v) {
  auto imap = [](const std::map<std::string, int>& m) {
    ojson out = ojson::object();
    for (const auto& [k, c] : m) out[k] = c;
    return out;
  };
  ojson j;
  j["size"] = plan.size;
  j["id_start"] = plan.id_start;
  j["intent_request"] = imap(plan.intent_request);
  j["difficulty_request"] = imap(plan.difficulty_request);
  j["format_request"] = imap(plan.format_request);
  j["coverage_request"] = imap(plan.coverage_request);
  j["language"] = v.id.language;
  j["modality"] = v.id.modality;
  if (v.id.condition) j["condition"] = *v.id.condition;
  return j;
}

}  // namespace

void Pipeline::stage_generate() {
  std::vector<std::filesystem::path> inputs;
  for (const auto& v : config_.variants) inputs.push_back(card_path(v));
  std::string digest = files_digest(inputs);
  if (stage_done("generate", digest)) return;

  std::vector<std::filesystem::path> outputs;
  for (const auto& v : config_.variants) {
    DomainCard card = parse_card(read_file(card_path(v)));
    QuotaSpec spec = derive_quota(card, config_.quota, v.total);
    spec.language = v.id.language;
    spec.modality_directives =
        v.id.modality == "multimodal"
            ? (v.id.condition.value_or("textonly") == "visualprimed"
                   ? "multimodal items; reference the described visual when useful"
                   : "multimodal dataset generated text-only; do not require images")
            : "text-only questions";

    for (const auto& g : config_.designers) {
      auto suite_file = suite_path(v, g);
      if (std::filesystem::exists(suite_file) && std::filesystem::exists(quota_path(v, g)))
        continue;  // per-pair resume inside an unfinished stage

      std::string prefix = v.id_prefix + "_" + g.family;
      ModelId designer{g.name, g.family};
      DesignerFn fn = [&](const RequestPair& prompts, const BatchPlan& plan) {
        ojson ctx = sim_designer_context(plan_context(plan, v), prefix, g.name,
                                         v.id.dataset);
        return gateway_
            ->complete(g.provider, Role::designer, designer, prompts.system, prompts.user, ctx)
            .text;
      };
      LoopOptions opts;
      opts.batch_cap = config_.batch_cap;
      SuiteResult result = run_generation_loop(card, spec, designer,
                                               PromptTemplates::defaults(), prefix, fn, opts);
      if (!result.abort_reason.empty())
        throw Error(Errc::provider_exhausted,
                    "generation for " + v.id.key() + "/" + g.name + " aborted: " +
                        result.abort_reason);
      write_file(suite_file, write_items_jsonl(result.items));
      ojson report = suite_quota_report(result);
      report["provenance"] = ojson{{"config_digest", config_.digest()},
                                   {"card_digest", sha256_hex(read_file(card_path(v)))}};
      write_file(quota_path(v, g), report.dump(2) + "\n");
      outputs.push_back(suite_file);
      outputs.push_back(quota_path(v, g));
    }
  }
  mark_done("generate", digest, outputs);
}

void Pipeline::stage_answer() {
  std::vector<std::filesystem::path> inputs;
  for (const auto& v : config_.variants)
    for (const auto& g : config_.designers) inputs.push_back(suite_path(v, g));
  std::string digest = files_digest(inputs);
  if (stage_done("answer", digest)) return;

  // test harness hook: hard-kill the process after N fresh calls
  long long abort_after = -1;
  if (const char* env = std::getenv("BENCH_ABORT_AFTER_CALLS")) abort_after = std::atoll(env);
  std::atomic<long long> fresh_calls{0};

  for (const auto& v : config_.variants) {
    for (const auto& g : config_.designers) {
      auto suite = read_items_jsonl(read_file(suite_path(v, g)));
      auto log_path = responses_path(v, g);

      std::set<std::string> done;
      for (const auto& line : read_lines(log_path)) {
        json j = json::parse(line, nullptr, false);
        if (!j.is_discarded() && j.contains("answerer") && j.contains("item_id"))
          done.insert(j["answerer"].get<std::string>() + "\t" +
                      j["item_id"].get<std::string>());
      }

      struct Task {
        const Item* item;
        const PanelModel* answerer;
      };
      std::vector<Task> tasks;
      for (const auto& item : suite) {
        if (!item.qtype()) continue;  // unknown formats cannot be prompted
        for (const auto& a : config_.answerers) {
          if (!done.count(a.name + "\t" + item.id)) tasks.push_back({&item, &a});
        }
      }

      std::mutex log_mu;
      parallel_for_indices(tasks.size(), config_.workers, [&](size_t ix) {
        const Task& t = tasks[ix];
        RequestPair prompt = answer_prompt(*t.item);
        ModelId model{t.answerer->name, t.answerer->family};
        CompletionResult res =
            gateway_->complete(t.answerer->provider, Role::answerer, model, prompt.system,
                               prompt.user, sim_answer_context(*t.item));
        ojson line;
        line["answerer"] = t.answerer->name;
        line["item_id"] = t.item->id;
        line["response"] = res.text;
        line["digest"] = sha256_hex(t.answerer->name + "\t" + t.item->id + "\t" + res.text);
        {
          std::lock_guard lock(log_mu);
          append_line(log_path, line.dump());
        }
        long long n = ++fresh_calls;
        if (abort_after >= 0 && n >= abort_after) std::_Exit(9);
      });
    }
  }
  mark_done("answer", digest, {});
}

void Pipeline::stage_score() {
  std::vector<std::filesystem::path> inputs;
  for (const auto& v : config_.variants)
    for (const auto& g : config_.designers) inputs.push_back(suite_path(v, g));
  std::string digest = files_digest(inputs);
  if (stage_done("score", digest)) return;

  JudgeFn judge = [&](const RequestPair& prompt, const ojson& ctx) {
    ModelId model{config_.judge.name, config_.judge.family};
    return gateway_
        ->complete(config_.judge.provider, Role::judge, model, prompt.system, prompt.user, ctx)
        .text;
  };

  std::vector<std::filesystem::path> outputs;
  for (const auto& v : config_.variants) {
    for (const auto& g : config_.designers) {
      auto suite = read_items_jsonl(read_file(suite_path(v, g)));

      std::map<std::string, std::string> responses;  // answerer \t item -> text
      for (const auto& line : read_lines(responses_path(v, g))) {
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) continue;
        responses[j["answerer"].get<std::string>() + "\t" + j["item_id"].get<std::string>()] =
            j["response"].get<std::string>();
      }

      struct Task {
        const Item* item;
        const PanelModel* answerer;
        const std::string* raw;
      };
      std::vector<Task> tasks;
      for (const auto& item : suite) {
        if (!item.qtype()) continue;
        for (const auto& a : config_.answerers) {
          auto it = responses.find(a.name + "\t" + item.id);
          if (it == responses.end())
            throw Error(Errc::stale_log, "missing response for " + item.id + " by " + a.name +
                                             "; run the answer stage first");
          tasks.push_back({&item, &a, &it->second});
        }
      }

      std::vector<ScoreRecord> records(tasks.size());
      parallel_for_indices(tasks.size(), config_.workers, [&](size_t ix) {
        const Task& t = tasks[ix];
        ModelId model{t.answerer->name, t.answerer->family};
        records[ix] = route_and_score(*t.item, model, *t.raw, judge);
      });

      std::sort(records.begin(), records.end(),
                [](const ScoreRecord& a, const ScoreRecord& b) {
                  if (a.item_id != b.item_id) return a.item_id < b.item_id;
                  return a.answerer < b.answerer;
                });
      std::string out;
      for (const auto& r : records) {
        out += r.to_json().dump();
        out += '\n';
      }
      write_file(scores_path(v, g), out);
      ojson hist;
      hist["methods"] = methods_histogram(records);
      hist["provenance"] =
          ojson{{"config_digest", config_.digest()},
                {"suite_digest", sha256_hex(read_file(suite_path(v, g)))}};
      auto hist_path = scores_path(v, g);
      hist_path.replace_extension(".methods.json");
      write_file(hist_path, hist.dump(2) + "\n");
      outputs.push_back(scores_path(v, g));
      outputs.push_back(hist_path);
    }
  }
  mark_done("score", digest, outputs);
}

namespace {

std::vector<ScoreRecord> read_score_records(const std::filesystem::path& p) {
  std::vector<ScoreRecord> out;
  for (const auto& line : read_lines(p)) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) continue;
    ScoreRecord r;
    r.answerer = j.at("answerer").get<std::string>();
    r.item_id = j.at("item_id").get<std::string>();
    std::string method = j.at("method").get<std::string>();
    if (method == "exact") r.method = ScoreMethod::exact;
    else if (method == "set") r.method = ScoreMethod::set;
    else if (method == "numeric") r.method = ScoreMethod::numeric;
    else if (method == "symbolic") r.method = ScoreMethod::symbolic;
    else if (method == "judge") r.method = ScoreMethod::judge;
    else r.method = ScoreMethod::skip_core;
    if (!j.at("hard").is_null()) r.hard = j["hard"].get<int>();
    if (!j.at("soft").is_null()) r.soft = j["soft"].get<double>();
    if (!j.at("final").is_null()) r.final = j["final"].get<double>();
    if (!j.at("judge_label").is_null())
      r.judge_label = parse_judge_label(j["judge_label"].get<std::string>());
    for (const auto& f : j.at("flags")) r.flags.insert(f.get<std::string>());
    const auto& p_json = j.at("parsed");
    std::string kind = p_json.at("kind").get<std::string>();
    if (kind == "letter") r.parsed.kind = AnswerKind::letter;
    else if (kind == "letter_set") r.parsed.kind = AnswerKind::letter_set;
    else if (kind == "numeric") r.parsed.kind = AnswerKind::numeric;
    else if (kind == "expression") r.parsed.kind = AnswerKind::expression;
    else if (kind == "text") r.parsed.kind = AnswerKind::text;
    else r.parsed.kind = AnswerKind::unparseable;
    r.parsed.value = p_json.at("value").get<std::string>();
    r.parsed.notes = p_json.at("notes").get<std::vector<std::string>>();
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

void Pipeline::stage_gate() {
  std::vector<std::filesystem::path> inputs;
  for (const auto& v : config_.variants)
    for (const auto& g : config_.designers) {
      inputs.push_back(suite_path(v, g));
      inputs.push_back(scores_path(v, g));
    }
  std::string digest = files_digest(inputs);
  if (stage_done("gate", digest)) return;

  JudgeFn judge = [&](const RequestPair& prompt, const ojson& ctx) {
    ModelId model{config_.judge.name, config_.judge.family};
    return gateway_
        ->complete(config_.judge.provider, Role::judge, model, prompt.system, prompt.user, ctx)
        .text;
  };

  std::vector<std::filesystem::path> outputs;
  for (const auto& v : config_.variants) {
    for (const auto& g : config_.designers) {
      auto suite = read_items_jsonl(read_file(suite_path(v, g)));
      auto records = read_score_records(scores_path(v, g));

      std::map<std::string, std::vector<ScoreRecord>> by_item;
      for (const auto& r : records) by_item[r.item_id].push_back(r);

      std::vector<ItemStatus> statuses(suite.size());
      for (size_t i = 0; i < suite.size(); ++i) statuses[i] = validate_item_static(suite[i]);

      // subset predicate: "all" judges everything, "disagreement" only items
      // where the panel split, "none" skips the pass
      auto panel_disagrees = [&](const std::string& id) {
        auto it = by_item.find(id);
        if (it == by_item.end()) return false;
        std::optional<double> lo, hi;
        for (const auto& r : it->second) {
          if (!r.final) continue;
          if (!lo || *r.final < *lo) lo = *r.final;
          if (!hi || *r.final > *hi) hi = *r.final;
        }
        return lo && hi && *lo != *hi;
      };
      const std::string& mode = config_.analytics.dynamic_pass;
      std::vector<std::optional<DynamicDecision>> decisions(suite.size());
      if (mode == "all" || mode == "disagreement") {
        parallel_for_indices(suite.size(), config_.workers, [&](size_t i) {
          if (statuses[i].status == StaticStatus::broken_static) return;  // already out
          if (mode == "disagreement" && !panel_disagrees(suite[i].id)) return;
          auto it = by_item.find(suite[i].id);
          const std::vector<ScoreRecord> empty;
          DynamicPassResult res =
              dynamic_quality_pass(suite[i], it == by_item.end() ? empty : it->second, judge);
          decisions[i] = res.decision;
          if (res.decision != DynamicDecision::clean) {
            statuses[i].status = StaticStatus::flagged_dynamic;
            switch (res.decision) {
              case DynamicDecision::not_well_posed:
                statuses[i].flags.insert(QualityFlag::not_well_posed);
                break;
              case DynamicDecision::gold_incorrect:
                statuses[i].flags.insert(QualityFlag::gold_incorrect);
                break;
              case DynamicDecision::ambiguous:
                statuses[i].flags.insert(QualityFlag::ambiguous);
                break;
              case DynamicDecision::clean: break;
            }
          }
        });
      }

      auto core = build_core(suite, statuses, decisions, records);
      ojson manifest = core_manifest(core);
      manifest["provenance"] =
          ojson{{"config_digest", config_.digest()},
                {"suite_digest", sha256_hex(read_file(suite_path(v, g)))},
                {"scores_digest", sha256_hex(read_file(scores_path(v, g)))}};
      write_file(core_path(v, g), manifest.dump(2) + "\n");
      outputs.push_back(core_path(v, g));
    }
  }
  mark_done("gate", digest, outputs);
}

void parallel_for_indices(size_t n, int workers, const std::function<void(size_t)>& fn) {
  if (n == 0) return;
  int nthreads = std::max(1, std::min<int>(workers, static_cast<int>(n)));
  if (nthreads == 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr first_error;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (int t = 0; t < nthreads; ++t) {
    pool.emplace_back([&] {
      while (true) {
        size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(err_mu);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

int run_stage_with_manifest(Pipeline& pipe, const std::string& stage,
                            const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const Error& e) {
    int code = 1;
    switch (e.code()) {
      case Errc::card_format:
      case Errc::empty_seed: code = 2; break;
      case Errc::provider_exhausted: code = 3; break;
      case Errc::judge_protocol: code = 4; break;
      default: code = 1; break;
    }
    ojson manifest;
    manifest["stage"] = stage;
    manifest["error"] = errc_name(e.code());
    manifest["message"] = e.what();
    manifest["exit_code"] = code;
    write_file(pipe.run_dir() / "errors" / (stage + ".json"), manifest.dump(2) + "\n");
    fprintf(stderr, "%s\n", e.what());
    return code;
  }
}

}  // namespace bench
