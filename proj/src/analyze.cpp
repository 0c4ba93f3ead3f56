#include <algorithm>
#include <cmath>

#include "bench/error.hpp"
#include "bench/pipeline.hpp"
#include "bench/util.hpp"
#include "bench/validate.hpp"

namespace bench {

namespace {

struct VariantData {
  const VariantConfig* config;
  std::vector<Item> suite;                 // merged across designers
  std::vector<CoreDecision> core;          // minimal reconstruction
  std::vector<ScoreRecord> records;
  std::map<std::string, DesignerCounts> counts;  // per designer, this variant
  QuotaSpec spec;                          // representative quota targets
};

std::vector<ScoreRecord> parse_score_lines(const std::vector<std::string>& lines) {
  std::vector<ScoreRecord> out;
  for (const auto& line : lines) {
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
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

void Pipeline::stage_analyze() {
  std::vector<std::filesystem::path> inputs;
  for (const auto& v : config_.variants) {
    for (const auto& g : config_.designers) {
      inputs.push_back(suite_path(v, g));
      inputs.push_back(scores_path(v, g));
      inputs.push_back(core_path(v, g));
    }
  }
  std::string digest = files_digest(inputs);
  if (stage_done("analyze", digest)) return;

  std::map<std::string, std::string> family_table;
  for (const auto& g : config_.designers) family_table[g.name] = g.family;
  for (const auto& a : config_.answerers) family_table[a.name] = a.family;
  FamilyOf family_of = [family_table](const std::string& name) {
    auto it = family_table.find(name);
    if (it != family_table.end()) return it->second;
    const auto& builtin = builtin_family_table();
    auto b = builtin.find(name);
    return b == builtin.end() ? name : b->second;
  };

  // load per-variant data and build matrices
  std::vector<VariantData> data;
  std::vector<ResponseMatrix> matrices;
  std::vector<std::filesystem::path> outputs;
  for (const auto& v : config_.variants) {
    VariantData vd;
    vd.config = &v;
    for (const auto& g : config_.designers) {
      auto suite = read_items_jsonl(read_file(suite_path(v, g)));
      json manifest = json::parse(read_file(core_path(v, g)));
      std::int64_t core_n = manifest.at("core_count").get<std::int64_t>();
      vd.counts[g.name].items += static_cast<std::int64_t>(suite.size());
      vd.counts[g.name].core += core_n;
      for (const auto& d : manifest.at("decisions")) {
        CoreDecision cd;
        cd.item_id = d.at("item_id").get<std::string>();
        cd.in_core = d.at("in_core").get<bool>();
        vd.core.push_back(std::move(cd));
      }
      auto records = parse_score_lines(read_lines(scores_path(v, g)));
      vd.records.insert(vd.records.end(), records.begin(), records.end());
      vd.suite.insert(vd.suite.end(), suite.begin(), suite.end());
    }
    DomainCard card = parse_card(read_file(card_path(v)));
    vd.spec = derive_quota(card, config_.quota, v.total);

    ResponseMatrix m = build_matrix(v.id, vd.suite, vd.core, vd.records);
    ojson mj = m.to_json();
    mj["provenance"] = ojson{{"config_digest", config_.digest()}, {"inputs_digest", digest}};
    write_file(matrix_path(v), mj.dump() + "\n");
    outputs.push_back(matrix_path(v));
    matrices.push_back(std::move(m));
    data.push_back(std::move(vd));
  }

  // pooled designer counts
  std::map<std::string, DesignerCounts> pooled_counts;
  for (const auto& vd : data) {
    for (const auto& [g, c] : vd.counts) {
      pooled_counts[g].items += c.items;
      pooled_counts[g].core += c.core;
    }
  }
  std::vector<LeaderboardRow> leaderboard = designer_summary(matrices, pooled_counts);

  ojson metrics;
  ojson rows = ojson::array();
  for (const auto& row : leaderboard) rows.push_back(row.to_json());
  metrics["leaderboard"] = rows;

  // per-variant pillars
  ojson per_variant = ojson::object();
  for (size_t vi = 0; vi < data.size(); ++vi) {
    const VariantData& vd = data[vi];
    const ResponseMatrix& m = matrices[vi];
    ojson section;

    // P1: validity
    ojson noncore = ojson::object();
    std::int64_t items_total = 0, core_total = 0;
    for (const auto& [g, c] : vd.counts) {
      noncore[g] = noncore_rate(c.items, c.core);
      items_total += c.items;
      core_total += c.core;
    }
    section["noncore_rate"] = noncore;
    section["noncore_rate_pooled"] = noncore_rate(items_total, core_total);

    // P3: ranking preservation
    ojson taus = ojson::object();
    for (const auto& g : config_.designers) {
      std::vector<std::string> reference;
      if (config_.analytics.tau_reference == "seed" && !config_.analytics.seed_ranking.empty())
        reference = config_.analytics.seed_ranking;
      else
        reference = consensus_reference({m}, g.name);
      try {
        TauResult t = kendall_tau_preservation(m, g.name, reference,
                                               config_.analytics.bootstrap_b, config_.seed);
        taus[g.name] = ojson{{"tau", t.tau},
                             {"ci_lo", t.ci_lo},
                             {"ci_hi", t.ci_hi},
                             {"n_items", t.n_items}};
      } catch (const Error&) {
        taus[g.name] = ojson(nullptr);
      }
    }
    section["kendall_tau"] = taus;

    // P2: alignment per designer
    ojson alignment = ojson::object();
    for (const auto& g : config_.designers) {
      std::vector<const Item*> mine;
      for (const auto& it : vd.suite)
        if (it.designer_model == g.name &&
            validate_item_static(it).status != StaticStatus::broken_static)
          mine.push_back(&it);
      if (mine.empty()) {
        alignment[g.name] = ojson(nullptr);
        continue;
      }
      auto normalized = [](const std::map<std::string, int>& targets) {
        std::map<std::string, double> out;
        double total = 0;
        for (const auto& [k, n] : targets) total += n;
        for (const auto& [k, n] : targets) out[k] = total > 0 ? n / total : 0.0;
        return out;
      };
      auto realized_dist = [&](auto&& key_of, const std::map<std::string, int>& targets) {
        std::map<std::string, double> out;
        for (const auto& [k, n] : targets) {
          (void)n;
          out[k] = 0.0;
        }
        for (const Item* it : mine) out[key_of(*it)] += 1.0;
        double total = static_cast<double>(mine.size());
        for (auto& [k, x] : out) x /= total;
        return out;
      };
      ojson entry;
      try {
        auto fmt_target = normalized(vd.spec.format_targets);
        auto fmt_real = realized_dist([](const Item& it) { return it.question_type; },
                                      vd.spec.format_targets);
        Divergence fmt = alignment_divergence(fmt_target, fmt_real);
        entry["format"] = ojson{{"l1", fmt.l1}, {"js", fmt.js}};
        auto dom_target = normalized(vd.spec.coverage_targets);
        auto dom_real = realized_dist([](const Item& it) { return it.super_parent; },
                                      vd.spec.coverage_targets);
        Divergence dom = alignment_divergence(dom_target, dom_real);
        entry["domain"] = ojson{{"l1", dom.l1}, {"js", dom.js}};
      } catch (const Error& e) {
        entry["error"] = e.what();
      }
      auto diff_corr = declared_difficulty_alignment(m, g.name);
      entry["difficulty_spearman"] = diff_corr ? ojson(*diff_corr) : ojson(nullptr);
      alignment[g.name] = entry;
    }
    section["alignment"] = alignment;

    // P4: interaction effects
    section["family_bias"] = family_advantage(m, family_of).to_json();
    ojson adv = ojson::object();
    for (const auto& [g, drop] : adversarial_effect(m, config_.analytics.strong_panel_k))
      adv[g] = drop ? ojson(*drop) : ojson(nullptr);
    section["adversarial_drop"] = adv;
    section["strong_panel"] = strong_panel(m, config_.analytics.strong_panel_k);

    // scoring-instrument visibility
    std::map<std::string, bool> in_core_map;
    for (const auto& d : vd.core) in_core_map[d.item_id] = d.in_core;
    std::int64_t judged = 0, total_core_responses = 0;
    for (const auto& r : vd.records) {
      auto it = in_core_map.find(r.item_id);
      if (it == in_core_map.end() || !it->second) continue;
      ++total_core_responses;
      if (r.method == ScoreMethod::judge) ++judged;
    }
    section["judged_core_response_fraction"] =
        total_core_responses > 0 ? static_cast<double>(judged) / total_core_responses : 0.0;

    per_variant[vd.config->id.key()] = section;
  }
  metrics["per_variant"] = per_variant;

  // strength vs design over dual-role models
  std::map<std::string, std::pair<double, std::int64_t>> pooled_acc;
  for (const auto& m : matrices) {
    for (size_t a = 0; a < m.answerers.size(); ++a) {
      for (size_t d = 0; d < m.designers.size(); ++d) {
        if (m.cell_support[a][d] == 0) continue;
        auto& slot = pooled_acc[m.answerers[a]];
        slot.first += m.cell_mean[a][d] * m.cell_support[a][d];
        slot.second += m.cell_support[a][d];
      }
    }
  }
  std::map<std::string, double> answerer_accuracy;
  for (const auto& [name, acc] : pooled_acc)
    if (acc.second > 0) answerer_accuracy[name] = acc.first / static_cast<double>(acc.second);
  try {
    StrengthDesignReport sd = strength_vs_design(leaderboard, answerer_accuracy);
    ojson dqi = ojson::array();
    for (const auto& row : sd.dqi)
      dqi.push_back(ojson{{"designer", row.designer},
                          {"dqi", row.dqi},
                          {"z_discrimination", row.z_discrimination},
                          {"z_broken", row.z_broken},
                          {"z_negative", row.z_negative}});
    metrics["strength_vs_design"] =
        ojson{{"dqi", dqi},
              {"spearman_rho", sd.spearman_rho ? ojson(*sd.spearman_rho) : ojson(nullptr)}};
  } catch (const Error& e) {
    metrics["strength_vs_design"] = ojson{{"error", e.what()}};
  }

  // optional human-audit agreement
  if (!config_.analytics.audit_labels_path.empty()) {
    json audit = json::parse(read_file(config_.analytics.audit_labels_path));
    ojson agreement = ojson::object();
    for (auto it = audit.at("dimensions").begin(); it != audit.at("dimensions").end(); ++it) {
      const json& dim = it.value();
      std::vector<std::vector<std::optional<int>>> labels;
      for (const auto& rater : dim.at("labels")) {
        std::vector<std::optional<int>> row;
        for (const auto& l : rater)
          row.push_back(l.is_null() ? std::optional<int>() : std::optional<int>(l.get<int>()));
        labels.push_back(std::move(row));
      }
      AlphaDistance dist = dim.value("scale", "nominal") == std::string("ordinal")
                               ? AlphaDistance::ordinal
                               : AlphaDistance::nominal;
      ojson entry;
      auto alpha = krippendorff_alpha(labels, dist);
      entry["alpha"] = alpha ? ojson(*alpha) : ojson(nullptr);
      entry["scale"] = dim.value("scale", "nominal");
      if (labels.size() == 2)
        entry["observed_agreement"] = observed_agreement(labels[0], labels[1]);
      agreement[it.key()] = entry;
    }
    metrics["agreement"] = agreement;
  }

  metrics["provenance"] = ojson{{"config_digest", config_.digest()}, {"inputs_digest", digest}};
  write_file(metrics_path(), metrics.dump(2) + "\n");
  outputs.push_back(metrics_path());
  mark_done("analyze", digest, outputs);
}

}  // namespace bench
