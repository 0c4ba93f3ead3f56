#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bench/analytics.hpp"
#include "bench/domain_card.hpp"
#include "bench/gateway.hpp"
#include "bench/quota.hpp"
#include "bench/sim_backend.hpp"
#include "bench/suite.hpp"

namespace bench {

struct PanelModel {
  std::string name;
  std::string family;
  std::string provider;
};

struct VariantConfig {
  VariantId id;
  std::string card_path;   // pre-extracted card (YAML), or
  std::string seed_path;   // seed items (JSONL) to extract from
  int total = 60;
  std::string id_prefix;
};

struct AnalyticsConfig {
  int bootstrap_b = 1000;
  int strong_panel_k = 3;
  std::string tau_reference = "matrix";        // "matrix" (LOO consensus) or "seed"
  std::vector<std::string> seed_ranking;       // used when tau_reference == "seed"
  std::string dynamic_pass = "all";            // "all" | "none"
  std::string audit_labels_path;               // optional rater x item label table
};

struct RunConfig {
  std::string run_name = "run";
  std::uint64_t seed = 1;
  std::string backend = "sim";  // "sim" | "http"
  std::map<std::string, BackendProfile> providers;
  std::vector<VariantConfig> variants;
  std::vector<PanelModel> designers;
  std::vector<PanelModel> answerers;
  PanelModel judge;
  QuotaConfig quota;
  int batch_cap = 30;
  int workers = 4;
  SimPanelSpec sim;
  SimDesignerConfig sim_designer;
  AnalyticsConfig analytics;

  static RunConfig from_json(const json& j);
  ojson to_json() const;
  std::string digest() const;
};

RunConfig load_config(const std::filesystem::path& path);

// One run directory; stages are idempotent and resumable. Every stage
// records a completion marker keyed by its input digests, so re-running a
// finished stage is a no-op and a changed input invalidates downstream
// markers.
class Pipeline {
 public:
  Pipeline(RunConfig config, std::filesystem::path run_dir);

  void stage_extract_cards();
  void stage_generate();
  void stage_answer();
  void stage_score();
  void stage_gate();
  void stage_analyze();
  void stage_report();

  const std::filesystem::path& run_dir() const { return run_dir_; }
  Gateway& gateway();

  // file layout helpers
  std::filesystem::path card_path(const VariantConfig& v) const;
  std::filesystem::path suite_path(const VariantConfig& v, const PanelModel& g) const;
  std::filesystem::path quota_path(const VariantConfig& v, const PanelModel& g) const;
  std::filesystem::path responses_path(const VariantConfig& v, const PanelModel& g) const;
  std::filesystem::path scores_path(const VariantConfig& v, const PanelModel& g) const;
  std::filesystem::path core_path(const VariantConfig& v, const PanelModel& g) const;
  std::filesystem::path matrix_path(const VariantConfig& v) const;
  std::filesystem::path metrics_path() const;

 private:
  bool stage_done(const std::string& stage, const std::string& inputs_digest) const;
  void mark_done(const std::string& stage, const std::string& inputs_digest,
                 const std::vector<std::filesystem::path>& outputs);
  std::string files_digest(const std::vector<std::filesystem::path>& files) const;

  RunConfig config_;
  std::filesystem::path run_dir_;
  std::shared_ptr<TranscriptLog> transcript_;
  std::unique_ptr<Gateway> gateway_;
  std::shared_ptr<SimBackend> sim_;  // kept for direct access in sim mode
};

// Maps an exception to the documented process exit code and writes the
// machine-readable error manifest.
int run_stage_with_manifest(Pipeline& pipe, const std::string& stage,
                            const std::function<void()>& body);

// Runs `fn(i)` for i in [0,n) on `workers` threads; rethrows the first error.
void parallel_for_indices(size_t n, int workers, const std::function<void(size_t)>& fn);

}  // namespace bench
