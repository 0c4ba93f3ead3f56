#pragma once

#include <map>
#include <string>

#include "bench/gateway.hpp"
#include "bench/types.hpp"

namespace bench {

// Latent-ability response model driving the offline backend: an answerer is
// correct with probability
//   sigmoid(a_i * (theta_a - b_i) + affinity)
// where affinity applies only when the answerer and the item's designer share
// a family. Everything is keyed, counter-based randomness: fixed (spec, seed)
// reproduces transcripts bit-for-bit.
struct SimPanelSpec {
  std::uint64_t seed = 1;
  std::map<std::string, double> abilities;            // answerer name -> theta
  std::map<std::string, std::string> families;        // extra model -> family entries
  double default_discrimination = 1.0;
  std::map<std::string, double> difficulty_by_tier = {
      {"L1", -1.5}, {"L2", -0.75}, {"L3", 0.0}, {"L4", 0.75}, {"L5", 1.5}};
  double difficulty_jitter = 0.25;                    // +- amplitude, hash of the stem
  double adversarial_difficulty_shift = 0.0;          // added to b_i on adversarial items
  std::map<std::string, double> family_affinity;      // family -> own-family logit bonus

  struct ItemParams {
    double difficulty = 0.0;
    double discrimination = 1.0;
  };
  std::map<std::string, ItemParams> overrides;        // by item id

  std::string family_of(const std::string& model_name) const;
};

// Fault injection for the simulated designer; fractions are applied as exact
// evenly-spread counts per batch, so a 20% drop rate drops exactly 6 of 30.
struct SimDesignerConfig {
  double drop_fraction = 0.0;
  double difficulty_mislabel_fraction = 0.0;
  double schema_break_fraction = 0.0;    // statically broken items
  double dynamic_bad_fraction = 0.0;     // items the quality judge will flag
  double numeric_open_fraction = 0.2;    // open/structured items with numeric golds
  double mcq_boilerplate_fraction = 0.1; // answers wrapped in prose, MCQ only
};

class SimBackend : public Backend {
 public:
  explicit SimBackend(SimPanelSpec spec, SimDesignerConfig designer = {});

  CompletionResult complete(const CompletionRequest& req) override;

  // Direct entry points (the gateway path wraps these).
  double correct_probability(const ModelId& answerer, const Item& item) const;
  std::string simulate_response(const ModelId& answerer, const Item& item) const;
  std::string simulate_designer_batch(const ojson& plan_context) const;
  std::string simulate_answer_judgment(const ojson& context) const;
  std::string simulate_quality_decision(const ojson& context) const;

  const SimPanelSpec& spec() const { return spec_; }

 private:
  double item_difficulty_param(const Item& item) const;
  double item_discrimination_param(const Item& item) const;
  bool planted_dynamic_bad(const std::string& stem) const;

  SimPanelSpec spec_;
  SimDesignerConfig designer_;
};

// Context helpers the pipeline uses when talking to a simulated panel.
ojson sim_answer_context(const Item& item);
ojson sim_judge_context(const Item& item, const std::string& model_answer);
ojson sim_quality_context(const Item& item);
ojson sim_designer_context(const ojson& plan_json, const std::string& id_prefix,
                           const std::string& designer_name, const std::string& dataset);

}  // namespace bench
