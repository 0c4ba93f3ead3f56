#pragma once

#include <string>

#include "bench/domain_card.hpp"
#include "bench/quota.hpp"
#include "bench/types.hpp"

namespace bench {

struct PromptTemplates {
  std::string designer_system;
  std::string designer_user;

  static PromptTemplates defaults();
};

struct RequestPair {
  std::string system;
  std::string user;
};

// Fills every placeholder from (card, plan, designer); throws TemplateError
// listing any placeholder left unresolved. Deterministic: identical inputs
// produce byte-identical prompts.
RequestPair assemble_generation_request(const DomainCard& card, const BatchPlan& plan,
                                        const ModelId& designer,
                                        const PromptTemplates& templates,
                                        const std::string& id_prefix);

// Stage-3 answer prompts, one shape per question type.
RequestPair answer_prompt(const Item& item);

// Pass-2 item-quality judge prompt; sampled answers are (answerer name,
// parsed answer text) pairs.
RequestPair quality_judge_prompt(const Item& item,
                                 const std::vector<std::pair<std::string, std::string>>& samples);

// Rubric answer judge for open/structured responses.
RequestPair answer_judge_prompt(const Item& item, const std::string& model_answer);

}  // namespace bench
