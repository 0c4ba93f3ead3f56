#pragma once

#include <stdexcept>
#include <string>

namespace bench {

enum class Errc {
  empty_seed,
  card_format,
  infeasible_quota,
  template_error,
  unparseable_batch,
  provider_exhausted,
  config_error,
  judge_protocol,
  domain_error,
  no_hard_scores,
  degenerate_cohort,
  item_parse,
  stale_log,
  io_error,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

}  // namespace bench
