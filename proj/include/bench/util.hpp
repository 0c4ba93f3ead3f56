#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bench {

// --- string helpers ---------------------------------------------------------

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
std::string to_upper(std::string_view s);
// Case-folds and collapses internal whitespace runs to single spaces.
std::string fold_label(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
bool starts_with_icase(std::string_view s, std::string_view prefix);

// --- hashing / deterministic RNG --------------------------------------------

// splitmix64 finalizer; the workhorse for all counter-based randomness.
std::uint64_t mix64(std::uint64_t x);

// Order-sensitive combine of a seed with arbitrary byte strings.
std::uint64_t hash_str(std::uint64_t h, std::string_view s);
std::uint64_t hash_u64(std::uint64_t h, std::uint64_t v);

// Uniform double in [0,1) from a 64-bit hash; exact and platform-independent.
double u01(std::uint64_t h);

// Counter-based generator: every draw is keyed, never sequential, so results
// do not depend on call order or thread count.
class KeyedRng {
 public:
  explicit KeyedRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t raw(std::string_view key, std::uint64_t counter = 0) const {
    return mix64(hash_u64(hash_str(seed_ ^ 0x9e3779b97f4a7c15ull, key), counter));
  }
  double uniform(std::string_view key, std::uint64_t counter = 0) const {
    return u01(raw(key, counter));
  }
  // Uniform integer in [0, n).
  std::uint64_t pick(std::string_view key, std::uint64_t n, std::uint64_t counter = 0) const {
    return raw(key, counter) % (n == 0 ? 1 : n);
  }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

// --- digests -----------------------------------------------------------------

std::string sha256_hex(std::string_view data);

// --- file io -----------------------------------------------------------------

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, std::string_view data);
void append_line(const std::filesystem::path& p, std::string_view line);
std::vector<std::string> read_lines(const std::filesystem::path& p);

}  // namespace bench
