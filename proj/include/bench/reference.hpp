#pragma once

// Serial reference implementations, written independently of the production
// kernels: tests compare the two paths, and the kernel benchmark times them.
// Nothing in the pipeline may call into this namespace.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bench/analytics.hpp"

namespace bench::ref {

double pearson_naive(const std::vector<double>& x, const std::vector<double>& y);

// Point-biserial recomputed from scratch: totals, rest-scores, then Pearson.
std::optional<double> point_biserial_naive(
    const std::vector<std::vector<std::optional<int>>>& hard_by_item, size_t item_index);

// tau-b via explicit tie-group counting (n0/n1/n2 formula).
double tau_b_naive(const std::vector<double>& x, const std::vector<double>& y);

double l1_naive(const std::vector<double>& p, const std::vector<double>& q);
double js_naive(const std::vector<double>& p, const std::vector<double>& q);

double spearman_naive(const std::vector<double>& x, const std::vector<double>& y);

// Krippendorff alpha via direct enumeration of value pairs (no coincidence
// matrix); returns nullopt when expected disagreement is zero.
std::optional<double> alpha_naive(const std::vector<std::vector<std::optional<int>>>& labels,
                                  AlphaDistance distance);

// Family advantage per answerer straight off the matrix.
std::map<std::string, std::optional<double>> delta_fam_naive(
    const ResponseMatrix& matrix, const std::map<std::string, std::string>& family);

// Serial twin of build_matrix for the benchmark and cell cross-checks.
ResponseMatrix build_matrix_serial(const VariantId& variant, const std::vector<Item>& suite,
                                   const std::vector<CoreDecision>& core,
                                   const std::vector<ScoreRecord>& records);

// Serial twin of the bootstrap in kendall_tau_preservation; same keyed
// resample stream, independently written aggregation.
TauResult tau_preservation_serial(const ResponseMatrix& matrix, const std::string& designer,
                                  const std::vector<std::string>& reference_ranking,
                                  int bootstrap_b, std::uint64_t seed);

}  // namespace bench::ref
