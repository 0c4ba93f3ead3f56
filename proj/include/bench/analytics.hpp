#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bench/gates.hpp"
#include "bench/scoring.hpp"
#include "bench/types.hpp"

namespace bench {

// --- designer x answerer matrix -------------------------------------------------

struct ItemRow {
  std::string item_id;
  std::string designer;
  std::string design_type, question_type, declared_difficulty, super_parent;
  bool in_core = false;
  std::vector<std::optional<int>> hard;      // aligned with ResponseMatrix::answerers
  std::vector<std::optional<double>> final;
};

struct ResponseMatrix {
  VariantId variant;
  std::vector<std::string> answerers;  // sorted
  std::vector<std::string> designers;  // sorted
  // [answerer][designer]; support 0 means the cell is undefined
  std::vector<std::vector<double>> cell_mean;
  std::vector<std::vector<int>> cell_support;
  std::vector<ItemRow> items;  // sorted by item_id

  std::optional<double> cell(size_t a, size_t d) const {
    if (cell_support[a][d] == 0) return std::nullopt;
    return cell_mean[a][d];
  }
  std::optional<size_t> answerer_index(const std::string& name) const;
  std::optional<size_t> designer_index(const std::string& name) const;

  ojson to_json() const;
  static ResponseMatrix from_json(const json& j);
};

// Cells are core-item means of final scores; recomputing any cell from the
// raw records matches to 1e-12.
ResponseMatrix build_matrix(const VariantId& variant, const std::vector<Item>& suite,
                            const std::vector<CoreDecision>& core,
                            const std::vector<ScoreRecord>& records);

// --- item psychometrics ----------------------------------------------------------

// Mean hard correctness over the panel. Throws NoHardScores when no answerer
// produced a hard score.
double item_difficulty(const ItemRow& row);

struct DiscriminationResult {
  std::optional<double> r;  // absent for degenerate items
  bool degenerate = false;
  int n = 0;
};

// Corrected item-total (point-biserial): Pearson between the item's hard
// scores and each answerer's rest-score. Degenerate (zero-variance) items are
// reported, not averaged.
DiscriminationResult item_discrimination(const ItemRow& row,
                                         const std::vector<std::optional<double>>& rest);

// Rest-scores for every (item, answerer) of one designer: answerer totals
// over the designer's core hard-scored items minus the item itself.
// [item index in `rows`][answerer index]
std::vector<std::vector<std::optional<double>>> rest_scores(
    const std::vector<const ItemRow*>& rows, size_t answerer_count);

// --- designer leaderboard ---------------------------------------------------------

struct DesignerCounts {
  std::int64_t items = 0;
  std::int64_t core = 0;
};

struct LeaderboardRow {
  std::string designer;
  double broken_pct = 0;        // pooled non-core rate, percent
  double mean_discrimination = 0;
  double neg_discr_pct = 0;     // share of hard-scored core items with r < 0, percent
  double mean_p_correct = 0;
  std::int64_t core_count = 0;
  std::int64_t degenerate_items = 0;

  ojson to_json() const;
};

// Rows sorted by mean discrimination, descending.
std::vector<LeaderboardRow> designer_summary(
    const std::vector<ResponseMatrix>& matrices,
    const std::map<std::string, DesignerCounts>& counts);

// --- ranking preservation -----------------------------------------------------------

double kendall_tau_b(const std::vector<double>& x, const std::vector<double>& y);

struct TauResult {
  double tau = 0;
  double ci_lo = 0, ci_hi = 0;
  int n_items = 0;
};

// tau-b between the designer-induced answerer ranking and the reference,
// with a fixed-seed percentile bootstrap over the designer's core items.
TauResult kendall_tau_preservation(const ResponseMatrix& matrix, const std::string& designer,
                                   const std::vector<std::string>& reference_ranking,
                                   int bootstrap_b = 1000, std::uint64_t seed = 17);

// Leave-one-out consensus: answerers ranked by mean cell value over all
// designers except the held-out one; ties broken by answerer id.
std::vector<std::string> consensus_reference(const std::vector<ResponseMatrix>& matrices,
                                             const std::optional<std::string>& held_out);

// --- alignment ----------------------------------------------------------------------

struct Divergence {
  double l1 = 0;
  double js = 0;  // base-2, in [0,1]
};

// Same support required on both sides; throws DomainError otherwise.
Divergence alignment_divergence(const std::map<std::string, double>& target,
                                const std::map<std::string, double>& realized);

// Spearman rank correlation with tie-averaged ranks.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

// Rank correlation between declared tier and empirical difficulty (1 - p).
std::optional<double> declared_difficulty_alignment(const ResponseMatrix& matrix,
                                                    const std::string& designer);

// --- interaction effects --------------------------------------------------------------

struct FamilyBias {
  struct FamilyRow {
    double acc_own = 0, acc_other = 0;
    double delta_pp = 0;
    std::int64_t n_own = 0, n_other = 0;
  };
  std::map<std::string, std::optional<double>> per_answerer_delta;
  std::map<std::string, FamilyRow> per_family;           // answerer family rows
  std::map<std::string, std::map<std::string, double>> family_matrix;  // [ans fam][des fam]

  ojson to_json() const;
};

using FamilyOf = std::function<std::string(const std::string&)>;

// Own-family minus other-family mean cell per answerer (absent without an
// own-family designer), plus pooled per-family accuracy rows.
FamilyBias family_advantage(const ResponseMatrix& matrix, const FamilyOf& family_of);

// Drop in strong-panel hard accuracy from standard to adversarial core items.
// The strong panel is the top-k answerers by pooled core accuracy.
std::map<std::string, std::optional<double>> adversarial_effect(const ResponseMatrix& matrix,
                                                                int strong_k = 3);
std::vector<std::string> strong_panel(const ResponseMatrix& matrix, int k);

// --- strength vs design (DQI) -----------------------------------------------------------

struct DqiRow {
  std::string designer;
  double dqi = 0;
  double z_discrimination = 0, z_broken = 0, z_negative = 0;
};

struct StrengthDesignReport {
  std::vector<DqiRow> dqi;            // sorted by DQI descending
  std::optional<double> spearman_rho; // strength vs DQI over dual-role models
};

// DQI = Z(discrimination) - Z(broken rate) - Z(negative rate), z-scored over
// the designer cohort with population sigma. Throws DegenerateCohort when a
// z denominator is zero.
StrengthDesignReport strength_vs_design(const std::vector<LeaderboardRow>& leaderboard,
                                        const std::map<std::string, double>& answerer_accuracy);

// --- inter-rater agreement -----------------------------------------------------------------

enum class AlphaDistance { nominal, ordinal };

// Krippendorff's alpha over a rater x item table with missing labels
// permitted; categories are small non-negative ints (ordinal uses their
// order). absent = no variation / undefined.
std::optional<double> krippendorff_alpha(
    const std::vector<std::vector<std::optional<int>>>& labels, AlphaDistance distance);

// Share of items with equal labels between two raters (both present).
double observed_agreement(const std::vector<std::optional<int>>& a,
                          const std::vector<std::optional<int>>& b);

}  // namespace bench
