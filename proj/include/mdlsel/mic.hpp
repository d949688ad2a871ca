#pragma once

#include <vector>

#include "mdlsel/codes.hpp"
#include "mdlsel/dataset.hpp"
#include "mdlsel/fit.hpp"
#include "mdlsel/model.hpp"

// Greedy stepwise multi-response selection under three per-feature coding
// schemes (partial / full / ric).  Each iteration screens every remaining
// candidate by its total residual-bit gain, keeps the top_t best, finds each
// survivor's best response subset, and accepts the single best
// (feature, subset) while the description length keeps shrinking strictly.

namespace mdlsel {

struct MicSearchConfig {
  codes::MicScheme scheme = codes::MicScheme::partial;
  int top_t = 75;          // screening width; >= m disables the prefilter
  int max_features = -1;   // acceptance cap; < 0 means unlimited (for ric: per response)
  double l_theta = 2.0;    // bits per nonzero coefficient
  int threads = 1;
  bool prune = true;       // lower-bound subset-size pruning (results identical)
};

struct SubsetChoice {
  std::vector<int> tasks;  // chosen responses, ascending
  int k = 0;               // subset size
  double delta_s = 0.0;    // d_se - d_sm; the acceptance criterion is > 0
  double d_se = 0.0;
  double d_sm = 0.0;
  bool feasible = false;   // false when no response can take this feature
};

// Residual-bit gain per response from adding `feature` (0 for saturated
// responses and responses where the column is collinear with the design).
std::vector<double> candidate_task_gains(const std::vector<TaskFit>& state, int feature);

// Best response subset for one candidate feature under cfg.scheme, grown one
// response at a time in residual-gain order; every subset size k = 1..h is
// evaluated because the subset-description bits are not monotone in k.
// Ties prefer the smaller k.  `incumbent_delta` is the best delta_s seen so
// far across candidates; with cfg.prune the sizes that provably cannot beat
// it are skipped (never changing the outcome, only the work).
SubsetChoice best_subset_for_feature(const std::vector<TaskFit>& state, int feature,
                                     const MicSearchConfig& cfg,
                                     double incumbent_delta = -1e300);

// Optimistic total-description-length bound for including `feature` with a
// subset of size k: current TDL minus the feature's all-response residual
// gain plus the size-k model bits.  No subset of size k can do better, and
// at k = h (all responses eligible) the bound is exact.
double lower_bound_prune(const std::vector<TaskFit>& state, int feature, int k,
                         const MicSearchConfig& cfg, double model_bits_so_far);

// Runs the greedy search on every response jointly (partial / full), or as
// independent per-response selections merged into one ledger (ric).
SelectionModel run_mic(const Dataset& data, const MicSearchConfig& cfg);

}  // namespace mdlsel
