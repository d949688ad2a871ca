#pragma once

#include <functional>
#include <vector>

#include "mdlsel/codes.hpp"
#include "mdlsel/dataset.hpp"
#include "mdlsel/model.hpp"

// Greedy stepwise selection for a single response where features belong to
// classes.  Describing an addition costs class bits + within-class index bits
// + coefficient bits; the class bits shrink once a class has been opened, so
// structurally related features get cheaper as evidence for their class
// accumulates.

namespace mdlsel {

struct TpcConfig {
  double l_theta = 2.0;
  int max_features = -1;  // < 0: unlimited
  int extra_steps = 8;    // forward-backward: forced additions past the stop
  int threads = 1;
};

// Bookkeeping of which features / classes a run has selected so far.
class TpcState {
public:
  explicit TpcState(const Dataset& data);

  int q() const { return static_cast<int>(selected_.size()); }
  int open_classes() const { return opened_; }  // Q
  bool class_open(int cls) const;
  bool feature_selected(int feature) const;
  const std::vector<int>& selected() const { return selected_; }
  const Dataset& dataset() const { return *data_; }

  // Marks a feature selected, opening its class on first appearance.
  // Returns true when the acceptance opened a new class.
  bool accept(int feature);

private:
  const Dataset* data_;
  std::vector<int> selected_;
  std::vector<char> selected_mask_;
  std::vector<char> class_open_;
  int opened_ = 0;
};

// Model bits for adding `feature` in the given state:
//   class bits:  log2 K when the class is new, log2 Q otherwise
//                (Q = classes opened before this addition),
//   index bits:  log2 m_k (its class size),
//   coefficient: l_theta.
// Throws NoClassMap when the dataset carries no feature classes.
CodeCosts tpc_model_bits(const TpcState& state, int feature, double l_theta);

// Cost policy hook: lets the transfer scheme reuse the same greedy engine.
using TpcCostFn = std::function<CodeCosts(const TpcState&, int feature)>;

// Greedy run; with no class map it falls back to flat log2(m) index costs.
SelectionModel run_tpc(const Dataset& data, const TpcConfig& cfg);

// Forward pass overshoots the stopping point by cfg.extra_steps forced
// additions, then a backward pass drops features while the total description
// length improves.  Returns whichever of (backward result, forward-stop
// snapshot) describes the data in fewer bits — never worse than run_tpc.
SelectionModel run_tpc_forward_backward(const Dataset& data, const TpcConfig& cfg);

// Single-pass variant: features are considered once, in `order` (empty means
// natural order 0..m-1), and accepted iff they shrink the description length
// at that moment.
SelectionModel run_tpc_streamwise(const Dataset& data, const TpcConfig& cfg,
                                  const std::vector<int>& order = {});

// Shared engine with a caller-supplied cost policy (used by the transfer
// scheme); `scheme` names the result.
SelectionModel run_tpc_with_costs(const Dataset& data, const TpcConfig& cfg,
                                  const TpcCostFn& costs, const char* scheme);

// Closed-form description-length saving of class-aware coding over flat
// coding for a finished selection of q features drawn from big_q of the
// big_k classes (class_sizes has one entry per class, summing to m;
// selected_class gives each selected feature's class, selection order).
//   flat:        q * (log2 m + 2)
//   class-aware: big_q log2 big_k + (q - big_q) log2 big_q
//                + sum_j log2 m_class(j) + 2 q
// Returns flat minus class-aware (positive = the class-aware code is
// shorter).  With uniform class sizes m/big_k this reduces to
// (q - big_q) * log2(big_k / big_q).
double tpc_savings(int q, int big_q, int big_k, int m,
                   const std::vector<int>& class_sizes,
                   const std::vector<int>& selected_class);

}  // namespace mdlsel
