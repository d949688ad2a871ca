#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mdlsel/codes.hpp"
#include "mdlsel/dataset.hpp"
#include "mdlsel/model.hpp"
#include "mdlsel/tpc.hpp"

// Sequential transfer for class-aware selection: selection outcomes observed
// on earlier (training) responses become Beta-Bernoulli posteriors that
// re-price classes and features for a new response.  With no training
// evidence the prices reduce exactly to the plain class-aware code.

namespace mdlsel {

struct TransferPrior {
  int t = 0;  // number of training models the counts came from

  // Beta hyperparameters.  Negative b / d mean "derive from the test
  // universe": b = K - 1 (classes), d = m_k - 1 (features in the class) —
  // matching the uniform class/index costs of the no-evidence code.
  double hyper_a = 1.0;
  double hyper_b = -1.0;
  double hyper_c = 1.0;
  double hyper_d = -1.0;

  // Class name -> (selected-in k models, unselected-in l models), k + l = t.
  // Every test-universe class has an entry, so silence counts as evidence
  // against a class.
  std::map<std::string, std::pair<int, int>> class_counts;

  // Feature name -> (s, u), s + u = t; only features selected by at least
  // one training model are recorded.  Unrecorded features price at the pure
  // prior.
  std::map<std::string, std::pair<int, int>> feature_counts;

  // Feature name -> class name, for the recorded features (serialization).
  std::map<std::string, std::string> feature_class;
};

// Builds the prior by counting selections across training models against the
// test universe (a dataset providing feature names and classes; its rows and
// responses are not used).  Training features whose names do not resolve in
// the universe are counted as never selected.  With positive_only, only
// features with a positive fitted coefficient count as selected.
TransferPrior build_prior(const std::vector<SelectionModel>& models,
                          const Dataset& universe, bool positive_only = false);

// Model bits for adding `feature` under the transfer code.
//
// setting 1 — training responses share the test response's class structure:
//   new class:  -log2 p(class) - log2 p(feature) + l_theta
//   open class:  log2 Q       - log2 p(feature) + l_theta
// setting 2 — only feature identities transfer, class presence does not:
//   new class:   log2 K       - log2 p(feature) + l_theta
//   open class:  log2 Q       - log2 p(feature) + l_theta
// with p(class)   = (k + a) / (k + l + a + b)
//      p(feature) = (s + c) / (s + u + c + d).
CodeCosts transfer_model_bits(const TpcState& state, const TransferPrior& prior,
                              int feature, int setting, double l_theta);

// Greedy class-aware run priced by the transfer code.
SelectionModel run_transfer_tpc(const Dataset& data, const TransferPrior& prior,
                                int setting, const TpcConfig& cfg);

}  // namespace mdlsel
