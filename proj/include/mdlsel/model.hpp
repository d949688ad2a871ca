#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mdlsel/codes.hpp"
#include "mdlsel/dataset.hpp"

namespace mdlsel {

// Dense boolean m x h indicator, column-major by task.
struct BoolMat {
  int m = 0;
  int h = 0;
  std::vector<std::uint8_t> v;  // size m*h, v[t*m + j]

  BoolMat() = default;
  BoolMat(int m_, int h_) : m(m_), h(h_), v(static_cast<std::size_t>(m_) * h_, 0) {}
  std::uint8_t& at(int j, int t) { return v[static_cast<std::size_t>(t) * m + j]; }
  std::uint8_t at(int j, int t) const { return v[static_cast<std::size_t>(t) * m + j]; }
};

// One accepted addition, in acceptance order.
struct LedgerEntry {
  std::string feature;       // feature name
  int feature_idx = -1;      // index into the originating dataset, -1 until resolved
  std::vector<int> tasks;    // ascending response indices the feature was added for
  double d_se = 0.0;         // residual bits saved by this acceptance
  double d_sm = 0.0;         // model bits charged; equals costs.total()
  CodeCosts costs;           // decomposition of d_sm
  bool new_class = false;    // class-aware schemes: this addition opened a class
};

// Result of any selection run: the acceptance ledger plus fitted coefficients.
struct SelectionModel {
  std::string scheme;  // "partial-mic", "full-mic", "ric", "tpc", ...
  int m = 0;
  int h = 0;
  std::vector<LedgerEntry> ledger;
  // (feature name, task) -> fitted least-squares coefficient.  Names, not
  // indices, so a saved model stays meaningful against any dataset that
  // carries the same feature names.
  std::map<std::pair<std::string, int>, double> coef;
  double total_tdl = 0.0;  // residual bits + model bits at the final state

  bool empty() const { return ledger.empty(); }

  // Sum of model bits over the ledger.
  double model_bits() const;

  // Per-task selected feature indices, in acceptance order.
  std::vector<std::vector<int>> per_task_support() const;

  // Distinct selected feature indices, ascending.
  std::vector<int> feature_union() const;

  // m x h selection indicator.
  BoolMat support_matrix() const;

  // Total number of (feature, task) inclusions.
  int coefficients_selected() const;

  // Fills feature_idx fields from names; throws UnknownFeature when a ledger
  // name is not present.
  void resolve_indices(const std::vector<std::string>& feature_names);
};

// From-scratch total description length of a model on a dataset: refits every
// response on its recorded support and adds the ledger's model bits.  A
// freshly produced model must reproduce its own total_tdl this way.
double recompute_tdl(const Dataset& data, const SelectionModel& model);

}  // namespace mdlsel
