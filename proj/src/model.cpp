#include "mdlsel/model.hpp"

#include <algorithm>
#include <unordered_map>

#include "mdlsel/errors.hpp"
#include "mdlsel/fit.hpp"

namespace mdlsel {

double SelectionModel::model_bits() const {
  double total = 0.0;
  for (const LedgerEntry& e : ledger) total += e.d_sm;
  return total;
}

std::vector<std::vector<int>> SelectionModel::per_task_support() const {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(h));
  for (const LedgerEntry& e : ledger) {
    for (int t : e.tasks) {
      if (t < 0 || t >= h) throw DimensionMismatch("ledger task out of range");
      if (e.feature_idx < 0) throw UnknownFeature("unresolved ledger feature: " + e.feature);
      out[static_cast<std::size_t>(t)].push_back(e.feature_idx);
    }
  }
  return out;
}

std::vector<int> SelectionModel::feature_union() const {
  std::vector<int> out;
  for (const LedgerEntry& e : ledger) {
    if (e.feature_idx < 0) throw UnknownFeature("unresolved ledger feature: " + e.feature);
    out.push_back(e.feature_idx);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

BoolMat SelectionModel::support_matrix() const {
  BoolMat s(m, h);
  for (const LedgerEntry& e : ledger) {
    for (int t : e.tasks) {
      if (e.feature_idx < 0 || e.feature_idx >= m || t < 0 || t >= h) {
        throw DimensionMismatch("ledger entry outside the model dimensions");
      }
      s.at(e.feature_idx, t) = 1;
    }
  }
  return s;
}

int SelectionModel::coefficients_selected() const {
  int c = 0;
  for (const LedgerEntry& e : ledger) c += static_cast<int>(e.tasks.size());
  return c;
}

void SelectionModel::resolve_indices(const std::vector<std::string>& feature_names) {
  std::unordered_map<std::string, int> index;
  index.reserve(feature_names.size());
  for (std::size_t j = 0; j < feature_names.size(); ++j) {
    index.emplace(feature_names[j], static_cast<int>(j));
  }
  for (LedgerEntry& e : ledger) {
    auto it = index.find(e.feature);
    if (it == index.end()) throw UnknownFeature(e.feature);
    e.feature_idx = it->second;
  }
}

double recompute_tdl(const Dataset& data, const SelectionModel& model) {
  if (data.h != model.h || data.m != model.m) {
    throw DimensionMismatch("model dimensions do not match the dataset");
  }
  auto support = model.per_task_support();
  double se = 0.0;
  for (int t = 0; t < data.h; ++t) {
    TaskFit fit(data, t);
    fit.rebuild(support[static_cast<std::size_t>(t)]);
    se += residual_bits_floored(fit.rss(), fit.n(), fit.rss_floor());
  }
  return se + model.model_bits();
}

}  // namespace mdlsel
