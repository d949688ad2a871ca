#include "mdlsel/transfer.hpp"

#include <cmath>
#include <set>
#include <string>
#include <unordered_map>

#include "mdlsel/errors.hpp"

namespace mdlsel {

TransferPrior build_prior(const std::vector<SelectionModel>& models,
                          const Dataset& universe, bool positive_only) {
  universe.validate();
  if (!universe.has_classes()) {
    throw NoClassMap("the transfer prior needs a class map on the test universe");
  }
  std::unordered_map<std::string, int> index;
  index.reserve(universe.feature_names.size());
  for (std::size_t j = 0; j < universe.feature_names.size(); ++j) {
    index.emplace(universe.feature_names[j], static_cast<int>(j));
  }

  TransferPrior prior;
  prior.t = static_cast<int>(models.size());

  std::unordered_map<std::string, int> feature_hits;
  std::vector<int> class_hits(static_cast<std::size_t>(universe.num_classes()), 0);

  for (const SelectionModel& model : models) {
    std::set<std::string> picked;  // distinct resolvable selections of this model
    for (const LedgerEntry& e : model.ledger) {
      auto it = index.find(e.feature);
      if (it == index.end()) continue;  // unresolvable: counts as unselected
      if (positive_only) {
        bool positive = false;
        for (int t : e.tasks) {
          auto c = model.coef.find({e.feature, t});
          if (c != model.coef.end() && c->second > 0.0) {
            positive = true;
            break;
          }
        }
        if (!positive) continue;
      }
      picked.insert(e.feature);
    }
    std::vector<char> class_seen(static_cast<std::size_t>(universe.num_classes()), 0);
    for (const std::string& name : picked) {
      ++feature_hits[name];
      const int j = index.at(name);
      class_seen[static_cast<std::size_t>(universe.class_of[static_cast<std::size_t>(j)])] = 1;
    }
    for (std::size_t c = 0; c < class_seen.size(); ++c) {
      if (class_seen[c]) ++class_hits[c];
    }
  }

  // Every universe class gets a row: absence of selections is evidence too.
  for (int c = 0; c < universe.num_classes(); ++c) {
    const int k = class_hits[static_cast<std::size_t>(c)];
    prior.class_counts[universe.class_names[static_cast<std::size_t>(c)]] = {k, prior.t - k};
  }
  for (const auto& [name, s] : feature_hits) {
    prior.feature_counts[name] = {s, prior.t - s};
    const int j = index.at(name);
    prior.feature_class[name] =
        universe.class_names[static_cast<std::size_t>(universe.class_of[static_cast<std::size_t>(j)])];
  }
  return prior;
}

CodeCosts transfer_model_bits(const TpcState& state, const TransferPrior& prior,
                              int feature, int setting, double l_theta) {
  if (setting != 1 && setting != 2) {
    throw SpecError("transfer setting must be 1 or 2, got " + std::to_string(setting));
  }
  const Dataset& data = state.dataset();
  if (!data.has_classes()) {
    throw NoClassMap("transfer costs need a feature class map");
  }
  if (feature < 0 || feature >= data.m) {
    throw DimensionMismatch("feature index out of range: " + std::to_string(feature));
  }
  const int cls = data.class_of[static_cast<std::size_t>(feature)];
  const int big_k = data.num_classes();
  const int m_k = data.class_sizes[static_cast<std::size_t>(cls)];
  const std::string& cls_name = data.class_names[static_cast<std::size_t>(cls)];
  const std::string& feat_name = data.feature_names[static_cast<std::size_t>(feature)];

  const double a = prior.hyper_a;
  const double b = prior.hyper_b < 0.0 ? static_cast<double>(big_k - 1) : prior.hyper_b;
  const double c = prior.hyper_c;
  const double d = prior.hyper_d < 0.0 ? static_cast<double>(m_k - 1) : prior.hyper_d;
  if (a <= 0.0 || b < 0.0 || c <= 0.0 || d < 0.0) {
    throw DomainError("transfer hyperparameters must be positive (a, c) and nonnegative (b, d)");
  }

  auto counts_of = [](const std::map<std::string, std::pair<int, int>>& table,
                      const std::string& key) -> std::pair<int, int> {
    auto it = table.find(key);
    return it == table.end() ? std::pair<int, int>{0, 0} : it->second;
  };
  const auto [ck, cl] = counts_of(prior.class_counts, cls_name);
  const auto [fs, fu] = counts_of(prior.feature_counts, feat_name);
  if (ck < 0 || cl < 0 || fs < 0 || fu < 0) throw DomainError("negative evidence counts");

  // Posterior means.  p can be exactly 1 only in the degenerate one-class /
  // one-feature-class cases (b = 0 or d = 0), where zero bits is the correct
  // price; p <= 0 is impossible with valid hyperparameters.
  const double p_class = (ck + a) / (ck + cl + a + b);
  const double p_feat = (fs + c) / (fs + fu + c + d);
  if (!(p_class > 0.0) || p_class > 1.0 || !(p_feat > 0.0) || p_feat > 1.0) {
    throw DomainError("transfer posterior probability outside (0, 1]");
  }

  // -log2(p) computed as a difference of logs, so that with no evidence the
  // numerator is 1 and the cost collapses to exactly log2(K) / log2(m_k) —
  // the same doubles the no-transfer code produces.
  const double bits_class =
      std::log2(ck + cl + a + b) - std::log2(static_cast<double>(ck) + a);
  const double bits_feat =
      std::log2(fs + fu + c + d) - std::log2(static_cast<double>(fs) + c);

  double l_c;
  if (state.class_open(cls)) {
    l_c = std::log2(static_cast<double>(std::max(state.open_classes(), 1)));
  } else if (setting == 1) {
    l_c = bits_class;
  } else {
    l_c = std::log2(static_cast<double>(big_k));
  }
  return CodeCosts{bits_feat, l_c, l_theta};
}

SelectionModel run_transfer_tpc(const Dataset& data, const TransferPrior& prior,
                                int setting, const TpcConfig& cfg) {
  if (setting != 1 && setting != 2) {
    throw SpecError("transfer setting must be 1 or 2, got " + std::to_string(setting));
  }
  if (!data.has_classes()) {
    throw NoClassMap("transfer selection needs a class map");
  }
  TpcCostFn costs = [&prior, setting, l = cfg.l_theta](const TpcState& st, int j) {
    return transfer_model_bits(st, prior, j, setting, l);
  };
  return run_tpc_with_costs(data, cfg, costs, "transfer-tpc");
}

}  // namespace mdlsel
