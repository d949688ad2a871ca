#include "mdlsel/tpc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "mdlsel/errors.hpp"
#include "mdlsel/fit.hpp"
#include "mdlsel/threads.hpp"

namespace mdlsel {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void validate_tpc_inputs(const Dataset& data, const TpcConfig& cfg) {
  data.validate();
  if (data.h != 1) {
    throw SpecError("class-aware selection runs on a single response, got h=" +
                    std::to_string(data.h));
  }
  if (cfg.l_theta < 0.0) throw SpecError("l_theta must be >= 0");
  if (cfg.threads < 1) throw SpecError("threads must be >= 1");
  if (cfg.extra_steps < 0) throw SpecError("extra_steps must be >= 0");
}

TpcCostFn cost_policy(const Dataset& data, const TpcConfig& cfg) {
  if (data.has_classes()) {
    return [l = cfg.l_theta](const TpcState& st, int j) { return tpc_model_bits(st, j, l); };
  }
  // No class map: flat index costs, same form as per-response flat coding.
  const double li = std::log2(static_cast<double>(data.m));
  return [li, l = cfg.l_theta](const TpcState&, int) { return CodeCosts{li, 0.0, l}; };
}

double gain_bits(const TaskFit& fit, int feature, bool* singular) {
  *singular = false;
  if (fit.saturated()) return 0.0;
  TaskFit::Gain g = fit.gain(feature);
  if (g.singular) {
    *singular = true;
    return 0.0;
  }
  const double before = std::max(fit.rss(), fit.rss_floor());
  const double after = std::max(fit.rss() - g.drss, fit.rss_floor());
  return 0.5 * fit.n() * std::log2(before / after);
}

struct Candidate {
  int feature = -1;
  double delta_s = kNegInf;
  double d_se = 0.0;
  CodeCosts costs;
};

// Best remaining candidate by delta_s (ties: lowest feature index).
Candidate best_candidate(const Dataset& data, const TaskFit& fit, const TpcState& st,
                         const TpcCostFn& costs, int threads) {
  std::vector<double> dse(static_cast<std::size_t>(data.m), kNegInf);
  parallel_for(0, data.m, threads, [&](int j) {
    if (st.feature_selected(j)) return;
    bool singular = false;
    double g = gain_bits(fit, j, &singular);
    if (singular) return;
    dse[static_cast<std::size_t>(j)] = g;
  });
  Candidate best;
  for (int j = 0; j < data.m; ++j) {
    if (dse[static_cast<std::size_t>(j)] == kNegInf) continue;
    CodeCosts c = costs(st, j);
    const double ds = dse[static_cast<std::size_t>(j)] - c.total();
    if (ds > best.delta_s) {
      best.feature = j;
      best.delta_s = ds;
      best.d_se = dse[static_cast<std::size_t>(j)];
      best.costs = c;
    }
  }
  return best;
}

void accept_into(SelectionModel* model, TaskFit* fit, TpcState* st,
                 const Dataset& data, const Candidate& cand) {
  const double before = residual_bits_floored(fit->rss(), fit->n(), fit->rss_floor());
  fit->add(cand.feature);
  const double after = residual_bits_floored(fit->rss(), fit->n(), fit->rss_floor());
  LedgerEntry e;
  e.feature = data.feature_names[static_cast<std::size_t>(cand.feature)];
  e.feature_idx = cand.feature;
  e.tasks = {0};
  e.d_se = before - after;
  e.costs = cand.costs;
  e.d_sm = cand.costs.total();
  e.new_class = st->accept(cand.feature);
  model->ledger.push_back(std::move(e));
}

void finish_model(SelectionModel* model, const TaskFit& fit) {
  const std::vector<double> beta = fit.coefficients();
  const std::vector<int>& sup = fit.support();
  const std::vector<std::string>& names = fit.dataset().feature_names;
  model->coef.clear();
  for (std::size_t i = 0; i < sup.size(); ++i) {
    model->coef[{names[static_cast<std::size_t>(sup[i])], 0}] = beta[i + 1];
  }
  model->total_tdl =
      residual_bits_floored(fit.rss(), fit.n(), fit.rss_floor()) + model->model_bits();
}

// Description length of an ordered selection: fresh least-squares fit for the
// residual bits plus the cost policy replayed over the order (class-opening
// discounts depend on the walk, so order matters for the model bits).
double replay_tdl(const Dataset& data, const std::vector<int>& ordered,
                  const TpcCostFn& costs) {
  TpcState st(data);
  double mbits = 0.0;
  for (int j : ordered) {
    mbits += costs(st, j).total();
    st.accept(j);
  }
  TaskFit fit(data, 0);
  fit.rebuild(ordered);
  return residual_bits_floored(fit.rss(), fit.n(), fit.rss_floor()) + mbits;
}

// Rebuilds a full SelectionModel from an ordered feature list.
SelectionModel model_from_order(const Dataset& data, const std::vector<int>& ordered,
                                const TpcCostFn& costs, const char* scheme) {
  SelectionModel model;
  model.scheme = scheme;
  model.m = data.m;
  model.h = data.h;
  TpcState st(data);
  TaskFit fit(data, 0);
  for (int j : ordered) {
    Candidate cand;
    cand.feature = j;
    cand.costs = costs(st, j);
    bool singular = false;
    cand.d_se = gain_bits(fit, j, &singular);
    if (singular) throw SingularDesign("replayed feature is collinear: " + std::to_string(j));
    cand.delta_s = cand.d_se - cand.costs.total();
    accept_into(&model, &fit, &st, data, cand);
  }
  finish_model(&model, fit);
  return model;
}

}  // namespace

TpcState::TpcState(const Dataset& data)
    : data_(&data),
      selected_mask_(static_cast<std::size_t>(data.m), 0),
      class_open_(static_cast<std::size_t>(std::max(data.num_classes(), 1)), 0) {}

bool TpcState::class_open(int cls) const {
  if (cls < 0 || cls >= static_cast<int>(class_open_.size())) {
    throw DimensionMismatch("class index out of range: " + std::to_string(cls));
  }
  return class_open_[static_cast<std::size_t>(cls)] != 0;
}

bool TpcState::feature_selected(int feature) const {
  if (feature < 0 || feature >= data_->m) {
    throw DimensionMismatch("feature index out of range: " + std::to_string(feature));
  }
  return selected_mask_[static_cast<std::size_t>(feature)] != 0;
}

bool TpcState::accept(int feature) {
  if (feature_selected(feature)) {
    throw SpecError("feature already selected: " + std::to_string(feature));
  }
  selected_.push_back(feature);
  selected_mask_[static_cast<std::size_t>(feature)] = 1;
  bool opened = false;
  if (data_->has_classes()) {
    const int cls = data_->class_of[static_cast<std::size_t>(feature)];
    if (!class_open_[static_cast<std::size_t>(cls)]) {
      class_open_[static_cast<std::size_t>(cls)] = 1;
      ++opened_;
      opened = true;
    }
  }
  return opened;
}

CodeCosts tpc_model_bits(const TpcState& state, int feature, double l_theta) {
  const Dataset& data = state.dataset();
  if (!data.has_classes()) {
    throw NoClassMap("class-aware costs need a feature class map");
  }
  if (feature < 0 || feature >= data.m) {
    throw DimensionMismatch("feature index out of range: " + std::to_string(feature));
  }
  const int cls = data.class_of[static_cast<std::size_t>(feature)];
  const int big_k = data.num_classes();
  double l_c;
  if (state.class_open(cls)) {
    // Point into the already-opened classes; Q >= 1 whenever a class is open.
    l_c = std::log2(static_cast<double>(std::max(state.open_classes(), 1)));
  } else {
    l_c = std::log2(static_cast<double>(big_k));
  }
  const double l_i =
      std::log2(static_cast<double>(data.class_sizes[static_cast<std::size_t>(cls)]));
  return CodeCosts{l_i, l_c, l_theta};
}

SelectionModel run_tpc_with_costs(const Dataset& data, const TpcConfig& cfg,
                                  const TpcCostFn& costs, const char* scheme) {
  validate_tpc_inputs(data, cfg);
  SelectionModel model;
  model.scheme = scheme;
  model.m = data.m;
  model.h = data.h;
  TaskFit fit(data, 0);
  TpcState st(data);
  while (cfg.max_features < 0 || st.q() < cfg.max_features) {
    Candidate cand = best_candidate(data, fit, st, costs, cfg.threads);
    if (cand.feature < 0 || !(cand.delta_s > 0.0)) break;
    accept_into(&model, &fit, &st, data, cand);
  }
  finish_model(&model, fit);
  return model;
}

SelectionModel run_tpc(const Dataset& data, const TpcConfig& cfg) {
  validate_tpc_inputs(data, cfg);
  return run_tpc_with_costs(data, cfg, cost_policy(data, cfg), "tpc");
}

SelectionModel run_tpc_forward_backward(const Dataset& data, const TpcConfig& cfg) {
  validate_tpc_inputs(data, cfg);
  const TpcCostFn costs = cost_policy(data, cfg);

  // Forward phase with forced overshoot.
  TaskFit fit(data, 0);
  TpcState st(data);
  std::vector<int> snapshot;     // selection at the natural stopping point
  bool stopped = false;
  int forced = 0;
  while (cfg.max_features < 0 || st.q() < cfg.max_features) {
    Candidate cand = best_candidate(data, fit, st, costs, cfg.threads);
    if (cand.feature < 0) break;
    if (!(cand.delta_s > 0.0)) {
      if (!stopped) {
        stopped = true;
        snapshot = st.selected();
      }
      if (forced >= cfg.extra_steps) break;
      ++forced;
    }
    fit.add(cand.feature);
    st.accept(cand.feature);
  }
  if (!stopped) snapshot = st.selected();

  // Backward phase: drop whichever feature lowers the TDL the most, repeat.
  std::vector<int> current = st.selected();
  double current_tdl = replay_tdl(data, current, costs);
  for (;;) {
    double best_tdl = current_tdl;
    int best_pos = -1;
    for (std::size_t p = 0; p < current.size(); ++p) {
      std::vector<int> without = current;
      without.erase(without.begin() + static_cast<std::ptrdiff_t>(p));
      const double tdl = replay_tdl(data, without, costs);
      if (tdl < best_tdl) {
        best_tdl = tdl;
        best_pos = static_cast<int>(p);
      }
    }
    if (best_pos < 0) break;
    current.erase(current.begin() + best_pos);
    current_tdl = best_tdl;
  }

  // Never return anything worse than the natural greedy stopping point.
  const double snapshot_tdl = replay_tdl(data, snapshot, costs);
  const std::vector<int>& winner = current_tdl < snapshot_tdl ? current : snapshot;
  return model_from_order(data, winner, costs, "tpc-fb");
}

SelectionModel run_tpc_streamwise(const Dataset& data, const TpcConfig& cfg,
                                  const std::vector<int>& order) {
  validate_tpc_inputs(data, cfg);
  const TpcCostFn costs = cost_policy(data, cfg);
  std::vector<int> visit = order;
  if (visit.empty()) {
    visit.resize(static_cast<std::size_t>(data.m));
    for (int j = 0; j < data.m; ++j) visit[static_cast<std::size_t>(j)] = j;
  } else {
    std::set<int> seen;
    for (int j : visit) {
      if (j < 0 || j >= data.m) {
        throw DimensionMismatch("stream order index out of range: " + std::to_string(j));
      }
      if (!seen.insert(j).second) {
        throw SpecError("stream order repeats feature " + std::to_string(j));
      }
    }
  }
  SelectionModel model;
  model.scheme = "tpc-stream";
  model.m = data.m;
  model.h = data.h;
  TaskFit fit(data, 0);
  TpcState st(data);
  for (int j : visit) {
    if (cfg.max_features >= 0 && st.q() >= cfg.max_features) break;
    bool singular = false;
    Candidate cand;
    cand.feature = j;
    cand.d_se = gain_bits(fit, j, &singular);
    if (singular) continue;
    cand.costs = costs(st, j);
    cand.delta_s = cand.d_se - cand.costs.total();
    if (!(cand.delta_s > 0.0)) continue;
    accept_into(&model, &fit, &st, data, cand);
  }
  finish_model(&model, fit);
  return model;
}

double tpc_savings(int q, int big_q, int big_k, int m,
                   const std::vector<int>& class_sizes,
                   const std::vector<int>& selected_class) {
  if (big_k < 1) throw DomainError("tpc_savings needs at least one class");
  if (static_cast<int>(class_sizes.size()) != big_k) {
    throw DimensionMismatch("class_sizes must have one entry per class");
  }
  if (static_cast<int>(selected_class.size()) != q) {
    throw DimensionMismatch("selected_class must have one entry per selected feature");
  }
  long long total = 0;
  for (int s : class_sizes) {
    if (s < 1) throw DomainError("class sizes must be >= 1");
    total += s;
  }
  if (total != m) throw DimensionMismatch("class sizes must sum to m");
  std::set<int> distinct;
  for (int c : selected_class) {
    if (c < 0 || c >= big_k) throw DimensionMismatch("selected class out of range");
    distinct.insert(c);
  }
  if (static_cast<int>(distinct.size()) != big_q) {
    throw DimensionMismatch("big_q must equal the number of distinct selected classes");
  }
  if (q == 0) return 0.0;

  const double l_theta = 2.0;
  const double flat = q * (std::log2(static_cast<double>(m)) + l_theta);
  double aware = big_q * std::log2(static_cast<double>(big_k)) +
                 (q - big_q) * std::log2(static_cast<double>(big_q)) + q * l_theta;
  for (int c : selected_class) {
    aware += std::log2(static_cast<double>(class_sizes[static_cast<std::size_t>(c)]));
  }
  return flat - aware;
}

}  // namespace mdlsel
