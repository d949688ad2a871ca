#include "mdlsel/mic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mdlsel/errors.hpp"
#include "mdlsel/threads.hpp"

namespace mdlsel {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Per-candidate screening row: residual-bit gain for each response plus
// eligibility (saturated or collinear responses cannot take the feature).
struct GainRow {
  std::vector<double> bits;      // size h, 0 where ineligible
  std::vector<char> eligible;    // size h
  double total = 0.0;            // sum over eligible responses
};

GainRow gain_row(const std::vector<TaskFit>& state, int feature) {
  const int h = static_cast<int>(state.size());
  GainRow row;
  row.bits.assign(static_cast<std::size_t>(h), 0.0);
  row.eligible.assign(static_cast<std::size_t>(h), 0);
  for (int t = 0; t < h; ++t) {
    const TaskFit& f = state[static_cast<std::size_t>(t)];
    if (f.saturated()) continue;
    TaskFit::Gain g = f.gain(feature);
    if (g.singular) continue;
    const double before = std::max(f.rss(), f.rss_floor());
    const double after = std::max(f.rss() - g.drss, f.rss_floor());
    row.bits[static_cast<std::size_t>(t)] = 0.5 * f.n() * std::log2(before / after);
    row.eligible[static_cast<std::size_t>(t)] = 1;
    row.total += row.bits[static_cast<std::size_t>(t)];
  }
  return row;
}

// Subset search over one candidate's cached gain row.
SubsetChoice best_subset_from_row(const GainRow& row, const MicSearchConfig& cfg,
                                  int m, int h, double incumbent_delta) {
  SubsetChoice best;
  best.delta_s = kNegInf;

  std::vector<int> order;
  for (int t = 0; t < h; ++t) {
    if (row.eligible[static_cast<std::size_t>(t)]) order.push_back(t);
  }
  if (order.empty()) return best;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    double ga = row.bits[static_cast<std::size_t>(a)];
    double gb = row.bits[static_cast<std::size_t>(b)];
    if (ga != gb) return ga > gb;
    return a < b;
  });
  const int emax = static_cast<int>(order.size());
  std::vector<double> prefix(static_cast<std::size_t>(emax) + 1, 0.0);
  for (int i = 0; i < emax; ++i) {
    prefix[static_cast<std::size_t>(i) + 1] =
        prefix[static_cast<std::size_t>(i)] + row.bits[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])];
  }

  codes::MicCostParams params{m, h, cfg.l_theta};

  if (cfg.scheme == codes::MicScheme::full) {
    // One inclusion pays for a coefficient in every response; the feature is
    // attached to every response that can take it.
    const double cost = codes::mic_model_cost(codes::MicScheme::full, h, params);
    best.d_se = prefix[static_cast<std::size_t>(emax)];
    best.d_sm = cost;
    best.delta_s = best.d_se - cost;
    best.k = emax;
    best.tasks = order;
    std::sort(best.tasks.begin(), best.tasks.end());
    best.feasible = true;
    return best;
  }

  int best_k = 0;
  for (int k = 1; k <= emax; ++k) {
    const double cost = codes::mic_model_cost(cfg.scheme, k, params);
    if (cfg.prune) {
      // Even the full residual gain cannot win at this size: it neither beats
      // the cross-candidate incumbent nor improves this candidate's best, so
      // skipping cannot change any outcome (strict improvement decides ties).
      const double ceiling = row.total - cost;
      if (ceiling <= incumbent_delta || ceiling <= best.delta_s) continue;
    }
    const double ds = prefix[static_cast<std::size_t>(k)] - cost;
    if (ds > best.delta_s) {
      best.delta_s = ds;
      best.d_se = prefix[static_cast<std::size_t>(k)];
      best.d_sm = cost;
      best_k = k;
    }
  }
  if (best_k == 0) {
    // All sizes pruned: report the k=1 evaluation so the caller still sees a
    // concrete (losing) choice.
    const double cost = codes::mic_model_cost(cfg.scheme, 1, params);
    best.delta_s = prefix[1] - cost;
    best.d_se = prefix[1];
    best.d_sm = cost;
    best_k = 1;
  }
  best.k = best_k;
  best.tasks.assign(order.begin(), order.begin() + best_k);
  std::sort(best.tasks.begin(), best.tasks.end());
  best.feasible = true;
  return best;
}

void validate_config(const MicSearchConfig& cfg) {
  if (cfg.top_t < 1) throw SpecError("top_t must be >= 1");
  if (cfg.l_theta < 0.0) throw SpecError("l_theta must be >= 0");
  if (cfg.threads < 1) throw SpecError("threads must be >= 1");
}

// Fitted coefficients of the final state, keyed by (feature name, task).
void fill_coefficients(const std::vector<TaskFit>& state, SelectionModel* model) {
  for (const TaskFit& f : state) {
    const std::vector<double> beta = f.coefficients();
    const std::vector<int>& sup = f.support();
    const std::vector<std::string>& names = f.dataset().feature_names;
    for (std::size_t i = 0; i < sup.size(); ++i) {
      model->coef[{names[static_cast<std::size_t>(sup[i])], f.task()}] = beta[i + 1];
    }
  }
}

double actual_dse(const std::vector<TaskFit>& state, const std::vector<int>& tasks,
                  const std::vector<double>& before_bits) {
  double dse = 0.0;
  for (int t : tasks) {
    const TaskFit& f = state[static_cast<std::size_t>(t)];
    dse += before_bits[static_cast<std::size_t>(t)] -
           residual_bits_floored(f.rss(), f.n(), f.rss_floor());
  }
  return dse;
}

SelectionModel run_ric(const Dataset& data, const MicSearchConfig& cfg) {
  SelectionModel model;
  model.scheme = "ric";
  model.m = data.m;
  model.h = data.h;
  std::vector<TaskFit> state;
  state.reserve(static_cast<std::size_t>(data.h));
  for (int t = 0; t < data.h; ++t) state.emplace_back(data, t);

  const double per_add_cost = std::log2(static_cast<double>(data.m)) + cfg.l_theta;
  for (int t = 0; t < data.h; ++t) {
    TaskFit& fit = state[static_cast<std::size_t>(t)];
    std::vector<char> used(static_cast<std::size_t>(data.m), 0);
    int accepted = 0;
    while (cfg.max_features < 0 || accepted < cfg.max_features) {
      if (fit.saturated()) break;
      const double before = residual_bits_floored(fit.rss(), fit.n(), fit.rss_floor());
      std::vector<double> gain(static_cast<std::size_t>(data.m), kNegInf);
      parallel_for(0, data.m, cfg.threads, [&](int j) {
        if (used[static_cast<std::size_t>(j)]) return;
        TaskFit::Gain g = fit.gain(j);
        if (g.singular) return;
        const double rb = std::max(fit.rss(), fit.rss_floor());
        const double ra = std::max(fit.rss() - g.drss, fit.rss_floor());
        gain[static_cast<std::size_t>(j)] = 0.5 * fit.n() * std::log2(rb / ra);
      });
      int best_j = -1;
      double best_gain = kNegInf;
      for (int j = 0; j < data.m; ++j) {
        if (gain[static_cast<std::size_t>(j)] > best_gain) {
          best_gain = gain[static_cast<std::size_t>(j)];
          best_j = j;
        }
      }
      if (best_j < 0 || !(best_gain - per_add_cost > 0.0)) break;
      fit.add(best_j);
      used[static_cast<std::size_t>(best_j)] = 1;
      ++accepted;
      const double after = residual_bits_floored(fit.rss(), fit.n(), fit.rss_floor());
      LedgerEntry e;
      e.feature = data.feature_names[static_cast<std::size_t>(best_j)];
      e.feature_idx = best_j;
      e.tasks = {t};
      e.d_se = before - after;
      e.costs = CodeCosts{std::log2(static_cast<double>(data.m)), 0.0, cfg.l_theta};
      e.d_sm = e.costs.total();
      model.ledger.push_back(std::move(e));
    }
  }
  fill_coefficients(state, &model);
  model.total_tdl = residual_bits(state) + model.model_bits();
  return model;
}

}  // namespace

std::vector<double> candidate_task_gains(const std::vector<TaskFit>& state, int feature) {
  return gain_row(state, feature).bits;
}

SubsetChoice best_subset_for_feature(const std::vector<TaskFit>& state, int feature,
                                     const MicSearchConfig& cfg, double incumbent_delta) {
  if (state.empty()) throw DimensionMismatch("empty fit state");
  const Dataset& data = state.front().dataset();
  GainRow row = gain_row(state, feature);
  return best_subset_from_row(row, cfg, data.m, static_cast<int>(state.size()),
                              incumbent_delta);
}

double lower_bound_prune(const std::vector<TaskFit>& state, int feature, int k,
                         const MicSearchConfig& cfg, double model_bits_so_far) {
  if (state.empty()) throw DimensionMismatch("empty fit state");
  GainRow row = gain_row(state, feature);
  codes::MicCostParams params{state.front().dataset().m, static_cast<int>(state.size()),
                              cfg.l_theta};
  const double tdl = residual_bits(state) + model_bits_so_far;
  return tdl - row.total + codes::mic_model_cost(cfg.scheme, k, params);
}

SelectionModel run_mic(const Dataset& data, const MicSearchConfig& cfg) {
  data.validate();
  validate_config(cfg);
  if (cfg.scheme == codes::MicScheme::ric) return run_ric(data, cfg);

  SelectionModel model;
  model.scheme = cfg.scheme == codes::MicScheme::partial ? "partial-mic" : "full-mic";
  model.m = data.m;
  model.h = data.h;

  std::vector<TaskFit> state;
  state.reserve(static_cast<std::size_t>(data.h));
  for (int t = 0; t < data.h; ++t) state.emplace_back(data, t);

  std::vector<char> used(static_cast<std::size_t>(data.m), 0);
  std::vector<GainRow> rows(static_cast<std::size_t>(data.m));
  int accepted = 0;

  while (cfg.max_features < 0 || accepted < cfg.max_features) {
    // Screening pass: residual gains for every remaining candidate.
    parallel_for(0, data.m, cfg.threads, [&](int j) {
      if (used[static_cast<std::size_t>(j)]) {
        rows[static_cast<std::size_t>(j)] = GainRow{};
        return;
      }
      rows[static_cast<std::size_t>(j)] = gain_row(state, j);
    });

    // Keep the top_t candidates by all-response gain (ties: lower index).
    std::vector<int> survivors;
    for (int j = 0; j < data.m; ++j) {
      if (!used[static_cast<std::size_t>(j)]) survivors.push_back(j);
    }
    if (survivors.empty()) break;
    if (static_cast<int>(survivors.size()) > cfg.top_t) {
      std::nth_element(survivors.begin(), survivors.begin() + cfg.top_t - 1, survivors.end(),
                       [&](int a, int b) {
                         double ta = rows[static_cast<std::size_t>(a)].total;
                         double tb = rows[static_cast<std::size_t>(b)].total;
                         if (ta != tb) return ta > tb;
                         return a < b;
                       });
      survivors.resize(static_cast<std::size_t>(cfg.top_t));
      std::sort(survivors.begin(), survivors.end());
    }

    // Subset search per survivor; ascending feature order makes the
    // lowest-index tie-break automatic under strict improvement.
    int best_j = -1;
    SubsetChoice best;
    best.delta_s = kNegInf;
    for (int j : survivors) {
      SubsetChoice c = best_subset_from_row(rows[static_cast<std::size_t>(j)], cfg,
                                            data.m, data.h, best.delta_s);
      if (c.feasible && c.delta_s > best.delta_s) {
        best = c;
        best_j = j;
      }
    }
    if (best_j < 0 || !(best.delta_s > 0.0)) break;

    // Accept: add the column to each chosen response and log the actual
    // residual-bit change (telescopes exactly across the ledger).
    std::vector<double> before_bits(static_cast<std::size_t>(data.h), 0.0);
    for (int t : best.tasks) {
      const TaskFit& f = state[static_cast<std::size_t>(t)];
      before_bits[static_cast<std::size_t>(t)] =
          residual_bits_floored(f.rss(), f.n(), f.rss_floor());
    }
    for (int t : best.tasks) state[static_cast<std::size_t>(t)].add(best_j);
    used[static_cast<std::size_t>(best_j)] = 1;
    ++accepted;

    LedgerEntry e;
    e.feature = data.feature_names[static_cast<std::size_t>(best_j)];
    e.feature_idx = best_j;
    e.tasks = best.tasks;
    e.d_se = actual_dse(state, best.tasks, before_bits);
    if (cfg.scheme == codes::MicScheme::partial) {
      e.costs = CodeCosts{std::log2(static_cast<double>(data.m)),
                          codes::l_h_subset(best.k, data.h),
                          best.k * cfg.l_theta};
    } else {
      e.costs = CodeCosts{std::log2(static_cast<double>(data.m)), 0.0,
                          data.h * cfg.l_theta};
    }
    e.d_sm = e.costs.total();
    model.ledger.push_back(std::move(e));
  }

  fill_coefficients(state, &model);
  model.total_tdl = residual_bits(state) + model.model_bits();
  return model;
}

}  // namespace mdlsel
