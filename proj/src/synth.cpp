#include "mdlsel/synth.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mdlsel/errors.hpp"
#include "mdlsel/fit.hpp"
#include "mdlsel/rng.hpp"

namespace mdlsel {

const char* scenario_name(Scenario s) {
  switch (s) {
    case Scenario::partial: return "partial";
    case Scenario::full: return "full";
    case Scenario::independent: return "independent";
  }
  return "?";
}

std::optional<Scenario> scenario_from_name(std::string_view name) {
  for (Scenario s : {Scenario::partial, Scenario::full, Scenario::independent}) {
    if (name == scenario_name(s)) return s;
  }
  return std::nullopt;
}

namespace {

std::string padded_name(const char* prefix, int index, int count) {
  int width = 1;
  for (int v = count - 1; v >= 10; v /= 10) ++width;
  std::string digits = std::to_string(index);
  std::string out(prefix);
  out.append(static_cast<std::size_t>(width) - std::min<std::size_t>(width, digits.size()), '0');
  out += digits;
  return out;
}

// True-support layout per scenario; one column of the indicator per response.
BoolMat layout_support(const ScenarioSpec& spec, Rng* rng) {
  BoolMat sup(spec.m, spec.h);
  switch (spec.scenario) {
    case Scenario::full:
      for (int t = 0; t < spec.h; ++t) {
        for (int i = 0; i < spec.m_star; ++i) sup.at(i, t) = 1;
      }
      break;
    case Scenario::independent:
      for (int t = 0; t < spec.h; ++t) {
        for (int j : rng->sample_without_replacement(spec.m, spec.m_star)) sup.at(j, t) = 1;
      }
      break;
    case Scenario::partial: {
      for (int i = 0; i < spec.m_star; ++i) {
        // Feature i is shared by the first ceil(h * (m_star - i) / m_star)
        // responses, so feature 0 spans all of them and each later feature
        // spans one step fewer.
        const int span =
            (spec.h * (spec.m_star - i) + spec.m_star - 1) / spec.m_star;
        for (int t = 0; t < span && t < spec.h; ++t) sup.at(i, t) = 1;
      }
      for (int t = 0; t < spec.h; ++t) {
        int have = 0;
        for (int i = 0; i < spec.m_star; ++i) have += sup.at(i, t);
        const int deficit = spec.m_star - have;
        if (deficit == 0) continue;
        if (spec.m - spec.m_star < deficit) {
          throw SpecError("partial scenario needs m - m_star >= " + std::to_string(deficit));
        }
        // Fill from the non-shared pool, distinct within the response.
        for (int pick : rng->sample_without_replacement(spec.m - spec.m_star, deficit)) {
          sup.at(spec.m_star + pick, t) = 1;
        }
      }
      break;
    }
  }
  return sup;
}

}  // namespace

std::pair<Dataset, GroundTruth> generate(const ScenarioSpec& spec) {
  if (spec.n < 2) throw SpecError("generate needs n >= 2");
  if (spec.m < 1) throw SpecError("generate needs m >= 1");
  if (spec.h < 1) throw SpecError("generate needs h >= 1");
  if (spec.m_star < 1 || spec.m_star > spec.m) {
    throw SpecError("generate needs 1 <= m_star <= m");
  }
  if (!(spec.noise_sd > 0.0)) throw SpecError("generate needs noise_sd > 0");

  Dataset data;
  data.n = spec.n;
  data.m = spec.m;
  data.h = spec.h;
  data.x.resize(static_cast<std::size_t>(spec.n) * spec.m);
  data.y.resize(static_cast<std::size_t>(spec.n) * spec.h);
  data.feature_names.reserve(static_cast<std::size_t>(spec.m));
  for (int j = 0; j < spec.m; ++j) data.feature_names.push_back(padded_name("f", j, spec.m));
  for (int t = 0; t < spec.h; ++t) data.task_names.push_back(padded_name("y", t, spec.h));

  // Independent draw streams: the support layout cannot shift the design or
  // noise draws between scenarios.
  Rng xs = Rng::stream(spec.seed, "x");
  Rng ss = Rng::stream(spec.seed, "support");
  Rng bs = Rng::stream(spec.seed, "beta");
  Rng es = Rng::stream(spec.seed, "eps");

  for (double& v : data.x) v = xs.normal();

  GroundTruth truth;
  truth.support = layout_support(spec, &ss);
  truth.beta.assign(static_cast<std::size_t>(spec.m) * spec.h, 0.0);
  for (int t = 0; t < spec.h; ++t) {
    for (int j = 0; j < spec.m; ++j) {
      if (truth.support.at(j, t)) {
        truth.beta[static_cast<std::size_t>(t) * spec.m + j] = bs.normal();
      }
    }
  }

  truth.threshold.assign(static_cast<std::size_t>(spec.h), 0.0);
  for (int t = 0; t < spec.h; ++t) {
    double* yt = data.y.data() + static_cast<std::size_t>(t) * spec.n;
    for (int i = 0; i < spec.n; ++i) yt[i] = es.normal(0.0, spec.noise_sd);
    for (int j = 0; j < spec.m; ++j) {
      const double b = truth.beta[static_cast<std::size_t>(t) * spec.m + j];
      if (b == 0.0) continue;
      const double* xj = data.col_x(j);
      for (int i = 0; i < spec.n; ++i) yt[i] += b * xj[i];
    }
    double mean = 0.0;
    for (int i = 0; i < spec.n; ++i) mean += yt[i];
    mean /= spec.n;
    truth.threshold[static_cast<std::size_t>(t)] = mean;
    if (spec.binarize) {
      for (int i = 0; i < spec.n; ++i) yt[i] = yt[i] >= mean ? 1.0 : 0.0;
    }
  }
  return {std::move(data), std::move(truth)};
}

void assign_contiguous_classes(Dataset* data, int num_classes) {
  if (num_classes < 1 || num_classes > data->m) {
    throw SpecError("class count must be in [1, m]");
  }
  data->class_of.assign(static_cast<std::size_t>(data->m), 0);
  data->class_names.clear();
  data->class_sizes.assign(static_cast<std::size_t>(num_classes), 0);
  for (int c = 0; c < num_classes; ++c) {
    data->class_names.push_back(padded_name("c", c, num_classes));
  }
  const int base = data->m / num_classes;
  const int extra = data->m % num_classes;
  int j = 0;
  for (int c = 0; c < num_classes; ++c) {
    const int size = base + (c < extra ? 1 : 0);
    for (int i = 0; i < size; ++i, ++j) {
      data->class_of[static_cast<std::size_t>(j)] = c;
    }
    data->class_sizes[static_cast<std::size_t>(c)] = size;
  }
}

PrResult precision_recall(const BoolMat& selected, const GroundTruth& truth,
                          PrLevel level) {
  if (selected.m != truth.support.m || selected.h != truth.support.h) {
    throw ShapeMismatch("selection indicator and truth have different shapes");
  }
  long tp = 0, fp = 0, fn = 0;
  if (level == PrLevel::coefficient) {
    for (std::size_t i = 0; i < selected.v.size(); ++i) {
      const bool s = selected.v[i] != 0;
      const bool g = truth.support.v[i] != 0;
      tp += s && g;
      fp += s && !g;
      fn += !s && g;
    }
  } else {
    for (int j = 0; j < selected.m; ++j) {
      bool s = false, g = false;
      for (int t = 0; t < selected.h; ++t) {
        s = s || selected.at(j, t) != 0;
        g = g || truth.support.at(j, t) != 0;
      }
      tp += s && g;
      fp += s && !g;
      fn += !s && g;
    }
  }
  PrResult out;
  out.precision = (tp + fp) == 0 ? 1.0 : static_cast<double>(tp) / (tp + fp);
  out.recall = (tp + fn) == 0 ? 1.0 : static_cast<double>(tp) / (tp + fn);
  return out;
}

double CvResult::mean_error() const {
  if (task_error.empty()) return 0.0;
  double s = 0.0;
  for (double e : task_error) s += e;
  return s / static_cast<double>(task_error.size());
}

CvResult cross_validate(const Dataset& data, const MethodConfig& method,
                        const CvOptions& opts) {
  data.validate();
  if (opts.folds < 2) throw SpecError("cross-validation needs at least 2 folds");
  if (opts.folds > data.n) throw FoldTooSmall("more folds than rows");
  for (double v : data.y) {
    if (v != 0.0 && v != 1.0) {
      throw DomainError("cross-validation needs 0/1 responses");
    }
  }

  // Fold assignment: shuffled round-robin; single-response data is dealt
  // per label so folds stay balanced.
  std::vector<int> fold_of(static_cast<std::size_t>(data.n), -1);
  Rng rng = Rng::stream(opts.seed, "cv");
  if (data.h == 1) {
    std::vector<int> by_label[2];
    const double* y = data.col_y(0);
    for (int i = 0; i < data.n; ++i) {
      by_label[y[i] == 1.0 ? 1 : 0].push_back(i);
    }
    int next = 0;
    for (std::vector<int>& rows : by_label) {
      rng.shuffle(rows);
      for (int r : rows) fold_of[static_cast<std::size_t>(r)] = (next++) % opts.folds;
    }
  } else {
    std::vector<int> rows(static_cast<std::size_t>(data.n));
    for (int i = 0; i < data.n; ++i) rows[static_cast<std::size_t>(i)] = i;
    rng.shuffle(rows);
    for (int i = 0; i < data.n; ++i) {
      fold_of[static_cast<std::size_t>(rows[static_cast<std::size_t>(i)])] = i % opts.folds;
    }
  }

  // Every fold must show both labels for every response, or error rates on
  // the held-out fold stop being meaningful.
  for (int t = 0; t < data.h; ++t) {
    const double* y = data.col_y(t);
    for (int f = 0; f < opts.folds; ++f) {
      bool has0 = false, has1 = false;
      for (int i = 0; i < data.n; ++i) {
        if (fold_of[static_cast<std::size_t>(i)] != f) continue;
        (y[i] == 1.0 ? has1 : has0) = true;
      }
      if (!has0 || !has1) {
        throw FoldTooSmall("fold " + std::to_string(f) + " is single-class for response " +
                           std::to_string(t));
      }
    }
  }

  CvResult result;
  result.task_error.assign(static_cast<std::size_t>(data.h), 0.0);
  std::vector<int> mistakes(static_cast<std::size_t>(data.h), 0);

  for (int f = 0; f < opts.folds; ++f) {
    std::vector<int> train_rows, test_rows;
    for (int i = 0; i < data.n; ++i) {
      (fold_of[static_cast<std::size_t>(i)] == f ? test_rows : train_rows).push_back(i);
    }
    const Dataset train = data.subset_rows(train_rows);
    const SelectionModel model = run_selection(train, method);
    const auto support = model.per_task_support();
    for (int t = 0; t < data.h; ++t) {
      const std::vector<int>& feats = support[static_cast<std::size_t>(t)];
      LogisticFit lf = refit_logistic(train, feats, t);
      if (lf.separation) ++result.separation_flags;
      const double* y = data.col_y(t);
      for (int r : test_rows) {
        const double p = logistic_prob(lf, data, feats, r);
        const double pred = p >= 0.5 ? 1.0 : 0.0;
        if (pred != y[r]) ++mistakes[static_cast<std::size_t>(t)];
      }
    }
  }
  for (int t = 0; t < data.h; ++t) {
    result.task_error[static_cast<std::size_t>(t)] =
        static_cast<double>(mistakes[static_cast<std::size_t>(t)]) / data.n;
  }
  return result;
}

}  // namespace mdlsel
