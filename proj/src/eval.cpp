#include "mdlsel/eval.hpp"

#include <chrono>
#include <cmath>

#include "mdlsel/errors.hpp"
#include "mdlsel/rng.hpp"

namespace mdlsel {

std::vector<EvalRow> run_eval(const EvalConfig& cfg) {
  if (cfg.replicates < 1) throw SpecError("eval needs at least 1 replicate");
  if (cfg.scenarios.empty() || cfg.schemes.empty()) {
    throw SpecError("eval needs at least one scenario and one scheme");
  }
  std::vector<EvalRow> rows;
  for (Scenario scn : cfg.scenarios) {
    // One stream of dataset seeds per scenario, shared by all schemes.
    Rng seeder = Rng::stream(cfg.seed, scenario_name(scn));
    for (int rep = 0; rep < cfg.replicates; ++rep) {
      const std::uint64_t dataset_seed = seeder.next_u64();
      ScenarioSpec spec = cfg.base;
      spec.scenario = scn;
      spec.seed = dataset_seed;
      spec.binarize = true;
      auto [data, truth] = generate(spec);
      for (SchemeKind scheme : cfg.schemes) {
        const auto t0 = std::chrono::steady_clock::now();
        MethodConfig method;
        method.scheme = scheme;
        method.set_threads(cfg.threads);

        EvalRow row;
        row.scenario = scn;
        row.scheme = scheme;
        row.replicate = rep;
        row.dataset_seed = dataset_seed;

        const SelectionModel model = run_selection(data, method);
        const BoolMat picked = model.support_matrix();
        row.coef_pr = precision_recall(picked, truth, PrLevel::coefficient);
        row.feat_pr = precision_recall(picked, truth, PrLevel::feature);
        row.n_coef = model.coefficients_selected();
        row.n_feat = static_cast<int>(model.feature_union().size());

        CvOptions cv;
        cv.folds = cfg.folds;
        cv.seed = dataset_seed;
        cv.threads = cfg.threads;
        const CvResult r = cross_validate(data, method, cv);
        row.task_error = r.task_error;
        row.test_error = r.mean_error();
        row.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

MeanStderr mean_stderr(const std::vector<double>& values) {
  MeanStderr out;
  const std::size_t n = values.size();
  if (n == 0) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(n);
  if (n == 1) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  out.se = sd / std::sqrt(static_cast<double>(n));
  return out;
}

std::vector<double> pooled_task_errors(const std::vector<EvalRow>& rows,
                                       SchemeKind scheme, Scenario scenario) {
  std::vector<double> out;
  for (const EvalRow& row : rows) {
    if (row.scheme != scheme || row.scenario != scenario) continue;
    out.insert(out.end(), row.task_error.begin(), row.task_error.end());
  }
  return out;
}

}  // namespace mdlsel
