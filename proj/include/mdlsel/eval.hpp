#pragma once

#include <cstdint>
#include <vector>

#include "mdlsel/synth.hpp"

// Replicated benchmark harness: for each (scenario, replicate) it draws one
// dataset (shared by every scheme, so comparisons are paired), runs each
// scheme once on the full data for support recovery, and cross-validates for
// test error.

namespace mdlsel {

struct EvalConfig {
  std::vector<Scenario> scenarios{Scenario::partial, Scenario::full,
                                  Scenario::independent};
  std::vector<SchemeKind> schemes{SchemeKind::partial_mic, SchemeKind::full_mic,
                                  SchemeKind::ric};
  int replicates = 5;
  int folds = 5;
  ScenarioSpec base;       // n, m, h, m_star, noise_sd (scenario/seed overridden)
  std::uint64_t seed = 0;  // master seed; replicate seeds derive from it
  int threads = 1;
};

struct EvalRow {
  Scenario scenario = Scenario::partial;
  SchemeKind scheme = SchemeKind::partial_mic;
  int replicate = 0;
  std::uint64_t dataset_seed = 0;
  double test_error = 0.0;          // mean over responses
  std::vector<double> task_error;   // per response
  PrResult coef_pr;                 // coefficient-level recovery (full data)
  PrResult feat_pr;                 // feature-level recovery (full data)
  int n_coef = 0;                   // (feature, response) inclusions
  int n_feat = 0;                   // distinct features
  double wall_seconds = 0.0;
};

std::vector<EvalRow> run_eval(const EvalConfig& cfg);

struct MeanStderr {
  double mean = 0.0;
  double se = 0.0;  // sample standard deviation / sqrt(count)
};

MeanStderr mean_stderr(const std::vector<double>& values);

// Per-response errors of every matching row, concatenated (the aggregation
// unit for the benchmark tables: replicates x responses values).
std::vector<double> pooled_task_errors(const std::vector<EvalRow>& rows,
                                       SchemeKind scheme, Scenario scenario);

}  // namespace mdlsel
