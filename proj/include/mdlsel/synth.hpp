#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "mdlsel/dataset.hpp"
#include "mdlsel/model.hpp"
#include "mdlsel/select.hpp"

// Synthetic multi-response benchmark generator and scoring utilities.
//
// Designs are iid standard normal; each response is a sparse linear signal
// plus Gaussian noise, thresholded at its column mean into 0/1 labels.  The
// three scenarios differ only in how the m_star true features per response
// are laid out across responses:
//   partial      feature i of the first m_star is shared by the first
//                ceil(h * (m_star - i) / m_star) responses; each response's
//                remaining slots are filled with its own random features
//   full         the same m_star features drive every response
//   independent  every response draws its own m_star features

namespace mdlsel {

enum class Scenario { partial, full, independent };

const char* scenario_name(Scenario s);
std::optional<Scenario> scenario_from_name(std::string_view name);

struct ScenarioSpec {
  Scenario scenario = Scenario::partial;
  int n = 100;
  int m = 2000;
  int h = 20;
  int m_star = 4;
  double noise_sd = 0.31622776601683794;  // variance 0.1
  std::uint64_t seed = 0;
  bool binarize = true;  // false: keep the continuous responses
};

struct GroundTruth {
  BoolMat support;           // m x h true-feature indicator
  std::vector<double> beta;  // m*h coefficients, column-major by task
  std::vector<double> threshold;  // per-task binarization cut (column mean)
};

// Deterministic in (spec.seed, spec): independent draw streams for the
// design, the support layout, the coefficients, and the noise.
std::pair<Dataset, GroundTruth> generate(const ScenarioSpec& spec);

// Assigns contiguous equal classes c0, c1, ... (sizes differ by at most one
// when num_classes does not divide m) — a convenience for class-aware runs
// on generated data.
void assign_contiguous_classes(Dataset* data, int num_classes);

enum class PrLevel { coefficient, feature };

struct PrResult {
  double precision = 1.0;
  double recall = 0.0;
};

// Precision/recall of a selection against the truth, at the (feature, task)
// coefficient level or the distinct-feature level.  Conventions: an empty
// selection has precision 1 and recall 0; an empty truth has recall 1.
PrResult precision_recall(const BoolMat& selected, const GroundTruth& truth,
                          PrLevel level);

struct CvOptions {
  int folds = 5;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct CvResult {
  std::vector<double> task_error;  // per-response misclassification, pooled over folds
  int separation_flags = 0;        // logistic refits that hit separation
  double mean_error() const;
};

// K-fold cross-validated test error: selection and the logistic refit see
// only the training folds; the held-out fold is scored at threshold 0.5.
// Responses must be 0/1.  Single-response data is stratified by label.
// Throws FoldTooSmall when some fold ends up single-class for some response.
CvResult cross_validate(const Dataset& data, const MethodConfig& method,
                        const CvOptions& opts);

}  // namespace mdlsel
