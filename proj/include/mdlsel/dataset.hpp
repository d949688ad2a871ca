#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace mdlsel {

// Dense design matrix with one or more response columns and optional feature
// classes.  Storage is column-major so a feature column or response column is
// contiguous for the kernels.
struct Dataset {
  int n = 0;  // rows
  int m = 0;  // features
  int h = 0;  // responses (tasks)

  std::vector<double> x;  // n*m, x[j*n + i]
  std::vector<double> y;  // n*h, y[t*n + i]

  std::vector<std::string> feature_names;  // size m
  std::vector<std::string> task_names;     // size h

  // Feature classes (optional; required by the class-aware schemes).
  std::vector<int> class_of;             // size m when present, values in [0, K)
  std::vector<std::string> class_names;  // size K
  std::vector<int> class_sizes;          // size K, all >= 1

  bool has_classes() const { return !class_of.empty(); }
  int num_classes() const { return static_cast<int>(class_names.size()); }

  const double* col_x(int j) const {
    return x.data() + static_cast<std::size_t>(j) * static_cast<std::size_t>(n);
  }
  const double* col_y(int t) const {
    return y.data() + static_cast<std::size_t>(t) * static_cast<std::size_t>(n);
  }

  // Checks all structural invariants; throws DimensionMismatch / SpecError.
  void validate() const;

  // Row subset (rows given as 0-based indices, kept in the given order).
  Dataset subset_rows(const std::vector<int>& rows) const;

  // Index of a feature name; throws UnknownFeature when absent.
  int feature_index(const std::string& name) const;
};

}  // namespace mdlsel
