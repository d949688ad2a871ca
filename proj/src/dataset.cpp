#include "mdlsel/dataset.hpp"

#include <cmath>
#include <unordered_map>

#include "mdlsel/errors.hpp"

namespace mdlsel {

void Dataset::validate() const {
  if (n < 2) throw SpecError("dataset needs at least 2 rows, got " + std::to_string(n));
  if (m < 1) throw SpecError("dataset needs at least 1 feature");
  if (h < 1) throw SpecError("dataset needs at least 1 response");
  auto expect = [](std::size_t got, std::size_t want, const char* what) {
    if (got != want) {
      throw DimensionMismatch(std::string(what) + ": expected " + std::to_string(want) +
                              " entries, got " + std::to_string(got));
    }
  };
  expect(x.size(), static_cast<std::size_t>(n) * m, "design matrix");
  expect(y.size(), static_cast<std::size_t>(n) * h, "response matrix");
  expect(feature_names.size(), static_cast<std::size_t>(m), "feature names");
  expect(task_names.size(), static_cast<std::size_t>(h), "task names");
  for (double v : x) {
    if (!std::isfinite(v)) throw DomainError("design matrix contains a non-finite value");
  }
  for (double v : y) {
    if (!std::isfinite(v)) throw DomainError("response matrix contains a non-finite value");
  }
  if (has_classes()) {
    expect(class_of.size(), static_cast<std::size_t>(m), "class map");
    if (class_names.size() != class_sizes.size()) {
      throw DimensionMismatch("class names and class sizes disagree");
    }
    const int k = num_classes();
    std::vector<int> seen(static_cast<std::size_t>(k), 0);
    for (int c : class_of) {
      if (c < 0 || c >= k) throw DimensionMismatch("class index out of range");
      ++seen[static_cast<std::size_t>(c)];
    }
    for (int c = 0; c < k; ++c) {
      if (seen[static_cast<std::size_t>(c)] != class_sizes[static_cast<std::size_t>(c)]) {
        throw DimensionMismatch("class size does not match its member count: " +
                                class_names[static_cast<std::size_t>(c)]);
      }
      if (class_sizes[static_cast<std::size_t>(c)] < 1) {
        throw DimensionMismatch("empty feature class: " + class_names[static_cast<std::size_t>(c)]);
      }
    }
  }
}

Dataset Dataset::subset_rows(const std::vector<int>& rows) const {
  Dataset out;
  out.n = static_cast<int>(rows.size());
  out.m = m;
  out.h = h;
  out.feature_names = feature_names;
  out.task_names = task_names;
  out.class_of = class_of;
  out.class_names = class_names;
  out.class_sizes = class_sizes;
  out.x.resize(static_cast<std::size_t>(out.n) * m);
  out.y.resize(static_cast<std::size_t>(out.n) * h);
  for (int r : rows) {
    if (r < 0 || r >= n) throw DimensionMismatch("row index out of range: " + std::to_string(r));
  }
  for (int j = 0; j < m; ++j) {
    const double* src = col_x(j);
    double* dst = out.x.data() + static_cast<std::size_t>(j) * out.n;
    for (int i = 0; i < out.n; ++i) dst[i] = src[rows[static_cast<std::size_t>(i)]];
  }
  for (int t = 0; t < h; ++t) {
    const double* src = col_y(t);
    double* dst = out.y.data() + static_cast<std::size_t>(t) * out.n;
    for (int i = 0; i < out.n; ++i) dst[i] = src[rows[static_cast<std::size_t>(i)]];
  }
  return out;
}

int Dataset::feature_index(const std::string& name) const {
  for (int j = 0; j < m; ++j) {
    if (feature_names[static_cast<std::size_t>(j)] == name) return j;
  }
  throw UnknownFeature(name);
}

}  // namespace mdlsel
