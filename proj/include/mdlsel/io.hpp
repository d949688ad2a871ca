#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mdlsel/dataset.hpp"
#include "mdlsel/model.hpp"
#include "mdlsel/transfer.hpp"

// Plain-text persistence.  All formats are line-based, support leading '#'
// comment lines (ignored by parsers and excluded from checksums), and save
// numbers with 17 significant digits so that save -> load -> save is
// byte-identical.  Exact grammars are documented in the README.

namespace mdlsel::io {

// Numeric table: header of column names, then one row per line.  The
// delimiter is auto-detected on load (tab if the header contains one, else
// comma).  Values must be finite; NaN / Inf / ragged rows / duplicate or
// empty column names are rejected, never coerced.
struct MatrixData {
  std::vector<std::string> col_names;
  int rows = 0;
  std::vector<double> values;  // column-major: values[c * rows + r]

  int cols() const { return static_cast<int>(col_names.size()); }
  double at(int r, int c) const { return values[static_cast<std::size_t>(c) * rows + r]; }
};

MatrixData load_matrix(const std::string& path);
void save_matrix(const std::string& path, const MatrixData& mat, char delim = ',',
                 const std::vector<std::string>& comments = {});

// Feature class map: one "feature<TAB>class" pair per line.
using ClassMap = std::vector<std::pair<std::string, std::string>>;

ClassMap load_classmap(const std::string& path);
void save_classmap(const std::string& path, const ClassMap& map,
                   const std::vector<std::string>& comments = {});

// Builds a validated Dataset from a design matrix, a response matrix, and an
// optional class map (classes ordered by first appearance; every feature
// must be mapped when a map is given).
Dataset assemble_dataset(const MatrixData& x, const MatrixData& y,
                         const ClassMap* classmap);

// Convenience: load x / y (and classmap unless empty) from files.
Dataset load_dataset(const std::string& x_path, const std::string& y_path,
                     const std::string& classmap_path = "");

// Selection model ledger file ("mdl-select model v1"): scheme, dimensions,
// one "add" record per acceptance, the fitted coefficients, the total
// description length, and a trailing content checksum.  Loading verifies the
// version line (VersionMismatch) and the checksum (ChecksumMismatch).
void save_model(const std::string& path, const SelectionModel& model,
                const std::vector<std::string>& comments = {});
SelectionModel load_model(const std::string& path);

// Transfer prior file ("transfer-prior v1"): hyperparameters plus the class
// and feature evidence counts.  Round-trips losslessly.
void save_prior(const std::string& path, const TransferPrior& prior,
                const std::vector<std::string>& comments = {});
TransferPrior load_prior(const std::string& path);

}  // namespace mdlsel::io
