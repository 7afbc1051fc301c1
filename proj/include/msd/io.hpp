#pragma once

#include <string>

#include "msd/matrix_core.hpp"

namespace msd {

/// Read a rectangular numeric CSV into a DataMatrix (rows = features,
/// columns = samples; swapped when transpose is set). Throws ParseError with
/// 1-based line/column positions on ragged rows, non-numeric cells, or
/// non-finite values.
DataMatrix load_matrix(const std::string& path, bool has_header = false,
                       bool transpose = false);

/// Write a matrix as CSV with round-trippable (17 significant digit) doubles.
void save_matrix(const DataMatrix& m, const std::string& path);

}  // namespace msd
