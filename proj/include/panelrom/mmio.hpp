#pragma once

#include <iosfwd>
#include <string>

#include "panelrom/types.hpp"

namespace panelrom {

// Matrix Market I/O. Sparse symmetric matrices use the coordinate format
// with only the lower triangle stored; dense matrices use the array format.
// Streaming variants exist so matrices can be embedded in container files.

void write_matrix_market(std::ostream& os, const SpMat& m, bool symmetric);
void write_matrix_market(std::ostream& os, const Mat& m);
SpMat read_matrix_market_sparse(std::istream& is);
Mat read_matrix_market_dense(std::istream& is);

void write_matrix_market_file(const std::string& path, const SpMat& m, bool symmetric);
void write_matrix_market_file(const std::string& path, const Mat& m);
SpMat read_matrix_market_sparse_file(const std::string& path);
Mat read_matrix_market_dense_file(const std::string& path);

} // namespace panelrom
