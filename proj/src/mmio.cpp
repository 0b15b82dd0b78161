#include "panelrom/mmio.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "panelrom/error.hpp"
#include "panelrom/util.hpp"

namespace panelrom {

namespace {

std::string next_content_line(std::istream& is) {
  std::string line;
  while (std::getline(is, line)) {
    std::string t = trim(line);
    if (t.empty() || t[0] == '%') continue;
    return t;
  }
  fail(ErrCode::io, "unexpected end of Matrix Market stream");
}

} // namespace

void write_matrix_market(std::ostream& os, const SpMat& m, bool symmetric) {
  os << "%%MatrixMarket matrix coordinate real " << (symmetric ? "symmetric" : "general") << "\n";
  Index nnz = 0;
  for (Index k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it)
      if (!symmetric || it.row() >= it.col()) ++nnz;
  os << m.rows() << " " << m.cols() << " " << nnz << "\n";
  for (Index k = 0; k < m.outerSize(); ++k)
    for (SpMat::InnerIterator it(m, k); it; ++it) {
      if (symmetric && it.row() < it.col()) continue;
      os << (it.row() + 1) << " " << (it.col() + 1) << " " << format_full(it.value()) << "\n";
    }
}

void write_matrix_market(std::ostream& os, const Mat& m) {
  os << "%%MatrixMarket matrix array real general\n";
  os << m.rows() << " " << m.cols() << "\n";
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i) os << format_full(m(i, j)) << "\n";
}

SpMat read_matrix_market_sparse(std::istream& is) {
  std::string header;
  std::getline(is, header);
  require(header.rfind("%%MatrixMarket", 0) == 0, ErrCode::io, "missing MatrixMarket header");
  bool symmetric = header.find("symmetric") != std::string::npos;
  require(header.find("coordinate") != std::string::npos, ErrCode::io, "expected coordinate format");
  std::istringstream sz(next_content_line(is));
  Index rows, cols, nnz;
  sz >> rows >> cols >> nnz;
  require(sz && rows > 0 && cols > 0 && nnz >= 0, ErrCode::io, "bad MatrixMarket size line");
  std::vector<Triplet> trips;
  trips.reserve(static_cast<std::size_t>(symmetric ? 2 * nnz : nnz));
  for (Index k = 0; k < nnz; ++k) {
    std::istringstream ln(next_content_line(is));
    Index i, j;
    double v;
    ln >> i >> j >> v;
    require(ln && i >= 1 && i <= rows && j >= 1 && j <= cols, ErrCode::io, "bad MatrixMarket entry");
    trips.emplace_back(i - 1, j - 1, v);
    if (symmetric && i != j) trips.emplace_back(j - 1, i - 1, v);
  }
  SpMat m(rows, cols);
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

Mat read_matrix_market_dense(std::istream& is) {
  std::string header;
  std::getline(is, header);
  require(header.rfind("%%MatrixMarket", 0) == 0, ErrCode::io, "missing MatrixMarket header");
  require(header.find("array") != std::string::npos, ErrCode::io, "expected array format");
  std::istringstream sz(next_content_line(is));
  Index rows, cols;
  sz >> rows >> cols;
  require(sz && rows >= 0 && cols >= 0, ErrCode::io, "bad MatrixMarket size line");
  Mat m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      std::istringstream ln(next_content_line(is));
      double v;
      ln >> v;
      require(static_cast<bool>(ln), ErrCode::io, "bad MatrixMarket array entry");
      m(i, j) = v;
    }
  return m;
}

void write_matrix_market_file(const std::string& path, const SpMat& m, bool symmetric) {
  std::ofstream os(path);
  require(os.good(), ErrCode::io, "cannot write " + path);
  write_matrix_market(os, m, symmetric);
}

void write_matrix_market_file(const std::string& path, const Mat& m) {
  std::ofstream os(path);
  require(os.good(), ErrCode::io, "cannot write " + path);
  write_matrix_market(os, m);
}

SpMat read_matrix_market_sparse_file(const std::string& path) {
  std::ifstream is(path);
  require(is.good(), ErrCode::io, "cannot read " + path);
  return read_matrix_market_sparse(is);
}

Mat read_matrix_market_dense_file(const std::string& path) {
  std::ifstream is(path);
  require(is.good(), ErrCode::io, "cannot read " + path);
  return read_matrix_market_dense(is);
}

} // namespace panelrom
