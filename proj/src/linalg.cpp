// Copyright 2026 The DGE Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dge/linalg.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "dge/error.hpp"

namespace dge {

namespace {

void check_dims(bool ok, const char* op, std::size_t ar, std::size_t ac, std::size_t br,
                std::size_t bc) {
  if (!ok) {
    fail(ErrorKind::kInvalidArgument,
         std::string(op) + ": dimension mismatch (" + std::to_string(ar) + "x" +
             std::to_string(ac) + " vs " + std::to_string(br) + "x" + std::to_string(bc) + ")");
  }
}

constexpr char kMatrixMagic[8] = {'D', 'G', 'E', 'M', 'A', 'T', '0', '1'};

static_assert(std::endian::native == std::endian::little,
              "matrix snapshots assume a little-endian host");

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  require(data_.size() == rows_ * cols_, ErrorKind::kInvalidArgument,
          "DenseMatrix: data length does not match dimensions");
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

void DenseMatrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool DenseMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), row_offsets_(rows + 1, 0) {}

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                         std::vector<Triplet> triplets, bool keep_zeros) {
  for (const auto& t : triplets) {
    require(t.row < rows && t.col < cols, ErrorKind::kInvalidArgument,
            "SparseMatrix: triplet out of range");
  }
  std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  SparseMatrix m(rows, cols);
  m.col_indices_.reserve(triplets.size());
  m.values_.reserve(triplets.size());
  std::size_t i = 0;
  while (i < triplets.size()) {
    const std::size_t r = triplets[i].row;
    const std::size_t c = triplets[i].col;
    double sum = 0.0;
    while (i < triplets.size() && triplets[i].row == r && triplets[i].col == c) {
      sum += triplets[i].value;
      ++i;
    }
    if (sum == 0.0 && !keep_zeros) continue;
    m.col_indices_.push_back(c);
    m.values_.push_back(sum);
    ++m.row_offsets_[r + 1];
  }
  for (std::size_t r = 0; r < rows; ++r) m.row_offsets_[r + 1] += m.row_offsets_[r];
  return m;
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  SparseMatrix m(n, n);
  m.col_indices_.resize(n);
  m.values_.assign(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    m.col_indices_[i] = i;
    m.row_offsets_[i + 1] = i + 1;
  }
  return m;
}

SparseMatrix SparseMatrix::from_dense(const DenseMatrix& d) {
  std::vector<Triplet> t;
  for (std::size_t r = 0; r < d.rows(); ++r) {
    for (std::size_t c = 0; c < d.cols(); ++c) {
      if (d(r, c) != 0.0) t.push_back({r, c, d(r, c)});
    }
  }
  return from_triplets(d.rows(), d.cols(), std::move(t));
}

double SparseMatrix::at(std::size_t r, std::size_t c) const {
  auto cols = row_cols(r);
  auto it = std::lower_bound(cols.begin(), cols.end(), c);
  if (it == cols.end() || *it != c) return 0.0;
  return values_[row_offsets_[r] + static_cast<std::size_t>(it - cols.begin())];
}

DenseMatrix SparseMatrix::to_dense() const {
  DenseMatrix d(rows_, cols_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
      d(r, col_indices_[k]) = values_[k];
    }
  }
  return d;
}

std::vector<Triplet> SparseMatrix::to_triplets() const {
  std::vector<Triplet> t;
  t.reserve(nnz());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
      t.push_back({r, col_indices_[k], values_[k]});
    }
  }
  return t;
}

bool SparseMatrix::is_symmetric(double tol) const {
  if (rows_ != cols_) return false;
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
      if (std::abs(values_[k] - at(col_indices_[k], r)) > tol) return false;
    }
  }
  return true;
}

DenseMatrix spmm(const SparseMatrix& s, const DenseMatrix& d) {
  check_dims(s.cols() == d.rows(), "spmm", s.rows(), s.cols(), d.rows(), d.cols());
  DenseMatrix out(s.rows(), d.cols());
  const std::size_t n = d.cols();
  for (std::size_t r = 0; r < s.rows(); ++r) {
    auto cols = s.row_cols(r);
    auto vals = s.row_values(r);
    double* dst = out.row(r).data();
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const double v = vals[k];
      const double* src = d.row(cols[k]).data();
      for (std::size_t j = 0; j < n; ++j) dst[j] += v * src[j];
    }
  }
  return out;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  check_dims(a.cols() == b.rows(), "matmul", a.rows(), a.cols(), b.rows(), b.cols());
  DenseMatrix out(a.rows(), b.cols());
  const std::size_t n = b.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* dst = out.row(i).data();
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double v = a(i, k);
      if (v == 0.0) continue;
      const double* src = b.row(k).data();
      for (std::size_t j = 0; j < n; ++j) dst[j] += v * src[j];
    }
  }
  return out;
}

DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b) {
  check_dims(a.rows() == b.rows(), "matmul_tn", a.rows(), a.cols(), b.rows(), b.cols());
  DenseMatrix out(a.cols(), b.cols());
  const std::size_t n = b.cols();
  for (std::size_t k = 0; k < a.rows(); ++k) {
    const double* src = b.row(k).data();
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double v = a(k, i);
      if (v == 0.0) continue;
      double* dst = out.row(i).data();
      for (std::size_t j = 0; j < n; ++j) dst[j] += v * src[j];
    }
  }
  return out;
}

DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b) {
  check_dims(a.cols() == b.cols(), "matmul_nt", a.rows(), a.cols(), b.rows(), b.cols());
  DenseMatrix out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.rows(); ++j) out(i, j) = dot(a.row(i), b.row(j));
  }
  return out;
}

DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  }
  return out;
}

DenseMatrix relu(const DenseMatrix& d) {
  DenseMatrix out = d;
  for (double& v : out.values()) v = v > 0.0 ? v : 0.0;
  return out;
}

DenseMatrix relu_mask_backward(const DenseMatrix& upstream, const DenseMatrix& pre_activation) {
  check_dims(upstream.rows() == pre_activation.rows() && upstream.cols() == pre_activation.cols(),
             "relu_mask_backward", upstream.rows(), upstream.cols(), pre_activation.rows(),
             pre_activation.cols());
  DenseMatrix out = upstream;
  auto& v = out.values();
  const auto& p = pre_activation.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (p[i] <= 0.0) v[i] = 0.0;
  }
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), ErrorKind::kInvalidArgument, "dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  check_dims(a.rows() == b.rows() && a.cols() == b.cols(), "max_abs_diff", a.rows(), a.cols(),
             b.rows(), b.cols());
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a.values()[i] - b.values()[i]));
  }
  return m;
}

void write_matrix(std::ostream& out, const DenseMatrix& m) {
  const std::uint64_t dims[2] = {m.rows(), m.cols()};
  out.write(kMatrixMagic, sizeof(kMatrixMagic));
  out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
  out.write(reinterpret_cast<const char*>(m.values().data()),
            static_cast<std::streamsize>(m.size() * sizeof(double)));
  require(static_cast<bool>(out), ErrorKind::kIo, "write_matrix: stream failure");
}

DenseMatrix read_matrix(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof(magic));
  require(in && std::memcmp(magic, kMatrixMagic, sizeof(magic)) == 0, ErrorKind::kParse,
          "read_matrix: bad magic tag");
  std::uint64_t dims[2];
  in.read(reinterpret_cast<char*>(dims), sizeof(dims));
  require(static_cast<bool>(in), ErrorKind::kParse, "read_matrix: truncated header");
  std::vector<double> data(dims[0] * dims[1]);
  in.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(data.size() * sizeof(double)));
  require(static_cast<bool>(in), ErrorKind::kParse, "read_matrix: truncated payload");
  return DenseMatrix(dims[0], dims[1], std::move(data));
}

void save_matrix(const std::string& path, const DenseMatrix& m) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::kIo, "cannot open for writing: " + path);
  write_matrix(out, m);
}

DenseMatrix load_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::kIo, "cannot open: " + path);
  return read_matrix(in);
}

}  // namespace dge
