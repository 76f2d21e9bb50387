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

#include <gtest/gtest.h>

#include <sstream>

#include "dge/error.hpp"
#include "dge/linalg.hpp"
#include "test_util.hpp"

namespace dge {
namespace {

using testing::max_rel_diff;
using testing::naive_matmul;
using testing::naive_transpose;
using testing::random_dense;
using testing::to_rows;

TEST(SparseMatrix, TripletsAreSortedAndDuplicatesSummed) {
  auto s = SparseMatrix::from_triplets(2, 3, {{1, 2, 1.0}, {0, 1, 2.0}, {1, 2, 0.5}, {0, 0, 0.0}});
  EXPECT_EQ(s.nnz(), 2u);
  EXPECT_DOUBLE_EQ(s.at(1, 2), 1.5);
  EXPECT_DOUBLE_EQ(s.at(0, 1), 2.0);
  EXPECT_DOUBLE_EQ(s.at(0, 0), 0.0);
  auto kept = SparseMatrix::from_triplets(2, 3, {{0, 0, 0.0}}, true);
  EXPECT_EQ(kept.nnz(), 1u);
}

TEST(SparseMatrix, OutOfRangeTripletThrows) {
  EXPECT_THROW(SparseMatrix::from_triplets(2, 2, {{2, 0, 1.0}}), Error);
}

TEST(SparseMatrix, DenseRoundTrip) {
  std::mt19937_64 rng(3);
  auto s = testing::random_symmetric(12, 0.3, rng);
  EXPECT_EQ(SparseMatrix::from_dense(s.to_dense()), s);
  EXPECT_TRUE(s.is_symmetric());
}

TEST(Spmm, IdentityTimesDenseIsDense) {
  std::mt19937_64 rng(1);
  auto d = random_dense(7, 4, rng);
  EXPECT_EQ(spmm(SparseMatrix::identity(7), d), d);
}

TEST(Spmm, ZeroSparseGivesZero) {
  std::mt19937_64 rng(2);
  auto d = random_dense(5, 3, rng);
  auto z = spmm(SparseMatrix(5, 5), d);
  for (double v : z.values()) EXPECT_EQ(v, 0.0);
}

TEST(Spmm, MatchesTripleLoopOracle) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    auto dense_s = random_dense(10, 10, rng);
    for (auto& v : dense_s.values()) {
      if (std::abs(v) < 0.6) v = 0.0;
    }
    const auto s = SparseMatrix::from_dense(dense_s);
    const auto d = random_dense(10, 6, rng);
    EXPECT_LT(max_rel_diff(to_rows(spmm(s, d)), naive_matmul(to_rows(dense_s), to_rows(d))), 1e-12);
    // spmm with a dense copy of S equals matmul
    EXPECT_LT(max_abs_diff(spmm(s, d), matmul(s.to_dense(), d)), 1e-12);
  }
}

TEST(Spmm, ShapeMismatchThrows) {
  EXPECT_THROW(spmm(SparseMatrix::identity(3), DenseMatrix(4, 2)), Error);
}

TEST(Matmul, IdentityLeft) {
  std::mt19937_64 rng(4);
  auto b = random_dense(5, 3, rng);
  EXPECT_EQ(matmul(DenseMatrix::identity(5), b), b);
}

TEST(Matmul, MatchesOracleIncludingTransposedForms) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    auto a = random_dense(6, 4, rng);
    auto b = random_dense(4, 7, rng);
    auto c = random_dense(6, 7, rng);
    EXPECT_LT(max_rel_diff(to_rows(matmul(a, b)), naive_matmul(to_rows(a), to_rows(b))), 1e-12);
    EXPECT_LT(max_rel_diff(to_rows(matmul_tn(a, c)),
                           naive_matmul(naive_transpose(to_rows(a)), to_rows(c))),
              1e-12);
    EXPECT_LT(max_rel_diff(to_rows(matmul_nt(c, b)),
                           naive_matmul(to_rows(c), naive_transpose(to_rows(b)))),
              1e-12);
  }
}

TEST(Matmul, TransposeOfProduct) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    auto a = random_dense(5, 8, rng);
    auto b = random_dense(8, 3, rng);
    EXPECT_LT(max_abs_diff(transpose(matmul(a, b)), matmul(transpose(b), transpose(a))), 1e-12);
  }
}

TEST(Relu, ClampsNegatives) {
  DenseMatrix m(1, 2, std::vector<double>{-1.0, 2.0});
  EXPECT_EQ(relu(m), DenseMatrix(1, 2, std::vector<double>{0.0, 2.0}));
}

TEST(Relu, MaskBackwardZeroesAtAndBelowZero) {
  DenseMatrix pre(1, 3, std::vector<double>{-1.0, 0.0, 3.0});
  DenseMatrix up(1, 3, std::vector<double>{5.0, 6.0, 7.0});
  EXPECT_EQ(relu_mask_backward(up, pre), DenseMatrix(1, 3, std::vector<double>{0.0, 0.0, 7.0}));
}

TEST(Dot, Basic) {
  const std::vector<double> a{1, 2};
  const std::vector<double> b{3, 4};
  EXPECT_EQ(dot(a, b), 11.0);
}

TEST(Snapshot, RoundTripIsBitExact) {
  std::mt19937_64 rng(7);
  auto m = random_dense(9, 5, rng, -1e6, 1e6);
  m(0, 0) = 1.0 / 3.0;
  std::stringstream ss;
  write_matrix(ss, m);
  EXPECT_EQ(read_matrix(ss), m);
}

TEST(Snapshot, EmptyMatrixRoundTrip) {
  std::stringstream ss;
  write_matrix(ss, DenseMatrix());
  auto back = read_matrix(ss);
  EXPECT_EQ(back.rows(), 0u);
  EXPECT_EQ(back.cols(), 0u);
}

TEST(Snapshot, BadMagicAndTruncationThrow) {
  std::stringstream bad("NOTAMATRIX");
  EXPECT_THROW(read_matrix(bad), Error);
  std::stringstream ss;
  write_matrix(ss, DenseMatrix(3, 3, 1.0));
  auto bytes = ss.str();
  bytes.resize(bytes.size() - 4);
  std::stringstream cut(bytes);
  EXPECT_THROW(read_matrix(cut), Error);
}

}  // namespace
}  // namespace dge
