// Copyright 2026 The fedgraph Authors.
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

#include "fedgraph/nn/ops.hpp"

#include "fedgraph/common/error.hpp"

namespace fedgraph::nn {
namespace {

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::kShapeMismatch, what);
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  require(a.cols() == b.rows(), "matmul: inner dimensions differ");
  Tensor out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto dst = out.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double s = a(i, k);
      if (s == 0.0) continue;
      auto src = b.row(k);
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += s * src[j];
    }
  }
  return out;
}

Tensor matmul_tn(const Tensor& a, const Tensor& b) {
  require(a.rows() == b.rows(), "matmul_tn: row counts differ");
  Tensor out(a.cols(), b.cols());
  for (std::size_t k = 0; k < a.rows(); ++k) {
    auto src = b.row(k);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double s = a(k, i);
      if (s == 0.0) continue;
      auto dst = out.row(i);
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += s * src[j];
    }
  }
  return out;
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
  require(a.cols() == b.cols(), "matmul_nt: column counts differ");
  Tensor out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto ai = a.row(i);
    for (std::size_t j = 0; j < b.rows(); ++j) {
      auto bj = b.row(j);
      double s = 0.0;
      for (std::size_t k = 0; k < ai.size(); ++k) s += ai[k] * bj[k];
      out(i, j) = s;
    }
  }
  return out;
}

void add_row_vector(Tensor& x, const Tensor& row) {
  require(row.rows() == 1 && row.cols() == x.cols(), "add_row_vector: shape");
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto dst = x.row(i);
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += row(0, j);
  }
}

Tensor column_sums(const Tensor& x) {
  Tensor out(1, x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    auto src = x.row(i);
    for (std::size_t j = 0; j < src.size(); ++j) out(0, j) += src[j];
  }
  return out;
}

void add_inplace(Tensor& x, const Tensor& y) {
  require(x.same_shape(y), "add_inplace: shape");
  for (std::size_t i = 0; i < x.size(); ++i) x.data()[i] += y.data()[i];
}

void scale_inplace(Tensor& x, double s) {
  for (auto& v : x.data()) v *= s;
}

void axpy(Tensor& x, double s, const Tensor& y) {
  require(x.same_shape(y), "axpy: shape");
  for (std::size_t i = 0; i < x.size(); ++i) x.data()[i] += s * y.data()[i];
}

double dot(const Tensor& a, const Tensor& b) {
  require(a.same_shape(b), "dot: shape");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.data()[i] * b.data()[i];
  return s;
}

}  // namespace fedgraph::nn
