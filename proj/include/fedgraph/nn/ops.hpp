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

#pragma once

#include "fedgraph/common/tensor.hpp"

namespace fedgraph::nn {

// A * B
Tensor matmul(const Tensor& a, const Tensor& b);
// A^T * B
Tensor matmul_tn(const Tensor& a, const Tensor& b);
// A * B^T
Tensor matmul_nt(const Tensor& a, const Tensor& b);

// Adds the 1 x cols row vector to every row.
void add_row_vector(Tensor& x, const Tensor& row);
// Column sums as a 1 x cols tensor.
Tensor column_sums(const Tensor& x);

void add_inplace(Tensor& x, const Tensor& y);
void scale_inplace(Tensor& x, double s);
// x += s * y
void axpy(Tensor& x, double s, const Tensor& y);
// Frobenius inner product.
double dot(const Tensor& a, const Tensor& b);

}  // namespace fedgraph::nn
