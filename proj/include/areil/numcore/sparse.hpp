// Copyright 2026 The AREIL Authors
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

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "areil/error.hpp"
#include "areil/numcore/matrix.hpp"

namespace areil {

// Compressed sparse row matrix. Column indices are sorted within each row.
struct CsrMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::uint32_t> col_idx;
  std::vector<double> values;

  std::size_t nnz() const noexcept { return col_idx.size(); }
  std::size_t row_begin(std::size_t r) const { return row_ptr[r]; }
  std::size_t row_end(std::size_t r) const { return row_ptr[r + 1]; }
  std::size_t row_length(std::size_t r) const { return row_ptr[r + 1] - row_ptr[r]; }

  DenseMatrix to_dense() const {
    DenseMatrix out(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t e = row_ptr[r]; e < row_ptr[r + 1]; ++e) out(r, col_idx[e]) = values[e];
    return out;
  }
};

// out = a * x. Each output row is summed in column order, so the result does
// not depend on how rows are scheduled across threads.
inline void spmm_into(const CsrMatrix& a, const DenseMatrix& x, DenseMatrix& out) {
  if (x.rows() != a.cols) {
    throw ShapeError("spmm: sparse (" + std::to_string(a.rows) + "x" + std::to_string(a.cols) +
                     ") * dense " + x.shape_string());
  }
  if (out.rows() != a.rows || out.cols() != x.cols()) out = DenseMatrix(a.rows, x.cols());
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(a.rows);
  const std::size_t width = x.cols();
#pragma omp parallel for schedule(static) if (a.nnz() * width > 65536)
  for (std::ptrdiff_t r = 0; r < n; ++r) {
    double* dst = out.data() + static_cast<std::size_t>(r) * width;
    std::fill(dst, dst + width, 0.0);
    for (std::size_t e = a.row_ptr[r]; e < a.row_ptr[r + 1]; ++e) {
      const double w = a.values[e];
      const double* src = x.data() + static_cast<std::size_t>(a.col_idx[e]) * width;
      for (std::size_t j = 0; j < width; ++j) dst[j] += w * src[j];
    }
  }
}

inline DenseMatrix spmm(const CsrMatrix& a, const DenseMatrix& x) {
  DenseMatrix out;
  spmm_into(a, x, out);
  return out;
}

}  // namespace areil
