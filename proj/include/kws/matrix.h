// kws/matrix.h

// Copyright 2026  kwsearch contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef KWS_MATRIX_H_
#define KWS_MATRIX_H_

#include <cassert>
#include <cstddef>
#include <vector>

namespace kws {

// Dense row-major matrix. Rank-1 data (biases, score rows) is a 1xN matrix.
template <typename S>
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}
  Matrix(int rows, int cols, S fill = S(0))
      : rows_(rows), cols_(cols),
        data_(static_cast<size_t>(rows) * cols, fill) {
    assert(rows >= 0 && cols >= 0);
  }

  int Rows() const { return rows_; }
  int Cols() const { return cols_; }
  size_t Size() const { return data_.size(); }
  bool Empty() const { return data_.empty(); }

  S& operator()(int r, int c) {
    assert(r >= 0 && r < rows_ && c >= 0 && c < cols_);
    return data_[static_cast<size_t>(r) * cols_ + c];
  }
  S operator()(int r, int c) const {
    assert(r >= 0 && r < rows_ && c >= 0 && c < cols_);
    return data_[static_cast<size_t>(r) * cols_ + c];
  }

  S* Row(int r) { return data_.data() + static_cast<size_t>(r) * cols_; }
  const S* Row(int r) const { return data_.data() + static_cast<size_t>(r) * cols_; }
  S* Data() { return data_.data(); }
  const S* Data() const { return data_.data(); }

  void Resize(int rows, int cols) {
    rows_ = rows;
    cols_ = cols;
    data_.assign(static_cast<size_t>(rows) * cols, S(0));
  }
  void SetZero() { data_.assign(data_.size(), S(0)); }

  bool operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

  template <typename T>
  Matrix<T> Cast() const {
    Matrix<T> out(rows_, cols_);
    for (size_t i = 0; i < data_.size(); ++i) out.Data()[i] = static_cast<T>(data_[i]);
    return out;
  }

  // Rows in reverse order (time reversal for backward-direction recurrences).
  Matrix Reversed() const {
    Matrix out(rows_, cols_);
    for (int r = 0; r < rows_; ++r) {
      const S* src = Row(rows_ - 1 - r);
      S* dst = out.Row(r);
      for (int c = 0; c < cols_; ++c) dst[c] = src[c];
    }
    return out;
  }

 private:
  int rows_, cols_;
  std::vector<S> data_;
};

}  // namespace kws

#endif  // KWS_MATRIX_H_
