#pragma once

#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <vector>

#include "duoseg/common.hpp"

namespace duoseg {

// Dense row-major tensor. The last axis is contiguous; volumes use
// (d0, d1, d2) = (h, w, l) with l (the x axis) fastest, and network
// activations use (n, c, d0, d1, d2).
template <typename T>
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<int64_t> shape) : shape_(std::move(shape)) {
    data_.assign(size_t(count(shape_)), T(0));
  }
  Tensor(std::vector<int64_t> shape, T fill) : shape_(std::move(shape)) {
    data_.assign(size_t(count(shape_)), fill);
  }

  static int64_t count(const std::vector<int64_t>& s) {
    int64_t n = 1;
    for (int64_t d : s) n *= d;
    return n;
  }

  const std::vector<int64_t>& shape() const { return shape_; }
  int64_t dim(int i) const { return shape_[size_t(i)]; }
  int ndim() const { return int(shape_.size()); }
  int64_t numel() const { return int64_t(data_.size()); }
  bool empty() const { return data_.empty(); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  T& operator[](int64_t i) { return data_[size_t(i)]; }
  const T& operator[](int64_t i) const { return data_[size_t(i)]; }

  // 3-d accessor (h, w, l).
  T& at3(int64_t a, int64_t b, int64_t c) {
    return data_[size_t((a * shape_[1] + b) * shape_[2] + c)];
  }
  const T& at3(int64_t a, int64_t b, int64_t c) const {
    return data_[size_t((a * shape_[1] + b) * shape_[2] + c)];
  }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

  template <typename U>
  Tensor<U> cast() const {
    Tensor<U> out(shape_);
    for (int64_t i = 0; i < numel(); ++i) out[i] = U(data_[size_t(i)]);
    return out;
  }

 private:
  std::vector<int64_t> shape_;
  std::vector<T> data_;
};

}  // namespace duoseg
