#pragma once

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace moistpe {

/// Dense 3D array stored row-major over (i, j, k) with k (pressure) fastest.
///
/// Columns are contiguous, which is the access pattern of every vertical
/// integral and tridiagonal solve in the model.
class Array3 {
 public:
  Array3() = default;
  Array3(std::size_t n0, std::size_t n1, std::size_t n2, double value = 0.0)
      : n0_(n0), n1_(n1), n2_(n2), data_(n0 * n1 * n2, value) {}

  [[nodiscard]] std::size_t n0() const { return n0_; }
  [[nodiscard]] std::size_t n1() const { return n1_; }
  [[nodiscard]] std::size_t n2() const { return n2_; }
  [[nodiscard]] std::size_t size() const { return data_.size(); }

  [[nodiscard]] std::size_t index(std::size_t i, std::size_t j, std::size_t k) const {
    assert(i < n0_ && j < n1_ && k < n2_);
    return (i * n1_ + j) * n2_ + k;
  }

  double& operator()(std::size_t i, std::size_t j, std::size_t k) { return data_[index(i, j, k)]; }
  double operator()(std::size_t i, std::size_t j, std::size_t k) const { return data_[index(i, j, k)]; }

  std::span<double> column(std::size_t i, std::size_t j) {
    return {data_.data() + (i * n1_ + j) * n2_, n2_};
  }
  [[nodiscard]] std::span<const double> column(std::size_t i, std::size_t j) const {
    return {data_.data() + (i * n1_ + j) * n2_, n2_};
  }

  std::span<double> values() { return data_; }
  [[nodiscard]] std::span<const double> values() const { return data_; }

  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

  [[nodiscard]] bool same_shape(const Array3& o) const {
    return n0_ == o.n0_ && n1_ == o.n1_ && n2_ == o.n2_;
  }

  bool operator==(const Array3&) const = default;

 private:
  std::size_t n0_ = 0, n1_ = 0, n2_ = 0;
  std::vector<double> data_;
};

/// Dense 2D array over (i, j), j fastest.
class Array2 {
 public:
  Array2() = default;
  Array2(std::size_t n0, std::size_t n1, double value = 0.0) : n0_(n0), n1_(n1), data_(n0 * n1, value) {}

  [[nodiscard]] std::size_t n0() const { return n0_; }
  [[nodiscard]] std::size_t n1() const { return n1_; }
  [[nodiscard]] std::size_t size() const { return data_.size(); }

  double& operator()(std::size_t i, std::size_t j) {
    assert(i < n0_ && j < n1_);
    return data_[i * n1_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    assert(i < n0_ && j < n1_);
    return data_[i * n1_ + j];
  }

  std::span<double> values() { return data_; }
  [[nodiscard]] std::span<const double> values() const { return data_; }

  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

  bool operator==(const Array2&) const = default;

 private:
  std::size_t n0_ = 0, n1_ = 0;
  std::vector<double> data_;
};

}  // namespace moistpe
