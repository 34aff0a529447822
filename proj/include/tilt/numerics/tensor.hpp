#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "tilt/check.hpp"

namespace tilt {

#ifdef TILT_REAL_DOUBLE
using real = double;  // gradient-check builds
#else
using real = float;
#endif

// Dense row-major tensor. Copies share storage; ops allocate fresh outputs
// and never write through their inputs. Mutable data() is reserved for
// writers that own the buffer (initializers, the optimizer between steps).
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<int> shape);

  static Tensor zeros(std::vector<int> shape) { return Tensor(std::move(shape)); }
  static Tensor full(std::vector<int> shape, real value);
  static Tensor from(std::vector<int> shape, std::vector<real> values);

  const std::vector<int>& shape() const { return shape_; }
  int ndim() const { return static_cast<int>(shape_.size()); }
  int dim(int i) const { return shape_[static_cast<size_t>(i)]; }
  int64_t size() const { return data_ ? static_cast<int64_t>(data_->size()) : 0; }
  bool defined() const { return data_ != nullptr; }
  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

  const real* data() const { return data_->data(); }
  real* data() { return data_->data(); }

  real operator[](int64_t i) const { return (*data_)[static_cast<size_t>(i)]; }
  real& operator[](int64_t i) { return (*data_)[static_cast<size_t>(i)]; }

  // 2D/3D element access, row-major
  real at(int i, int j) const { return (*data_)[static_cast<size_t>(i) * dim(1) + j]; }
  real& at(int i, int j) { return (*data_)[static_cast<size_t>(i) * dim(1) + j]; }
  real at(int i, int j, int k) const {
    return (*data_)[(static_cast<size_t>(i) * dim(1) + j) * dim(2) + k];
  }
  real& at(int i, int j, int k) {
    return (*data_)[(static_cast<size_t>(i) * dim(1) + j) * dim(2) + k];
  }

  void fill(real v);
  Tensor clone() const;  // deep copy, detached storage
  bool all_finite() const;
  bool equals(const Tensor& other) const;  // shape + bitwise values

 private:
  std::vector<int> shape_;
  std::shared_ptr<std::vector<real>> data_;
};

int64_t shape_numel(const std::vector<int>& shape);

}  // namespace tilt
