#include "tilt/numerics/tensor.hpp"

#include <cmath>
#include <cstring>

namespace tilt {

int64_t shape_numel(const std::vector<int>& shape) {
  int64_t n = 1;
  for (int d : shape) {
    TILT_SHAPE_CHECK(d >= 0, "negative dimension " << d);
    n *= d;
  }
  return n;
}

Tensor::Tensor(std::vector<int> shape) : shape_(std::move(shape)) {
  data_ = std::make_shared<std::vector<real>>(static_cast<size_t>(shape_numel(shape_)), real(0));
}

Tensor Tensor::full(std::vector<int> shape, real value) {
  Tensor t(std::move(shape));
  t.fill(value);
  return t;
}

Tensor Tensor::from(std::vector<int> shape, std::vector<real> values) {
  TILT_SHAPE_CHECK(shape_numel(shape) == static_cast<int64_t>(values.size()),
                   "value count " << values.size() << " does not match shape");
  Tensor t;
  t.shape_ = std::move(shape);
  t.data_ = std::make_shared<std::vector<real>>(std::move(values));
  return t;
}

void Tensor::fill(real v) {
  for (real& x : *data_) x = v;
}

Tensor Tensor::clone() const {
  Tensor t;
  t.shape_ = shape_;
  t.data_ = data_ ? std::make_shared<std::vector<real>>(*data_) : nullptr;
  return t;
}

bool Tensor::all_finite() const {
  if (!data_) return true;
  for (real x : *data_) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

bool Tensor::equals(const Tensor& other) const {
  if (shape_ != other.shape_) return false;
  if (!data_ || !other.data_) return data_ == other.data_;
  return std::memcmp(data_->data(), other.data_->data(), data_->size() * sizeof(real)) == 0;
}

}  // namespace tilt
