#include "mtlkd/nk/tensor.hpp"

#include <algorithm>
#include <stdexcept>

namespace mtlkd::nk {

Tensor::Tensor(std::size_t rows, std::size_t cols, std::vector<Real> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw std::invalid_argument("Tensor: data length " + std::to_string(data_.size()) +
                                " does not match shape " + shape_str());
  }
}

Tensor Tensor::identity(std::size_t n) {
  Tensor t(n, n);
  for (std::size_t i = 0; i < n; ++i) t(i, i) = 1;
  return t;
}

Real Tensor::item() const {
  if (data_.size() != 1) throw std::invalid_argument("item() on non-scalar tensor " + shape_str());
  return data_[0];
}

void Tensor::fill(Real v) { std::fill(data_.begin(), data_.end(), v); }

void Tensor::accumulate(const Tensor& other) {
  if (!same_shape(other)) {
    throw std::invalid_argument("accumulate: shape " + other.shape_str() + " vs " + shape_str());
  }
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
}

std::string Tensor::shape_str() const {
  return "(" + std::to_string(rows_) + "x" + std::to_string(cols_) + ")";
}

}  // namespace mtlkd::nk
