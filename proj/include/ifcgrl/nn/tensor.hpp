#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ifcgrl::nn {

enum class NnErrorKind {
  shape_mismatch,
  batch_too_small,
  label_out_of_range,
};

class NnError : public std::runtime_error {
 public:
  NnError(NnErrorKind kind, const std::string& what) : std::runtime_error(what), kind(kind) {}
  NnErrorKind kind;
};

// Dense row-major tensor of 64-bit floats.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0)
      : shape_(std::move(shape)), data_(count(shape_), fill) {}

  static Tensor from(std::vector<std::size_t> shape, std::vector<double> data) {
    Tensor t;
    if (count(shape) != data.size()) {
      throw NnError(NnErrorKind::shape_mismatch, "data length does not match shape");
    }
    t.shape_ = std::move(shape);
    t.data_ = std::move(data);
    return t;
  }

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t i) const { return shape_[i]; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& raw() { return data_; }
  const std::vector<double>& raw() const { return data_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * shape_[1] + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * shape_[1] + j]; }
  double& operator()(std::size_t i, std::size_t j, std::size_t k) {
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }
  double operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }

  // Same data, new shape; element count must match.
  Tensor reshaped(std::vector<std::size_t> shape) const {
    if (count(shape) != data_.size()) {
      throw NnError(NnErrorKind::shape_mismatch, "reshape changes element count");
    }
    Tensor t;
    t.shape_ = std::move(shape);
    t.data_ = data_;
    return t;
  }

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

  void fill(double v) { data_.assign(data_.size(), v); }

 private:
  static std::size_t count(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    return shape.empty() ? 0 : n;
  }

  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

// Column-wise concat of two B x * matrices; hsplit is its inverse.
Tensor hcat(const Tensor& a, const Tensor& b);
std::pair<Tensor, Tensor> hsplit(const Tensor& x, std::size_t cols_a);

// Runs fn over [0, n) in contiguous chunks, possibly on several threads.
// Each index is processed exactly once by exactly one thread, so any
// per-index output is bit-deterministic regardless of the thread count
// (set IFC_GRL_THREADS to cap it; default: logical cores).
void parallel_for(std::size_t n, std::size_t grain,
                  const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace ifcgrl::nn
