#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace dmpred::nn {

/// Dense row-major matrix of doubles. Vectors are 1 x n or n x 1 matrices.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}
  Matrix(std::size_t r, std::size_t c, std::vector<double> values);
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::size_t size() const { return data.size(); }
  bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
  std::string shape_str() const;
};

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// One value in the computation graph. Leaves are parameters or constants;
/// interior nodes remember their parents and how to push gradients to them.
struct Node {
  Matrix value;
  Matrix grad;  // empty until first written
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward_fn;
  bool requires_grad = false;

  bool is_leaf() const { return parents.empty(); }
  /// Gradient buffer, allocated as zeros on first use.
  Matrix& grad_buffer();
};

/// Shared handle to a graph node.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::shared_ptr<Node> node) : node_(std::move(node)) {}

  const Matrix& value() const { return node_->value; }
  Matrix& mutable_value() { return node_->value; }
  /// Gradient buffer (zeros when nothing was accumulated yet).
  const Matrix& grad() const { return node_->grad_buffer(); }
  void zero_grad();
  std::size_t rows() const { return node_->value.rows; }
  std::size_t cols() const { return node_->value.cols; }
  double item() const;
  bool requires_grad() const { return node_->requires_grad; }
  bool defined() const { return node_ != nullptr; }
  const std::shared_ptr<Node>& node() const { return node_; }

 private:
  std::shared_ptr<Node> node_;
};

/// Trainable leaf: gradients accumulate across backward() calls until
/// zero_grad().
Tensor parameter(Matrix value);
/// Leaf that never receives a gradient.
Tensor constant(Matrix value);
Tensor scalar(double v);

/// Interior node helper used by the operations. When no parent needs a
/// gradient (or gradient recording is off) the result is a constant and
/// `backward_fn` is dropped.
Tensor make_result(Matrix value, std::vector<Tensor> parents, std::function<void(Node&)> backward_fn);

/// Reverse-mode sweep from a 1 x 1 output. Interior gradients are reset on
/// every call; leaf gradients accumulate. Throws ShapeError for non-scalar
/// outputs.
void backward(const Tensor& output);

/// While alive, operations on this thread do not record the graph.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool grad_enabled();

}  // namespace dmpred::nn
