#include "dmpred/neuro/tensor.hpp"

#include <algorithm>
#include <unordered_set>

namespace dmpred::nn {
namespace {

thread_local bool g_grad_enabled = true;

}  // namespace

Matrix::Matrix(std::size_t r, std::size_t c, std::vector<double> values) : rows(r), cols(c), data(std::move(values)) {
  if (data.size() != r * c) {
    throw ShapeError("matrix " + std::to_string(r) + "x" + std::to_string(c) + " given " +
                     std::to_string(data.size()) + " values");
  }
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m;
  m.rows = rows.size();
  m.cols = rows.size() == 0 ? 0 : rows.begin()->size();
  for (const auto& r : rows) {
    if (r.size() != m.cols) throw ShapeError("ragged matrix literal");
    m.data.insert(m.data.end(), r.begin(), r.end());
  }
  return m;
}

std::string Matrix::shape_str() const { return "[" + std::to_string(rows) + "x" + std::to_string(cols) + "]"; }

Matrix& Node::grad_buffer() {
  if (!value.same_shape(grad)) grad = Matrix(value.rows, value.cols);
  return grad;
}

void Tensor::zero_grad() {
  auto& g = node_->grad_buffer();
  std::fill(g.data.begin(), g.data.end(), 0.0);
}

double Tensor::item() const {
  if (value().size() != 1) throw ShapeError("item() on non-scalar " + value().shape_str());
  return value().data[0];
}

Tensor parameter(Matrix value) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  n->requires_grad = true;
  return Tensor(std::move(n));
}

Tensor constant(Matrix value) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  return Tensor(std::move(n));
}

Tensor scalar(double v) { return constant(Matrix(1, 1, v)); }

Tensor make_result(Matrix value, std::vector<Tensor> parents, std::function<void(Node&)> backward_fn) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  if (g_grad_enabled) {
    const bool needs = std::any_of(parents.begin(), parents.end(), [](const Tensor& p) { return p.requires_grad(); });
    if (needs) {
      n->requires_grad = true;
      n->parents.reserve(parents.size());
      for (auto& p : parents) n->parents.push_back(p.node());
      n->backward_fn = std::move(backward_fn);
    }
  }
  return Tensor(std::move(n));
}

void backward(const Tensor& output) {
  if (output.value().rows != 1 || output.value().cols != 1) {
    throw ShapeError("backward() needs a scalar output, got " + output.value().shape_str());
  }
  Node* root = output.node().get();
  if (!root->requires_grad) return;

  // Iterative post-order DFS gives a topological order.
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<std::pair<Node*, std::size_t>> stack{{root, 0}};
  seen.insert(root);
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node* p = node->parents[next++].get();
      if (p->requires_grad && seen.insert(p).second) stack.emplace_back(p, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  for (Node* n : order) {
    if (!n->is_leaf()) {
      auto& g = n->grad_buffer();
      std::fill(g.data.begin(), g.data.end(), 0.0);
    }
  }
  root->grad_buffer().data[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (n->backward_fn) n->backward_fn(*n);
  }
}

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

bool grad_enabled() { return g_grad_enabled; }

}  // namespace dmpred::nn
