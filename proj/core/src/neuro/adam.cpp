#include "dmpred/neuro/adam.hpp"

#include <cmath>

namespace dmpred::nn {

void adam_update(Matrix& param, const Matrix& grad, AdamMoments& mo, std::int64_t step, const AdamOptions& opt) {
  if (!param.same_shape(grad)) {
    throw ShapeError("Adam: parameter " + param.shape_str() + " vs gradient " + grad.shape_str());
  }
  if (!mo.m.same_shape(param)) mo.m = Matrix(param.rows, param.cols);
  if (!mo.v.same_shape(param)) mo.v = Matrix(param.rows, param.cols);
  if (step < 1) throw std::invalid_argument("Adam step counter starts at 1");
  const double c1 = 1.0 - std::pow(opt.beta1, static_cast<double>(step));
  const double c2 = 1.0 - std::pow(opt.beta2, static_cast<double>(step));
  const double step_size = opt.lr / c1;
  const double sqrt_c2 = std::sqrt(c2);
  for (std::size_t i = 0; i < param.data.size(); ++i) {
    const double g = grad.data[i];
    mo.m.data[i] = opt.beta1 * mo.m.data[i] + (1.0 - opt.beta1) * g;
    mo.v.data[i] = opt.beta2 * mo.v.data[i] + (1.0 - opt.beta2) * g * g;
    // PyTorch form: lr / c1 * m / (sqrt(v) / sqrt(c2) + eps).
    param.data[i] -= step_size * mo.m.data[i] / (std::sqrt(mo.v.data[i]) / sqrt_c2 + opt.eps);
  }
}

Adam::Adam(ParamList params, AdamOptions options)
    : params_(std::move(params)), moments_(params_.size()), options_(options) {}

void Adam::step() {
  ++step_;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Tensor& t = params_[i].tensor;
    adam_update(t.mutable_value(), t.grad(), moments_[i], step_, options_);
  }
}

void Adam::zero_grad() {
  for (auto& p : params_) p.tensor.zero_grad();
}

}  // namespace dmpred::nn
