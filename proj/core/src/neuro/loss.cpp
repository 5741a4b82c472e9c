#include "dmpred/neuro/loss.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dmpred/neuro/ops.hpp"

namespace dmpred::nn {
namespace {

std::size_t total_rows(const std::vector<std::size_t>& lengths) {
  if (lengths.empty()) throw ShapeError("loss over an empty batch");
  for (std::size_t n : lengths) {
    if (n == 0) throw ShapeError("example with an empty suffix");
  }
  return std::accumulate(lengths.begin(), lengths.end(), std::size_t{0});
}

// B x R matrix averaging each example's rows.
Matrix averaging_matrix(const std::vector<std::size_t>& lengths, std::size_t rows) {
  Matrix a(lengths.size(), rows);
  std::size_t r = 0;
  for (std::size_t b = 0; b < lengths.size(); ++b)
    for (std::size_t k = 0; k < lengths[b]; ++k) a(b, r++) = 1.0 / static_cast<double>(lengths[b]);
  return a;
}

double clamp_prob(double p) { return std::clamp(p, kProbClamp, 1.0 - kProbClamp); }

}  // namespace

const std::vector<LossWeights>& loss_weight_grid() {
  static const std::vector<LossWeights> grid = {{1, 1, 1}, {2, 2, 1}, {1, 1, 2}};
  return grid;
}

Tensor mse_loss(const Tensor& pred, const std::vector<double>& gold) {
  if (gold.empty()) throw ShapeError("MSE over an empty batch");
  if (pred.rows() != gold.size() || pred.cols() != 1) {
    throw ShapeError("MSE prediction " + pred.value().shape_str() + " vs " + std::to_string(gold.size()) + " labels");
  }
  return mean(square(sub(pred, constant(Matrix(gold.size(), 1, gold)))));
}

Tensor sce_loss(const Tensor& probs, const std::vector<int>& labels, const std::vector<std::size_t>& lengths) {
  const std::size_t rows = total_rows(lengths);
  if (probs.rows() != rows || probs.cols() != 1 || labels.size() != rows) {
    throw ShapeError("SCE: " + std::to_string(labels.size()) + " labels, " + probs.value().shape_str() +
                     " probabilities, " + std::to_string(rows) + " suffix trials");
  }
  Matrix wy(rows, 1), wn(rows, 1);
  const double batch = static_cast<double>(lengths.size());
  std::size_t r = 0;
  for (std::size_t len : lengths) {
    for (std::size_t k = 0; k < len; ++k, ++r) {
      const double w = 1.0 / (static_cast<double>(len) * batch);
      (labels[r] != 0 ? wy : wn).data[r] = w;
    }
  }
  const Tensor p = clamp(probs, kProbClamp, 1.0 - kProbClamp);
  const Tensor pos = mul(log(p), constant(std::move(wy)));
  const Tensor neg = mul(log(add_scalar(scale(p, -1.0), 1.0)), constant(std::move(wn)));
  return scale(sum(add(pos, neg)), -1.0);
}

Tensor mstrcre_loss(const Tensor& rates, const Tensor& probs, const std::vector<std::size_t>& lengths) {
  const std::size_t rows = total_rows(lengths);
  if (rates.rows() != lengths.size() || rates.cols() != 1 || probs.rows() != rows || probs.cols() != 1) {
    throw ShapeError("MSTRCRE: shapes " + rates.value().shape_str() + " and " + probs.value().shape_str());
  }
  const Tensor trial_mean = matmul(constant(averaging_matrix(lengths, rows)), probs);
  return mean(square(sub(rates, trial_mean)));
}

Tensor trcrl_loss(const Tensor& mse, const Tensor& sce, const Tensor& mstrcre, const LossWeights& w) {
  return add(add(scale(mse, w.alpha), scale(sce, w.beta)), scale(mstrcre, w.gamma));
}

double mse_value(const std::vector<double>& pred, const std::vector<double>& gold) {
  if (pred.empty() || pred.size() != gold.size()) throw ShapeError("MSE needs equal, non-empty batches");
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += (pred[i] - gold[i]) * (pred[i] - gold[i]);
  return s / static_cast<double>(pred.size());
}

double sce_value(const std::vector<std::vector<double>>& probs, const std::vector<std::vector<int>>& labels) {
  if (probs.empty() || probs.size() != labels.size()) throw ShapeError("SCE needs equal, non-empty batches");
  double total = 0.0;
  for (std::size_t b = 0; b < probs.size(); ++b) {
    if (probs[b].empty() || probs[b].size() != labels[b].size()) throw ShapeError("SCE suffix length mismatch");
    double s = 0.0;
    for (std::size_t k = 0; k < probs[b].size(); ++k) {
      const double p = clamp_prob(probs[b][k]);
      s -= labels[b][k] != 0 ? std::log(p) : std::log(1.0 - p);
    }
    total += s / static_cast<double>(probs[b].size());
  }
  return total / static_cast<double>(probs.size());
}

namespace {

double mstrcre_impl(const std::vector<double>& rates, const std::vector<std::vector<double>>& probs, bool argmax) {
  if (rates.empty() || rates.size() != probs.size()) throw ShapeError("MSTRCRE needs equal, non-empty batches");
  double total = 0.0;
  for (std::size_t b = 0; b < rates.size(); ++b) {
    if (probs[b].empty()) throw ShapeError("MSTRCRE over an empty suffix");
    double m = 0.0;
    for (double p : probs[b]) m += argmax ? (p >= 0.5 ? 1.0 : 0.0) : p;
    m /= static_cast<double>(probs[b].size());
    total += (rates[b] - m) * (rates[b] - m);
  }
  return total / static_cast<double>(rates.size());
}

}  // namespace

double mstrcre_value(const std::vector<double>& rates, const std::vector<std::vector<double>>& probs) {
  return mstrcre_impl(rates, probs, false);
}

double mstrcre_argmax_value(const std::vector<double>& rates, const std::vector<std::vector<double>>& probs) {
  return mstrcre_impl(rates, probs, true);
}

double trcrl_value(double mse, double sce, double mstrcre, const LossWeights& w) {
  return w.alpha * mse + w.beta * sce + w.gamma * mstrcre;
}

}  // namespace dmpred::nn
