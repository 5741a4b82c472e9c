#include "dmpred/models/svr.hpp"

#include <cmath>
#include <limits>

namespace dmpred {
namespace {

constexpr double kTau = 1e-12;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double eval_kernel(const KernelSpec& k, double gamma, std::span<const double> a, std::span<const double> b) {
  switch (k.kind) {
    case KernelKind::Linear: return dot(a, b);
    case KernelKind::Poly: return std::pow(gamma * dot(a, b), k.degree);
    case KernelKind::Rbf: {
      double d2 = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
      return std::exp(-gamma * d2);
    }
  }
  return 0.0;
}

}  // namespace

double gamma_scale(const std::vector<std::vector<double>>& x) {
  if (x.empty() || x.front().empty()) return 1.0;
  double sum = 0.0, sq = 0.0;
  std::size_t n = 0;
  for (const auto& row : x)
    for (double v : row) {
      sum += v;
      sq += v * v;
      ++n;
    }
  const double mean = sum / static_cast<double>(n);
  const double var = sq / static_cast<double>(n) - mean * mean;
  if (var <= 1e-15) return 1.0;
  return 1.0 / (static_cast<double>(x.front().size()) * var);
}

double SvrModel::kernel(std::span<const double> a, std::span<const double> b) const {
  return eval_kernel(kernel_, gamma_, a, b);
}

SvrModel SvrModel::train(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
                         const SvrParams& params) {
  if (x.empty()) throw ValidationError("SVR needs at least one training example");
  if (x.size() != y.size()) throw ValidationError("SVR: feature and target counts differ");
  for (const auto& row : x) {
    if (row.size() != x.front().size()) throw ValidationError("SVR: ragged feature matrix");
  }
  SvrModel model;
  model.kernel_ = params.kernel;
  model.gamma_ = gamma_scale(x);

  // Variables 0..l-1 are alpha (sign +1), l..2l-1 are alpha* (sign -1).
  const std::size_t l = x.size();
  const std::size_t n = 2 * l;
  std::vector<double> K(l * l);
  for (std::size_t i = 0; i < l; ++i)
    for (std::size_t j = i; j < l; ++j) K[i * l + j] = K[j * l + i] = model.kernel(x[i], x[j]);

  const double C = params.c;
  std::vector<signed char> sign(n);
  std::vector<double> alpha(n, 0.0), grad(n), qd(n);
  for (std::size_t i = 0; i < l; ++i) {
    sign[i] = 1;
    sign[i + l] = -1;
    grad[i] = params.epsilon - y[i];
    grad[i + l] = params.epsilon + y[i];
    qd[i] = qd[i + l] = K[i * l + i];
  }
  auto q = [&](std::size_t i, std::size_t j) { return sign[i] * sign[j] * K[(i % l) * l + (j % l)]; };
  auto at_upper = [&](std::size_t i) { return alpha[i] >= C; };
  auto at_lower = [&](std::size_t i) { return alpha[i] <= 0.0; };

  long iter = 0;
  for (; iter < params.max_iterations; ++iter) {
    // Working-set selection.
    double gmax = -std::numeric_limits<double>::infinity();
    double gmax2 = -std::numeric_limits<double>::infinity();
    std::ptrdiff_t wi = -1, wj = -1;
    for (std::size_t t = 0; t < n; ++t) {
      if (sign[t] == 1) {
        if (!at_upper(t) && -grad[t] >= gmax) gmax = -grad[t], wi = static_cast<std::ptrdiff_t>(t);
      } else {
        if (!at_lower(t) && grad[t] >= gmax) gmax = grad[t], wi = static_cast<std::ptrdiff_t>(t);
      }
    }
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      double diff = 0.0, quad = 0.0;
      if (sign[j] == 1) {
        if (at_lower(j)) continue;
        gmax2 = std::max(gmax2, grad[j]);
        if (wi < 0) continue;
        diff = gmax + grad[j];
        quad = qd[wi] + qd[j] - 2.0 * sign[wi] * q(wi, j);
      } else {
        if (at_upper(j)) continue;
        gmax2 = std::max(gmax2, -grad[j]);
        if (wi < 0) continue;
        diff = gmax - grad[j];
        quad = qd[wi] + qd[j] + 2.0 * sign[wi] * q(wi, j);
      }
      if (diff > 0.0) {
        const double obj = -(diff * diff) / (quad > 0.0 ? quad : kTau);
        if (obj <= best) best = obj, wj = static_cast<std::ptrdiff_t>(j);
      }
    }
    if (gmax + gmax2 < params.tolerance || wj < 0) break;

    const auto i = static_cast<std::size_t>(wi), j = static_cast<std::size_t>(wj);
    const double old_i = alpha[i], old_j = alpha[j];
    const double qij = q(i, j);
    if (sign[i] != sign[j]) {
      double quad = qd[i] + qd[j] + 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) alpha[j] = 0.0, alpha[i] = diff;
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0, alpha[j] = -diff;
      }
      if (diff > 0.0) {
        if (alpha[i] > C) alpha[i] = C, alpha[j] = C - diff;
      } else if (alpha[j] > C) {
        alpha[j] = C, alpha[i] = C + diff;
      }
    } else {
      double quad = qd[i] + qd[j] - 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double total = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (total > C) {
        if (alpha[i] > C) alpha[i] = C, alpha[j] = total - C;
      } else if (alpha[j] < 0.0) {
        alpha[j] = 0.0, alpha[i] = total;
      }
      if (total > C) {
        if (alpha[j] > C) alpha[j] = C, alpha[i] = total - C;
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0, alpha[j] = total;
      }
    }
    const double di = alpha[i] - old_i, dj = alpha[j] - old_j;
    for (std::size_t k = 0; k < n; ++k) grad[k] += q(i, k) * di + q(j, k) * dj;
  }
  model.iterations_ = iter;

  // Offset from free variables, or the midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity(), lb = -ub, free_sum = 0.0;
  std::size_t free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = sign[t] * grad[t];
    if (at_upper(t)) {
      if (sign[t] == -1) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (at_lower(t)) {
      if (sign[t] == 1) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++free;
      free_sum += yg;
    }
  }
  model.rho_ = free > 0 ? free_sum / static_cast<double>(free) : (ub + lb) / 2.0;

  for (std::size_t i = 0; i < l; ++i) {
    const double c = alpha[i] - alpha[i + l];
    if (c != 0.0) {
      model.sv_.push_back(x[i]);
      model.coef_.push_back(c);
    }
  }
  return model;
}

double SvrModel::predict(std::span<const double> x) const {
  double s = -rho_;
  for (std::size_t i = 0; i < sv_.size(); ++i) s += coef_[i] * kernel(sv_[i], x);
  return s;
}

SvrModel SvrModel::from_parts(KernelSpec kernel, double gamma, double rho, std::vector<std::vector<double>> sv,
                              std::vector<double> coef) {
  if (sv.size() != coef.size()) throw ValidationError("SVR: support vector and coefficient counts differ");
  SvrModel m;
  m.kernel_ = kernel;
  m.gamma_ = gamma;
  m.rho_ = rho;
  m.sv_ = std::move(sv);
  m.coef_ = std::move(coef);
  return m;
}

}  // namespace dmpred
