#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dmpred/models/config.hpp"

namespace dmpred {

struct SvrParams {
  KernelSpec kernel;
  double c = 1.0;
  double epsilon = 0.1;
  double tolerance = 1e-3;  // KKT violation stopping threshold
  long max_iterations = 10'000'000;
};

/// Epsilon-insensitive support vector regression trained in the dual with
/// SMO (maximal-violating pair with second-order working-set selection).
class SvrModel {
 public:
  SvrModel() = default;

  /// X: one row per example. Throws ValidationError on an empty or ragged
  /// training set.
  static SvrModel train(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
                        const SvrParams& params);

  double predict(std::span<const double> x) const;
  double kernel(std::span<const double> a, std::span<const double> b) const;

  const KernelSpec& kernel_spec() const { return kernel_; }
  double gamma() const { return gamma_; }
  double bias() const { return -rho_; }
  std::size_t support_size() const { return coef_.size(); }
  const std::vector<std::vector<double>>& support_vectors() const { return sv_; }
  /// alpha_i - alpha*_i of each support vector, each within [-C, C].
  const std::vector<double>& dual_coefficients() const { return coef_; }
  long iterations() const { return iterations_; }

  /// Rebuilds a model from stored parts (used when loading model files).
  static SvrModel from_parts(KernelSpec kernel, double gamma, double rho, std::vector<std::vector<double>> sv,
                             std::vector<double> coef);
  double rho() const { return rho_; }

 private:
  KernelSpec kernel_;
  double gamma_ = 1.0;
  double rho_ = 0.0;
  std::vector<std::vector<double>> sv_;
  std::vector<double> coef_;
  long iterations_ = 0;
};

/// 1 / (n_features * variance of all entries of X); 1 when the variance is 0.
double gamma_scale(const std::vector<std::vector<double>>& x);

}  // namespace dmpred
