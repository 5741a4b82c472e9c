#pragma once

#include <cstdint>
#include <vector>

#include "dmpred/neuro/layers.hpp"

namespace dmpred::nn {

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// First/second moments of one parameter.
struct AdamMoments {
  Matrix m;
  Matrix v;
};

/// One bias-corrected Adam update of `param` (step counts from 1). Throws
/// ShapeError when shapes disagree.
void adam_update(Matrix& param, const Matrix& grad, AdamMoments& moments, std::int64_t step,
                 const AdamOptions& opt);

class Adam {
 public:
  Adam() = default;
  Adam(ParamList params, AdamOptions options = {});

  /// Applies one update from the accumulated gradients.
  void step();
  void zero_grad();
  std::int64_t steps() const { return step_; }
  const AdamOptions& options() const { return options_; }

 private:
  ParamList params_;
  std::vector<AdamMoments> moments_;
  AdamOptions options_;
  std::int64_t step_ = 0;
};

}  // namespace dmpred::nn
