#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include "dmpred/neuro/tensor.hpp"

namespace dmpred::nn {

Tensor matmul(const Tensor& a, const Tensor& b);
/// Elementwise; `b` may also be a 1 x n row broadcast over the rows of `a`.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double s);
Tensor add_scalar(const Tensor& a, double s);

Tensor sigmoid(const Tensor& a);
Tensor tanh(const Tensor& a);
Tensor relu(const Tensor& a);
Tensor log(const Tensor& a);
Tensor exp(const Tensor& a);
Tensor square(const Tensor& a);
/// Gradient passes only where lo <= a <= hi.
Tensor clamp(const Tensor& a, double lo, double hi);

Tensor softmax_rows(const Tensor& a);
/// Per-row zero mean / unit variance (biased variance, eps inside the root).
Tensor normalize_rows(const Tensor& a, double eps = 1e-5);

Tensor transpose(const Tensor& a);
Tensor reshape(const Tensor& a, std::size_t rows, std::size_t cols);
Tensor concat_cols(const std::vector<Tensor>& parts);
Tensor concat_rows(const std::vector<Tensor>& parts);
Tensor slice_cols(const Tensor& a, std::size_t start, std::size_t count);
Tensor slice_rows(const Tensor& a, std::size_t start, std::size_t count);
Tensor select_rows(const Tensor& a, const std::vector<std::size_t>& rows);

Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);
/// Column vector of per-row sums.
Tensor sum_rows(const Tensor& a);

/// out[b] = sum_t w[b, t] * x[b * T + t] for w of shape B x T and x of
/// shape (B*T) x h.
Tensor segment_weighted_sum(const Tensor& w, const Tensor& x);

/// Inverted dropout. Identity (the same tensor) when not training or when
/// rate is 0.
Tensor dropout(const Tensor& a, double rate, bool training, std::mt19937_64& rng);

}  // namespace dmpred::nn
