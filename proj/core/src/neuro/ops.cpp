#include "dmpred/neuro/ops.hpp"

#include <cmath>

namespace dmpred::nn {
namespace {

void require(bool ok, const char* op, const Matrix& a, const Matrix& b) {
  if (!ok) throw ShapeError(std::string(op) + ": incompatible shapes " + a.shape_str() + " and " + b.shape_str());
}

bool row_broadcast(const Matrix& a, const Matrix& b) { return b.rows == 1 && b.cols == a.cols && a.rows != 1; }

Node& parent(Node& self, std::size_t i) { return *self.parents[i]; }

// Applies f elementwise and uses df(x, y) for the local derivative.
template <class F, class DF>
Tensor unary(const Tensor& a, F f, DF df) {
  Matrix out(a.rows(), a.cols());
  const auto& x = a.value().data;
  for (std::size_t i = 0; i < x.size(); ++i) out.data[i] = f(x[i]);
  return make_result(std::move(out), {a}, [df](Node& self) {
    Node& p = parent(self, 0);
    if (!p.requires_grad) return;
    auto& g = p.grad_buffer().data;
    const auto& x = p.value.data;
    const auto& y = self.value.data;
    const auto& gy = self.grad.data;
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += gy[i] * df(x[i], y[i]);
  });
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  const Matrix& A = a.value();
  const Matrix& B = b.value();
  require(A.cols == B.rows, "matmul", A, B);
  const std::size_t m = A.rows, k = A.cols, n = B.cols;
  Matrix C(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    double* c = &C.data[i * n];
    for (std::size_t p = 0; p < k; ++p) {
      const double av = A.data[i * k + p];
      if (av == 0.0) continue;
      const double* brow = &B.data[p * n];
      for (std::size_t j = 0; j < n; ++j) c[j] += av * brow[j];
    }
  }
  return make_result(std::move(C), {a, b}, [m, k, n](Node& self) {
    Node& pa = parent(self, 0);
    Node& pb = parent(self, 1);
    const auto& G = self.grad.data;
    if (pa.requires_grad) {
      auto& ga = pa.grad_buffer().data;
      const auto& Bd = pb.value.data;
      for (std::size_t i = 0; i < m; ++i) {
        const double* g = &G[i * n];
        for (std::size_t p = 0; p < k; ++p) {
          const double* brow = &Bd[p * n];
          double acc = 0.0;
          for (std::size_t j = 0; j < n; ++j) acc += g[j] * brow[j];
          ga[i * k + p] += acc;
        }
      }
    }
    if (pb.requires_grad) {
      auto& gb = pb.grad_buffer().data;
      const auto& Ad = pa.value.data;
      for (std::size_t i = 0; i < m; ++i) {
        const double* g = &G[i * n];
        for (std::size_t p = 0; p < k; ++p) {
          const double av = Ad[i * k + p];
          if (av == 0.0) continue;
          double* brow = &gb[p * n];
          for (std::size_t j = 0; j < n; ++j) brow[j] += av * g[j];
        }
      }
    }
  });
}

namespace {

// Shared body of add / sub / mul with optional row broadcast of b.
enum class Binary { Add, Sub, Mul };

Tensor binary(const Tensor& a, const Tensor& b, Binary kind, const char* name) {
  const Matrix& A = a.value();
  const Matrix& B = b.value();
  const bool bcast = row_broadcast(A, B);
  require(A.same_shape(B) || bcast, name, A, B);
  Matrix out(A.rows, A.cols);
  const std::size_t n = A.cols;
  for (std::size_t i = 0; i < A.size(); ++i) {
    const double bv = bcast ? B.data[i % n] : B.data[i];
    switch (kind) {
      case Binary::Add: out.data[i] = A.data[i] + bv; break;
      case Binary::Sub: out.data[i] = A.data[i] - bv; break;
      case Binary::Mul: out.data[i] = A.data[i] * bv; break;
    }
  }
  return make_result(std::move(out), {a, b}, [kind, bcast, n](Node& self) {
    Node& pa = parent(self, 0);
    Node& pb = parent(self, 1);
    const auto& g = self.grad.data;
    if (pa.requires_grad) {
      auto& ga = pa.grad_buffer().data;
      for (std::size_t i = 0; i < g.size(); ++i) {
        const double bv = bcast ? pb.value.data[i % n] : pb.value.data[i];
        ga[i] += kind == Binary::Mul ? g[i] * bv : g[i];
      }
    }
    if (pb.requires_grad) {
      auto& gb = pb.grad_buffer().data;
      for (std::size_t i = 0; i < g.size(); ++i) {
        const std::size_t j = bcast ? i % n : i;
        switch (kind) {
          case Binary::Add: gb[j] += g[i]; break;
          case Binary::Sub: gb[j] -= g[i]; break;
          case Binary::Mul: gb[j] += g[i] * pa.value.data[i]; break;
        }
      }
    }
  });
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) { return binary(a, b, Binary::Add, "add"); }
Tensor sub(const Tensor& a, const Tensor& b) { return binary(a, b, Binary::Sub, "sub"); }
Tensor mul(const Tensor& a, const Tensor& b) { return binary(a, b, Binary::Mul, "mul"); }

Tensor scale(const Tensor& a, double s) {
  return unary(a, [s](double x) { return s * x; }, [s](double, double) { return s; });
}

Tensor add_scalar(const Tensor& a, double s) {
  return unary(a, [s](double x) { return x + s; }, [](double, double) { return 1.0; });
}

Tensor sigmoid(const Tensor& a) {
  return unary(
      a,
      [](double x) {
        if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor tanh(const Tensor& a) {
  return unary(a, [](double x) { return std::tanh(x); }, [](double, double y) { return 1.0 - y * y; });
}

Tensor relu(const Tensor& a) {
  return unary(a, [](double x) { return x > 0.0 ? x : 0.0; }, [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Tensor log(const Tensor& a) {
  return unary(a, [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Tensor exp(const Tensor& a) {
  return unary(a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Tensor square(const Tensor& a) {
  return unary(a, [](double x) { return x * x; }, [](double x, double) { return 2.0 * x; });
}

Tensor clamp(const Tensor& a, double lo, double hi) {
  return unary(
      a, [lo, hi](double x) { return x < lo ? lo : (x > hi ? hi : x); },
      [lo, hi](double x, double) { return x >= lo && x <= hi ? 1.0 : 0.0; });
}

Tensor softmax_rows(const Tensor& a) {
  const Matrix& A = a.value();
  Matrix out(A.rows, A.cols);
  for (std::size_t r = 0; r < A.rows; ++r) {
    const double* x = &A.data[r * A.cols];
    double* y = &out.data[r * A.cols];
    double mx = x[0];
    for (std::size_t c = 1; c < A.cols; ++c) mx = std::max(mx, x[c]);
    double z = 0.0;
    for (std::size_t c = 0; c < A.cols; ++c) z += (y[c] = std::exp(x[c] - mx));
    for (std::size_t c = 0; c < A.cols; ++c) y[c] /= z;
  }
  return make_result(std::move(out), {a}, [](Node& self) {
    Node& p = parent(self, 0);
    if (!p.requires_grad) return;
    auto& g = p.grad_buffer().data;
    const std::size_t cols = self.value.cols;
    for (std::size_t r = 0; r < self.value.rows; ++r) {
      const double* y = &self.value.data[r * cols];
      const double* gy = &self.grad.data[r * cols];
      double dot = 0.0;
      for (std::size_t c = 0; c < cols; ++c) dot += gy[c] * y[c];
      for (std::size_t c = 0; c < cols; ++c) g[r * cols + c] += y[c] * (gy[c] - dot);
    }
  });
}

Tensor normalize_rows(const Tensor& a, double eps) {
  const Matrix& A = a.value();
  const std::size_t n = A.cols;
  Matrix out(A.rows, n);
  std::vector<double> inv_std(A.rows);
  for (std::size_t r = 0; r < A.rows; ++r) {
    const double* x = &A.data[r * n];
    double mu = 0.0;
    for (std::size_t c = 0; c < n; ++c) mu += x[c];
    mu /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t c = 0; c < n; ++c) var += (x[c] - mu) * (x[c] - mu);
    var /= static_cast<double>(n);
    inv_std[r] = 1.0 / std::sqrt(var + eps);
    for (std::size_t c = 0; c < n; ++c) out.data[r * n + c] = (x[c] - mu) * inv_std[r];
  }
  return make_result(std::move(out), {a}, [inv_std = std::move(inv_std), n](Node& self) {
    Node& p = parent(self, 0);
    if (!p.requires_grad) return;
    auto& g = p.grad_buffer().data;
    for (std::size_t r = 0; r < self.value.rows; ++r) {
      const double* xh = &self.value.data[r * n];
      const double* gy = &self.grad.data[r * n];
      double mg = 0.0, mgx = 0.0;
      for (std::size_t c = 0; c < n; ++c) {
        mg += gy[c];
        mgx += gy[c] * xh[c];
      }
      mg /= static_cast<double>(n);
      mgx /= static_cast<double>(n);
      for (std::size_t c = 0; c < n; ++c) g[r * n + c] += inv_std[r] * (gy[c] - mg - xh[c] * mgx);
    }
  });
}

Tensor transpose(const Tensor& a) {
  const Matrix& A = a.value();
  Matrix out(A.cols, A.rows);
  for (std::size_t r = 0; r < A.rows; ++r)
    for (std::size_t c = 0; c < A.cols; ++c) out(c, r) = A(r, c);
  return make_result(std::move(out), {a}, [](Node& self) {
    Node& p = parent(self, 0);
    if (!p.requires_grad) return;
    auto& g = p.grad_buffer();
    for (std::size_t r = 0; r < g.rows; ++r)
      for (std::size_t c = 0; c < g.cols; ++c) g(r, c) += self.grad(c, r);
  });
}

Tensor reshape(const Tensor& a, std::size_t rows, std::size_t cols) {
  if (rows * cols != a.value().size()) {
    throw ShapeError("reshape " + a.value().shape_str() + " to " + std::to_string(rows) + "x" + std::to_string(cols));
  }
  Matrix out(rows, cols, a.value().data);
  return make_result(std::move(out), {a}, [](Node& self) {
    Node& p = parent(self, 0);
    if (!p.requires_grad) return;
    auto& g = p.grad_buffer().data;
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad.data[i];
  });
}

Tensor concat_cols(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw ShapeError("concat_cols of nothing");
  const std::size_t rows = parts.front().rows();
  std::size_t cols = 0;
  for (const auto& p : parts) {
    require(p.rows() == rows, "concat_cols", parts.front().value(), p.value());
    cols += p.cols();
  }
  Matrix out(rows, cols);
  std::size_t off = 0;
  for (const auto& p : parts) {
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < p.cols(); ++c) out(r, off + c) = p.value()(r, c);
    off += p.cols();
  }
  return make_result(std::move(out), parts, [](Node& self) {
    std::size_t off = 0;
    for (auto& pp : self.parents) {
      Node& p = *pp;
      if (p.requires_grad) {
        auto& g = p.grad_buffer();
        for (std::size_t r = 0; r < g.rows; ++r)
          for (std::size_t c = 0; c < g.cols; ++c) g(r, c) += self.grad(r, off + c);
      }
      off += p.value.cols;
    }
  });
}

Tensor concat_rows(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw ShapeError("concat_rows of nothing");
  const std::size_t cols = parts.front().cols();
  std::size_t rows = 0;
  for (const auto& p : parts) {
    require(p.cols() == cols, "concat_rows", parts.front().value(), p.value());
    rows += p.rows();
  }
  Matrix out(rows, cols);
  std::size_t off = 0;
  for (const auto& p : parts) {
    std::copy(p.value().data.begin(), p.value().data.end(), out.data.begin() + static_cast<long>(off * cols));
    off += p.rows();
  }
  return make_result(std::move(out), parts, [](Node& self) {
    std::size_t off = 0;
    const std::size_t cols = self.value.cols;
    for (auto& pp : self.parents) {
      Node& p = *pp;
      if (p.requires_grad) {
        auto& g = p.grad_buffer().data;
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad.data[off * cols + i];
      }
      off += p.value.rows;
    }
  });
}

Tensor slice_cols(const Tensor& a, std::size_t start, std::size_t count) {
  const Matrix& A = a.value();
  if (start + count > A.cols) throw ShapeError("slice_cols out of range for " + A.shape_str());
  Matrix out(A.rows, count);
  for (std::size_t r = 0; r < A.rows; ++r)
    for (std::size_t c = 0; c < count; ++c) out(r, c) = A(r, start + c);
  return make_result(std::move(out), {a}, [start](Node& self) {
    Node& p = parent(self, 0);
    if (!p.requires_grad) return;
    auto& g = p.grad_buffer();
    for (std::size_t r = 0; r < self.value.rows; ++r)
      for (std::size_t c = 0; c < self.value.cols; ++c) g(r, start + c) += self.grad(r, c);
  });
}

Tensor slice_rows(const Tensor& a, std::size_t start, std::size_t count) {
  const Matrix& A = a.value();
  if (start + count > A.rows) throw ShapeError("slice_rows out of range for " + A.shape_str());
  Matrix out(count, A.cols,
             std::vector<double>(A.data.begin() + static_cast<long>(start * A.cols),
                                 A.data.begin() + static_cast<long>((start + count) * A.cols)));
  return make_result(std::move(out), {a}, [start](Node& self) {
    Node& p = parent(self, 0);
    if (!p.requires_grad) return;
    auto& g = p.grad_buffer().data;
    const std::size_t off = start * self.value.cols;
    for (std::size_t i = 0; i < self.grad.data.size(); ++i) g[off + i] += self.grad.data[i];
  });
}

Tensor select_rows(const Tensor& a, const std::vector<std::size_t>& rows) {
  const Matrix& A = a.value();
  Matrix out(rows.size(), A.cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= A.rows) throw ShapeError("select_rows index out of range for " + A.shape_str());
    std::copy_n(&A.data[rows[i] * A.cols], A.cols, &out.data[i * A.cols]);
  }
  return make_result(std::move(out), {a}, [rows](Node& self) {
    Node& p = parent(self, 0);
    if (!p.requires_grad) return;
    auto& g = p.grad_buffer().data;
    const std::size_t cols = self.value.cols;
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t c = 0; c < cols; ++c) g[rows[i] * cols + c] += self.grad.data[i * cols + c];
  });
}

Tensor sum(const Tensor& a) {
  double s = 0.0;
  for (double v : a.value().data) s += v;
  return make_result(Matrix(1, 1, s), {a}, [](Node& self) {
    Node& p = parent(self, 0);
    if (!p.requires_grad) return;
    const double g0 = self.grad.data[0];
    for (double& g : p.grad_buffer().data) g += g0;
  });
}

Tensor mean(const Tensor& a) {
  if (a.value().size() == 0) throw ShapeError("mean of empty tensor");
  return scale(sum(a), 1.0 / static_cast<double>(a.value().size()));
}

Tensor sum_rows(const Tensor& a) {
  const Matrix& A = a.value();
  Matrix out(A.rows, 1);
  for (std::size_t r = 0; r < A.rows; ++r)
    for (std::size_t c = 0; c < A.cols; ++c) out.data[r] += A(r, c);
  return make_result(std::move(out), {a}, [](Node& self) {
    Node& p = parent(self, 0);
    if (!p.requires_grad) return;
    auto& g = p.grad_buffer();
    for (std::size_t r = 0; r < g.rows; ++r)
      for (std::size_t c = 0; c < g.cols; ++c) g(r, c) += self.grad.data[r];
  });
}

Tensor segment_weighted_sum(const Tensor& w, const Tensor& x) {
  const Matrix& W = w.value();
  const Matrix& X = x.value();
  require(W.rows * W.cols == X.rows, "segment_weighted_sum", W, X);
  const std::size_t B = W.rows, T = W.cols, h = X.cols;
  Matrix out(B, h);
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t t = 0; t < T; ++t) {
      const double wt = W(b, t);
      const double* xr = &X.data[(b * T + t) * h];
      for (std::size_t c = 0; c < h; ++c) out.data[b * h + c] += wt * xr[c];
    }
  return make_result(std::move(out), {w, x}, [B, T, h](Node& self) {
    Node& pw = parent(self, 0);
    Node& px = parent(self, 1);
    for (std::size_t b = 0; b < B; ++b) {
      const double* g = &self.grad.data[b * h];
      for (std::size_t t = 0; t < T; ++t) {
        const std::size_t row = b * T + t;
        if (pw.requires_grad) {
          double acc = 0.0;
          for (std::size_t c = 0; c < h; ++c) acc += g[c] * px.value.data[row * h + c];
          pw.grad_buffer().data[b * T + t] += acc;
        }
        if (px.requires_grad) {
          const double wt = pw.value.data[b * T + t];
          auto& gx = px.grad_buffer().data;
          for (std::size_t c = 0; c < h; ++c) gx[row * h + c] += wt * g[c];
        }
      }
    }
  });
}

Tensor dropout(const Tensor& a, double rate, bool training, std::mt19937_64& rng) {
  if (!training || rate <= 0.0) return a;
  if (rate >= 1.0) throw std::invalid_argument("dropout rate must be below 1");
  Matrix mask(a.rows(), a.cols());
  std::bernoulli_distribution keep(1.0 - rate);
  const double s = 1.0 / (1.0 - rate);
  for (double& m : mask.data) m = keep(rng) ? s : 0.0;
  return mul(a, constant(std::move(mask)));
}

}  // namespace dmpred::nn
