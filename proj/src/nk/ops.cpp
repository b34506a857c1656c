#include "mtlkd/nk/ops.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>

namespace mtlkd::nk {
namespace {

void require(bool ok, const char* op, const std::string& what) {
  if (!ok) throw std::invalid_argument(std::string(op) + ": " + what);
}

std::string shapes(const Tensor& a, const Tensor& b) { return a.shape_str() + " vs " + b.shape_str(); }

void check_mask(const Tensor& mask, const Tensor& x, const char* op) {
  if (mask.empty()) return;
  require(mask.cols() == x.cols() && (mask.rows() == 1 || mask.rows() == x.rows()), op,
          "mask shape " + shapes(mask, x));
}

inline Real mask_at(const Tensor& mask, std::size_t r, std::size_t c) {
  if (mask.empty()) return 0;
  return mask.rows() == 1 ? mask(0, c) : mask(r, c);
}

}  // namespace

Var matmul(Var a, Var b) {
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  require(A.cols() == B.rows(), "matmul", shapes(A, B));
  const std::size_t m = A.rows(), k = A.cols(), n = B.cols();
  Tensor C(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    Real* c = C.data() + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const Real av = A(i, p);
      if (av == 0) continue;
      const Real* bp = B.data() + p * n;
      for (std::size_t j = 0; j < n; ++j) c[j] += av * bp[j];
    }
  }
  return a.tape->push(std::move(C), {a, b}, [a, b, m, k, n](Tape& t, int self) {
    const Tensor& G = t.grad(self);
    const Tensor& A = t.value(a.id);
    const Tensor& B = t.value(b.id);
    if (t.needs_grad(a.id)) {
      Tensor& dA = t.grad(a.id);
      for (std::size_t i = 0; i < m; ++i) {
        const Real* g = G.data() + i * n;
        for (std::size_t p = 0; p < k; ++p) {
          const Real* bp = B.data() + p * n;
          Real s = 0;
          for (std::size_t j = 0; j < n; ++j) s += g[j] * bp[j];
          dA(i, p) += s;
        }
      }
    }
    if (t.needs_grad(b.id)) {
      Tensor& dB = t.grad(b.id);
      for (std::size_t i = 0; i < m; ++i) {
        const Real* g = G.data() + i * n;
        for (std::size_t p = 0; p < k; ++p) {
          const Real av = A(i, p);
          if (av == 0) continue;
          Real* db = dB.data() + p * n;
          for (std::size_t j = 0; j < n; ++j) db[j] += av * g[j];
        }
      }
    }
  });
}

Var matmul_nt(Var a, Var b) {
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  require(A.cols() == B.cols(), "matmul_nt", shapes(A, B));
  const std::size_t m = A.rows(), k = A.cols(), n = B.rows();
  Tensor C(m, n);
  for (std::size_t i = 0; i < m; ++i) {
    const Real* ai = A.data() + i * k;
    for (std::size_t j = 0; j < n; ++j) {
      const Real* bj = B.data() + j * k;
      Real s = 0;
      for (std::size_t p = 0; p < k; ++p) s += ai[p] * bj[p];
      C(i, j) = s;
    }
  }
  return a.tape->push(std::move(C), {a, b}, [a, b, m, k, n](Tape& t, int self) {
    const Tensor& G = t.grad(self);
    const Tensor& A = t.value(a.id);
    const Tensor& B = t.value(b.id);
    if (t.needs_grad(a.id)) {
      Tensor& dA = t.grad(a.id);
      for (std::size_t i = 0; i < m; ++i) {
        Real* da = dA.data() + i * k;
        for (std::size_t j = 0; j < n; ++j) {
          const Real g = G(i, j);
          if (g == 0) continue;
          const Real* bj = B.data() + j * k;
          for (std::size_t p = 0; p < k; ++p) da[p] += g * bj[p];
        }
      }
    }
    if (t.needs_grad(b.id)) {
      Tensor& dB = t.grad(b.id);
      for (std::size_t i = 0; i < m; ++i) {
        const Real* ai = A.data() + i * k;
        for (std::size_t j = 0; j < n; ++j) {
          const Real g = G(i, j);
          if (g == 0) continue;
          Real* db = dB.data() + j * k;
          for (std::size_t p = 0; p < k; ++p) db[p] += g * ai[p];
        }
      }
    }
  });
}

Var add(Var a, Var b) {
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  const bool broadcast = B.rows() == 1 && A.rows() != 1;
  require(A.cols() == B.cols() && (broadcast || A.rows() == B.rows()), "add", shapes(A, B));
  Tensor C = A;
  const std::size_t rows = A.rows(), cols = A.cols();
  for (std::size_t r = 0; r < rows; ++r) {
    const Real* br = B.data() + (broadcast ? 0 : r * cols);
    Real* c = C.data() + r * cols;
    for (std::size_t j = 0; j < cols; ++j) c[j] += br[j];
  }
  return a.tape->push(std::move(C), {a, b}, [a, b, broadcast, rows, cols](Tape& t, int self) {
    const Tensor& G = t.grad(self);
    if (t.needs_grad(a.id)) t.grad(a.id).accumulate(G);
    if (t.needs_grad(b.id)) {
      Tensor& dB = t.grad(b.id);
      if (!broadcast) {
        dB.accumulate(G);
      } else {
        for (std::size_t r = 0; r < rows; ++r) {
          for (std::size_t j = 0; j < cols; ++j) dB(0, j) += G(r, j);
        }
      }
    }
  });
}

Var mul(Var a, Var b) {
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  require(A.same_shape(B), "mul", shapes(A, B));
  Tensor C = A;
  for (std::size_t i = 0; i < C.size(); ++i) C[i] *= B[i];
  return a.tape->push(std::move(C), {a, b}, [a, b](Tape& t, int self) {
    const Tensor& G = t.grad(self);
    const Tensor& A = t.value(a.id);
    const Tensor& B = t.value(b.id);
    if (t.needs_grad(a.id)) {
      Tensor& d = t.grad(a.id);
      for (std::size_t i = 0; i < G.size(); ++i) d[i] += G[i] * B[i];
    }
    if (t.needs_grad(b.id)) {
      Tensor& d = t.grad(b.id);
      for (std::size_t i = 0; i < G.size(); ++i) d[i] += G[i] * A[i];
    }
  });
}

Var scale(Var a, Real s) {
  Tensor C = a.value();
  for (auto& x : C.values()) x *= s;
  return a.tape->push(std::move(C), {a}, [a, s](Tape& t, int self) {
    const Tensor& G = t.grad(self);
    Tensor& d = t.grad(a.id);
    for (std::size_t i = 0; i < G.size(); ++i) d[i] += s * G[i];
  });
}

Var relu(Var a) {
  Tensor C = a.value();
  for (auto& x : C.values()) x = x > 0 ? x : Real(0);
  return a.tape->push(std::move(C), {a}, [a](Tape& t, int self) {
    const Tensor& G = t.grad(self);
    const Tensor& X = t.value(a.id);
    Tensor& d = t.grad(a.id);
    for (std::size_t i = 0; i < G.size(); ++i) {
      if (X[i] > 0) d[i] += G[i];
    }
  });
}

Var tanh(Var a) {
  Tensor C = a.value();
  for (auto& x : C.values()) x = std::tanh(x);
  return a.tape->push(std::move(C), {a}, [a](Tape& t, int self) {
    const Tensor& G = t.grad(self);
    const Tensor& Y = t.value(self);
    Tensor& d = t.grad(a.id);
    for (std::size_t i = 0; i < G.size(); ++i) d[i] += G[i] * (1 - Y[i] * Y[i]);
  });
}

Var concat_cols(const std::vector<Var>& parts) {
  require(!parts.empty(), "concat_cols", "no inputs");
  const std::size_t rows = parts[0].rows();
  std::size_t cols = 0;
  for (const auto& p : parts) {
    require(p.rows() == rows, "concat_cols", "row count mismatch");
    cols += p.cols();
  }
  Tensor C(rows, cols);
  std::size_t off = 0;
  for (const auto& p : parts) {
    const Tensor& P = p.value();
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t j = 0; j < P.cols(); ++j) C(r, off + j) = P(r, j);
    }
    off += P.cols();
  }
  Tape* tape = parts[0].tape;
  return tape->push(std::move(C), parts, [parts, rows](Tape& t, int self) {
    const Tensor& G = t.grad(self);
    std::size_t off = 0;
    for (const auto& p : parts) {
      const std::size_t pc = t.value(p.id).cols();
      if (t.needs_grad(p.id)) {
        Tensor& d = t.grad(p.id);
        for (std::size_t r = 0; r < rows; ++r) {
          for (std::size_t j = 0; j < pc; ++j) d(r, j) += G(r, off + j);
        }
      }
      off += pc;
    }
  });
}

Var concat_rows(const std::vector<Var>& parts) {
  require(!parts.empty(), "concat_rows", "no inputs");
  const std::size_t cols = parts[0].cols();
  std::size_t rows = 0;
  for (const auto& p : parts) {
    require(p.cols() == cols, "concat_rows", "column count mismatch");
    rows += p.rows();
  }
  std::vector<Real> data;
  data.reserve(rows * cols);
  for (const auto& p : parts) {
    auto v = p.value().values();
    data.insert(data.end(), v.begin(), v.end());
  }
  Tape* tape = parts[0].tape;
  return tape->push(Tensor(rows, cols, std::move(data)), parts, [parts](Tape& t, int self) {
    const Tensor& G = t.grad(self);
    std::size_t off = 0;
    for (const auto& p : parts) {
      const std::size_t n = t.value(p.id).size();
      if (t.needs_grad(p.id)) {
        Tensor& d = t.grad(p.id);
        for (std::size_t i = 0; i < n; ++i) d[i] += G[off + i];
      }
      off += n;
    }
  });
}

Var slice_rows(Var a, std::size_t start, std::size_t count) {
  const Tensor& A = a.value();
  require(start + count <= A.rows(), "slice_rows", "range exceeds " + A.shape_str());
  const std::size_t cols = A.cols();
  std::vector<Real> data(A.data() + start * cols, A.data() + (start + count) * cols);
  return a.tape->push(Tensor(count, cols, std::move(data)), {a},
                      [a, start, cols](Tape& t, int self) {
                        const Tensor& G = t.grad(self);
                        Tensor& d = t.grad(a.id);
                        for (std::size_t i = 0; i < G.size(); ++i) d[start * cols + i] += G[i];
                      });
}

Var slice_cols(Var a, std::size_t start, std::size_t count) {
  const Tensor& A = a.value();
  require(start + count <= A.cols(), "slice_cols", "range exceeds " + A.shape_str());
  const std::size_t rows = A.rows();
  Tensor C(rows, count);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < count; ++j) C(r, j) = A(r, start + j);
  }
  return a.tape->push(std::move(C), {a}, [a, start, count, rows](Tape& t, int self) {
    const Tensor& G = t.grad(self);
    Tensor& d = t.grad(a.id);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t j = 0; j < count; ++j) d(r, start + j) += G(r, j);
    }
  });
}

Var gather_rows(Var a, std::span<const int> idx) {
  const Tensor& A = a.value();
  const std::size_t cols = A.cols();
  Tensor C(idx.size(), cols);
  for (std::size_t r = 0; r < idx.size(); ++r) {
    require(idx[r] >= 0 && static_cast<std::size_t>(idx[r]) < A.rows(), "gather_rows",
            "index out of range");
    for (std::size_t j = 0; j < cols; ++j) C(r, j) = A(idx[r], j);
  }
  std::vector<int> rows(idx.begin(), idx.end());
  return a.tape->push(std::move(C), {a}, [a, rows = std::move(rows), cols](Tape& t, int self) {
    const Tensor& G = t.grad(self);
    Tensor& d = t.grad(a.id);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (std::size_t j = 0; j < cols; ++j) d(rows[r], j) += G(r, j);
    }
  });
}

Var index_cols(Var a, std::span<const int> idx, Real fill) {
  const Tensor& A = a.value();
  require(A.rows() == 1, "index_cols", "expects a single row");
  Tensor C(1, idx.size(), fill);
  for (std::size_t m = 0; m < idx.size(); ++m) {
    if (idx[m] < 0) continue;
    require(static_cast<std::size_t>(idx[m]) < A.cols(), "index_cols", "index out of range");
    C(0, m) = A(0, idx[m]);
  }
  std::vector<int> map(idx.begin(), idx.end());
  return a.tape->push(std::move(C), {a}, [a, map = std::move(map)](Tape& t, int self) {
    const Tensor& G = t.grad(self);
    Tensor& d = t.grad(a.id);
    for (std::size_t m = 0; m < map.size(); ++m) {
      if (map[m] >= 0) d(0, map[m]) += G(0, m);
    }
  });
}

namespace {

// Writes the masked softmax of one row into `out`; returns log of the
// normaliser relative to the row max (for log-softmax).
void softmax_row(const Real* x, const Tensor& mask, std::size_t r, std::size_t cols, Real* out,
                 Real& max_out, Real& log_z_out) {
  Real mx = -std::numeric_limits<Real>::infinity();
  bool any = false;
  for (std::size_t j = 0; j < cols; ++j) {
    const Real m = mask_at(mask, r, j);
    if (is_masked(m)) continue;
    any = true;
    mx = std::max(mx, x[j] + m);
  }
  if (!any) throw std::domain_error("masked softmax: all-masked row");
  Real z = 0;
  for (std::size_t j = 0; j < cols; ++j) {
    const Real m = mask_at(mask, r, j);
    if (is_masked(m)) {
      out[j] = 0;
    } else {
      out[j] = std::exp(x[j] + m - mx);
      z += out[j];
    }
  }
  for (std::size_t j = 0; j < cols; ++j) out[j] /= z;
  max_out = mx;
  log_z_out = std::log(z);
}

}  // namespace

Var masked_softmax(Var logits, const Tensor& mask) {
  const Tensor& X = logits.value();
  check_mask(mask, X, "masked_softmax");
  const std::size_t rows = X.rows(), cols = X.cols();
  Tensor P(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    Real mx, lz;
    softmax_row(X.data() + r * cols, mask, r, cols, P.data() + r * cols, mx, lz);
  }
  return logits.tape->push(std::move(P), {logits}, [logits, rows, cols](Tape& t, int self) {
    const Tensor& G = t.grad(self);
    const Tensor& P = t.value(self);
    Tensor& d = t.grad(logits.id);
    for (std::size_t r = 0; r < rows; ++r) {
      Real dot = 0;
      for (std::size_t j = 0; j < cols; ++j) dot += G(r, j) * P(r, j);
      for (std::size_t j = 0; j < cols; ++j) d(r, j) += P(r, j) * (G(r, j) - dot);
    }
  });
}

Var masked_log_softmax(Var logits, const Tensor& mask) {
  const Tensor& X = logits.value();
  check_mask(mask, X, "masked_log_softmax");
  const std::size_t rows = X.rows(), cols = X.cols();
  Tensor L(rows, cols);
  auto probs = std::make_shared<Tensor>(rows, cols);
  const Real neg_inf = -std::numeric_limits<Real>::infinity();
  for (std::size_t r = 0; r < rows; ++r) {
    Real mx, lz;
    const Real* x = X.data() + r * cols;
    softmax_row(x, mask, r, cols, probs->data() + r * cols, mx, lz);
    for (std::size_t j = 0; j < cols; ++j) {
      const Real m = mask_at(mask, r, j);
      L(r, j) = is_masked(m) ? neg_inf : x[j] + m - mx - lz;
    }
  }
  return logits.tape->push(std::move(L), {logits}, [logits, probs, rows, cols](Tape& t, int self) {
    const Tensor& G = t.grad(self);
    const Tensor& P = *probs;
    Tensor& d = t.grad(logits.id);
    for (std::size_t r = 0; r < rows; ++r) {
      Real gsum = 0;
      for (std::size_t j = 0; j < cols; ++j) {
        if (P(r, j) > 0) gsum += G(r, j);
      }
      for (std::size_t j = 0; j < cols; ++j) {
        if (P(r, j) > 0) d(r, j) += G(r, j) - P(r, j) * gsum;
      }
    }
  });
}

Var mean_rows(Var a) {
  const Tensor& A = a.value();
  const std::size_t rows = A.rows(), cols = A.cols();
  require(rows > 0, "mean_rows", "empty input");
  Tensor C(1, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t j = 0; j < cols; ++j) C(0, j) += A(r, j);
  }
  for (std::size_t j = 0; j < cols; ++j) C(0, j) /= static_cast<Real>(rows);
  return a.tape->push(std::move(C), {a}, [a, rows, cols](Tape& t, int self) {
    const Tensor& G = t.grad(self);
    Tensor& d = t.grad(a.id);
    const Real inv = Real(1) / static_cast<Real>(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t j = 0; j < cols; ++j) d(r, j) += G(0, j) * inv;
    }
  });
}

Var sum(Var a) {
  Real s = 0;
  for (Real x : a.value().values()) s += x;
  return a.tape->push(Tensor::scalar(s), {a}, [a](Tape& t, int self) {
    const Real g = t.grad(self)[0];
    for (auto& x : t.grad(a.id).values()) x += g;
  });
}

Var weighted_pick(Var a, std::span<const PickEntry> entries) {
  const Tensor& A = a.value();
  Real s = 0;
  for (const auto& e : entries) {
    require(e.row < A.rows() && e.col < A.cols(), "weighted_pick", "entry out of range");
    if (e.weight != 0) s += e.weight * A(e.row, e.col);
  }
  std::vector<PickEntry> saved(entries.begin(), entries.end());
  return a.tape->push(Tensor::scalar(s), {a}, [a, saved = std::move(saved)](Tape& t, int self) {
    const Real g = t.grad(self)[0];
    Tensor& d = t.grad(a.id);
    for (const auto& e : saved) d(e.row, e.col) += g * e.weight;
  });
}

Var kl_div(const Tensor& p, Var log_q) {
  const Tensor& LQ = log_q.value();
  require(p.same_shape(LQ), "kl_div", shapes(p, LQ));
  Real s = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0) s += p[i] * (std::log(p[i]) - LQ[i]);
  }
  return log_q.tape->push(Tensor::scalar(s), {log_q}, [log_q, p](Tape& t, int self) {
    const Real g = t.grad(self)[0];
    Tensor& d = t.grad(log_q.id);
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] > 0) d[i] -= g * p[i];
    }
  });
}

Var layer_norm(Var x, Var gamma, Var beta, Real eps) {
  const Tensor& X = x.value();
  const Tensor& Gm = gamma.value();
  const Tensor& Bt = beta.value();
  const std::size_t rows = X.rows(), cols = X.cols();
  require(Gm.rows() == 1 && Gm.cols() == cols && Bt.same_shape(Gm), "layer_norm",
          "gain/bias shape");
  auto xhat = std::make_shared<Tensor>(rows, cols);
  auto inv_std = std::make_shared<std::vector<Real>>(rows);
  Tensor Y(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    Real mean = 0;
    for (std::size_t j = 0; j < cols; ++j) mean += X(r, j);
    mean /= static_cast<Real>(cols);
    Real var = 0;
    for (std::size_t j = 0; j < cols; ++j) var += (X(r, j) - mean) * (X(r, j) - mean);
    var /= static_cast<Real>(cols);
    const Real is = Real(1) / std::sqrt(var + eps);
    (*inv_std)[r] = is;
    for (std::size_t j = 0; j < cols; ++j) {
      (*xhat)(r, j) = (X(r, j) - mean) * is;
      Y(r, j) = (*xhat)(r, j) * Gm(0, j) + Bt(0, j);
    }
  }
  return x.tape->push(std::move(Y), {x, gamma, beta},
                      [x, gamma, beta, xhat, inv_std, rows, cols](Tape& t, int self) {
    const Tensor& G = t.grad(self);
    const Tensor& Gm = t.value(gamma.id);
    if (t.needs_grad(gamma.id) || t.needs_grad(beta.id)) {
      Tensor& dg = t.grad(gamma.id);
      Tensor& db = t.grad(beta.id);
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t j = 0; j < cols; ++j) {
          dg(0, j) += G(r, j) * (*xhat)(r, j);
          db(0, j) += G(r, j);
        }
      }
    }
    if (t.needs_grad(x.id)) {
      Tensor& dx = t.grad(x.id);
      const Real n = static_cast<Real>(cols);
      for (std::size_t r = 0; r < rows; ++r) {
        Real s1 = 0, s2 = 0;
        for (std::size_t j = 0; j < cols; ++j) {
          const Real gh = G(r, j) * Gm(0, j);
          s1 += gh;
          s2 += gh * (*xhat)(r, j);
        }
        for (std::size_t j = 0; j < cols; ++j) {
          const Real gh = G(r, j) * Gm(0, j);
          dx(r, j) += (*inv_std)[r] * (gh - s1 / n - (*xhat)(r, j) * s2 / n);
        }
      }
    }
  });
}

Var attention(Var q, Var k, Var v, const Tensor& mask, int heads, int groups) {
  const Tensor& Q = q.value();
  const Tensor& K = k.value();
  const Tensor& V = v.value();
  require(heads > 0 && groups > 0, "attention", "heads and groups must be positive");
  require(Q.cols() == K.cols() && K.rows() == V.rows() && V.cols() == Q.cols(), "attention",
          "Q " + Q.shape_str() + " K " + K.shape_str() + " V " + V.shape_str());
  const std::size_t G = groups, H = heads, D = Q.cols();
  require(D % H == 0, "attention", "model dim not divisible by heads");
  require(Q.rows() % G == 0 && K.rows() % G == 0, "attention", "rows not divisible by groups");
  const std::size_t Lq = Q.rows() / G, Lk = K.rows() / G, dh = D / H;
  const bool per_group_mask = !mask.empty() && mask.rows() == G && mask.rows() != Q.rows();
  if (!mask.empty()) {
    require(mask.cols() == Lk && (per_group_mask || mask.rows() == Q.rows()), "attention",
            "mask shape " + mask.shape_str());
  }
  const Real sc = Real(1) / std::sqrt(static_cast<Real>(dh));

  // P[((g * H + h) * Lq + i) * Lk + j]
  auto P = std::make_shared<std::vector<Real>>(G * H * Lq * Lk);
  Tensor O(Q.rows(), D);
  std::vector<Real> srow(Lk);
  for (std::size_t g = 0; g < G; ++g) {
    for (std::size_t h = 0; h < H; ++h) {
      const std::size_t c0 = h * dh;
      for (std::size_t i = 0; i < Lq; ++i) {
        const std::size_t qi = g * Lq + i;
        const std::size_t mrow = per_group_mask ? g : qi;
        Real mx = -std::numeric_limits<Real>::infinity();
        bool any = false;
        for (std::size_t j = 0; j < Lk; ++j) {
          const Real m = mask.empty() ? Real(0) : mask(mrow, j);
          if (is_masked(m)) continue;
          const Real* qr = Q.data() + qi * D + c0;
          const Real* kr = K.data() + (g * Lk + j) * D + c0;
          Real s = 0;
          for (std::size_t c = 0; c < dh; ++c) s += qr[c] * kr[c];
          srow[j] = s * sc + m;
          mx = std::max(mx, srow[j]);
          any = true;
        }
        if (!any) throw std::domain_error("attention: all-masked row");
        Real* p = P->data() + ((g * H + h) * Lq + i) * Lk;
        Real z = 0;
        for (std::size_t j = 0; j < Lk; ++j) {
          const Real m = mask.empty() ? Real(0) : mask(mrow, j);
          p[j] = is_masked(m) ? Real(0) : std::exp(srow[j] - mx);
          z += p[j];
        }
        Real* o = O.data() + qi * D + c0;
        for (std::size_t j = 0; j < Lk; ++j) {
          p[j] /= z;
          if (p[j] == 0) continue;
          const Real* vr = V.data() + (g * Lk + j) * D + c0;
          for (std::size_t c = 0; c < dh; ++c) o[c] += p[j] * vr[c];
        }
      }
    }
  }
  return q.tape->push(std::move(O), {q, k, v},
                      [q, k, v, P, G, H, Lq, Lk, D, dh, sc](Tape& t, int self) {
    const Tensor& dO = t.grad(self);
    const Tensor& Q = t.value(q.id);
    const Tensor& K = t.value(k.id);
    const Tensor& V = t.value(v.id);
    const bool gq = t.needs_grad(q.id), gk = t.needs_grad(k.id), gv = t.needs_grad(v.id);
    Tensor* dQ = gq ? &t.grad(q.id) : nullptr;
    Tensor* dK = gk ? &t.grad(k.id) : nullptr;
    Tensor* dV = gv ? &t.grad(v.id) : nullptr;
    std::vector<Real> dp(Lk);
    for (std::size_t g = 0; g < G; ++g) {
      for (std::size_t h = 0; h < H; ++h) {
        const std::size_t c0 = h * dh;
        for (std::size_t i = 0; i < Lq; ++i) {
          const std::size_t qi = g * Lq + i;
          const Real* p = P->data() + ((g * H + h) * Lq + i) * Lk;
          const Real* go = dO.data() + qi * D + c0;
          Real dot = 0;
          for (std::size_t j = 0; j < Lk; ++j) {
            if (p[j] == 0) {
              dp[j] = 0;
              continue;
            }
            const std::size_t kj = g * Lk + j;
            const Real* vr = V.data() + kj * D + c0;
            Real s = 0;
            for (std::size_t c = 0; c < dh; ++c) s += go[c] * vr[c];
            dp[j] = s;
            dot += s * p[j];
            if (dV) {
              Real* dv = dV->data() + kj * D + c0;
              for (std::size_t c = 0; c < dh; ++c) dv[c] += p[j] * go[c];
            }
          }
          for (std::size_t j = 0; j < Lk; ++j) {
            if (p[j] == 0) continue;
            const Real ds = p[j] * (dp[j] - dot) * sc;
            if (ds == 0) continue;
            const std::size_t kj = g * Lk + j;
            if (dQ) {
              Real* dq = dQ->data() + qi * D + c0;
              const Real* kr = K.data() + kj * D + c0;
              for (std::size_t c = 0; c < dh; ++c) dq[c] += ds * kr[c];
            }
            if (dK) {
              Real* dk = dK->data() + kj * D + c0;
              const Real* qr = Q.data() + qi * D + c0;
              for (std::size_t c = 0; c < dh; ++c) dk[c] += ds * qr[c];
            }
          }
        }
      }
    }
  });
}

Var group_dot(Var q, Var k) {
  const Tensor& Q = q.value();
  const Tensor& K = k.value();
  require(Q.cols() == K.cols() && Q.rows() > 0 && K.rows() % Q.rows() == 0, "group_dot",
          shapes(Q, K));
  const std::size_t G = Q.rows(), L = K.rows() / G, D = Q.cols();
  Tensor C(G, L);
  for (std::size_t g = 0; g < G; ++g) {
    for (std::size_t l = 0; l < L; ++l) {
      Real s = 0;
      for (std::size_t c = 0; c < D; ++c) s += Q(g, c) * K(g * L + l, c);
      C(g, l) = s;
    }
  }
  return q.tape->push(std::move(C), {q, k}, [q, k, G, L, D](Tape& t, int self) {
    const Tensor& Gr = t.grad(self);
    const Tensor& Q = t.value(q.id);
    const Tensor& K = t.value(k.id);
    const bool gq = t.needs_grad(q.id), gk = t.needs_grad(k.id);
    Tensor* dQ = gq ? &t.grad(q.id) : nullptr;
    Tensor* dK = gk ? &t.grad(k.id) : nullptr;
    for (std::size_t g = 0; g < G; ++g) {
      for (std::size_t l = 0; l < L; ++l) {
        const Real gr = Gr(g, l);
        if (gr == 0) continue;
        for (std::size_t c = 0; c < D; ++c) {
          if (dQ) (*dQ)(g, c) += gr * K(g * L + l, c);
          if (dK) (*dK)(g * L + l, c) += gr * Q(g, c);
        }
      }
    }
  });
}

}  // namespace mtlkd::nk
