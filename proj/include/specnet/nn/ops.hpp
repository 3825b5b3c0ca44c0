#pragma once

#include <Eigen/SparseCore>
#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "specnet/nn/tape.hpp"

// Differentiable primitives. Every op validates shapes and throws
// Error(ShapeError) instead of broadcasting.

namespace specnet::nn {

template <class T>
using SparseMatrix = Eigen::SparseMatrix<T, Eigen::RowMajor>;

namespace detail {

inline void require(bool ok, const char* op, const std::string& what) {
  if (!ok) throw Error(ErrorKind::ShapeError, std::string(op) + ": " + what);
}

template <class T>
std::string dims(const Var<T>& v) {
  return std::to_string(v.rows()) + "x" + std::to_string(v.cols());
}

}  // namespace detail

template <class T>
Var<T> matmul(Var<T> a, Var<T> b) {
  detail::require(a.cols() == b.rows(), "matmul", detail::dims(a) + " * " + detail::dims(b));
  Tape<T>& t = *a.tape;
  Matrix<T> value = a.value() * b.value();
  Var<T> out = t.push(std::move(value), {a, b});
  if (t.requires_grad(out)) {
    t.set_backward(out, [a, b](Tape<T>& t, const Matrix<T>& g) {
      if (t.requires_grad(a)) t.grad(a).noalias() += g * t.value(b).transpose();
      if (t.requires_grad(b)) t.grad(b).noalias() += t.value(a).transpose() * g;
    });
  }
  return out;
}

/// x * W^T + b, with x (n x in), W (out x in), b (1 x out).
template <class T>
Var<T> linear(Var<T> x, Var<T> w, Var<T> b) {
  detail::require(x.cols() == w.cols(), "linear", "input " + detail::dims(x) + " weights " + detail::dims(w));
  detail::require(b.rows() == 1 && b.cols() == w.rows(), "linear", "bias " + detail::dims(b));
  Tape<T>& t = *x.tape;
  Matrix<T> value = x.value() * w.value().transpose();
  value.rowwise() += b.value().row(0);
  Var<T> out = t.push(std::move(value), {x, w, b});
  if (t.requires_grad(out)) {
    t.set_backward(out, [x, w, b](Tape<T>& t, const Matrix<T>& g) {
      if (t.requires_grad(x)) t.grad(x).noalias() += g * t.value(w);
      if (t.requires_grad(w)) t.grad(w).noalias() += g.transpose() * t.value(x);
      if (t.requires_grad(b)) t.grad(b) += g.colwise().sum();
    });
  }
  return out;
}

template <class T>
Var<T> add(Var<T> a, Var<T> b) {
  detail::require(a.rows() == b.rows() && a.cols() == b.cols(), "add", detail::dims(a) + " + " + detail::dims(b));
  Tape<T>& t = *a.tape;
  Var<T> out = t.push(a.value() + b.value(), {a, b});
  if (t.requires_grad(out)) {
    t.set_backward(out, [a, b](Tape<T>& t, const Matrix<T>& g) {
      if (t.requires_grad(a)) t.grad(a) += g;
      if (t.requires_grad(b)) t.grad(b) += g;
    });
  }
  return out;
}

template <class T>
Var<T> sub(Var<T> a, Var<T> b) {
  detail::require(a.rows() == b.rows() && a.cols() == b.cols(), "sub", detail::dims(a) + " - " + detail::dims(b));
  Tape<T>& t = *a.tape;
  Var<T> out = t.push(a.value() - b.value(), {a, b});
  if (t.requires_grad(out)) {
    t.set_backward(out, [a, b](Tape<T>& t, const Matrix<T>& g) {
      if (t.requires_grad(a)) t.grad(a) += g;
      if (t.requires_grad(b)) t.grad(b) -= g;
    });
  }
  return out;
}

/// Elementwise product.
template <class T>
Var<T> mul(Var<T> a, Var<T> b) {
  detail::require(a.rows() == b.rows() && a.cols() == b.cols(), "mul", detail::dims(a) + " * " + detail::dims(b));
  Tape<T>& t = *a.tape;
  Var<T> out = t.push(a.value().cwiseProduct(b.value()), {a, b});
  if (t.requires_grad(out)) {
    t.set_backward(out, [a, b](Tape<T>& t, const Matrix<T>& g) {
      if (t.requires_grad(a)) t.grad(a) += g.cwiseProduct(t.value(b));
      if (t.requires_grad(b)) t.grad(b) += g.cwiseProduct(t.value(a));
    });
  }
  return out;
}

template <class T>
Var<T> scale(Var<T> a, T factor) {
  Tape<T>& t = *a.tape;
  Var<T> out = t.push(a.value() * factor, {a});
  if (t.requires_grad(out)) {
    t.set_backward(out, [a, factor](Tape<T>& t, const Matrix<T>& g) { t.grad(a) += g * factor; });
  }
  return out;
}

template <class T>
Var<T> add_scalar(Var<T> a, T c) {
  Tape<T>& t = *a.tape;
  Var<T> out = t.push((a.value().array() + c).matrix(), {a});
  if (t.requires_grad(out)) {
    t.set_backward(out, [a](Tape<T>& t, const Matrix<T>& g) { t.grad(a) += g; });
  }
  return out;
}

/// max(x, slope * x); the derivative at exactly 0 is taken as `slope`.
template <class T>
Var<T> leaky_relu(Var<T> a, T slope) {
  Tape<T>& t = *a.tape;
  const Matrix<T>& x = a.value();
  Matrix<T> value = x.unaryExpr([slope](T v) { return v > T(0) ? v : slope * v; });
  std::uint64_t bits = 0;
  for (Eigen::Index i = 0; i < x.size(); ++i) bits = bits * 31 + (x.data()[i] > T(0) ? 1 : 2);
  t.note_branch(bits);
  Var<T> out = t.push(std::move(value), {a});
  if (t.requires_grad(out)) {
    t.set_backward(out, [a, slope](Tape<T>& t, const Matrix<T>& g) {
      const Matrix<T>& x = t.value(a);
      t.grad(a) += g.binaryExpr(x, [slope](T gv, T xv) { return xv > T(0) ? gv : slope * gv; });
    });
  }
  return out;
}

template <class T>
Var<T> tanh(Var<T> a) {
  Tape<T>& t = *a.tape;
  Var<T> out = t.push(a.value().array().tanh().matrix(), {a});
  if (t.requires_grad(out)) {
    t.set_backward(out, [a, out](Tape<T>& t, const Matrix<T>& g) {
      const Matrix<T>& y = t.value(out);
      t.grad(a) += (g.array() * (T(1) - y.array().square())).matrix();
    });
  }
  return out;
}

template <class T>
Var<T> sigmoid(Var<T> a) {
  Tape<T>& t = *a.tape;
  Matrix<T> value = a.value().unaryExpr([](T v) {
    // Split by sign so exp never overflows.
    if (v >= T(0)) return T(1) / (T(1) + std::exp(-v));
    T e = std::exp(v);
    return e / (T(1) + e);
  });
  Var<T> out = t.push(std::move(value), {a});
  if (t.requires_grad(out)) {
    t.set_backward(out, [a, out](Tape<T>& t, const Matrix<T>& g) {
      const Matrix<T>& y = t.value(out);
      t.grad(a) += (g.array() * y.array() * (T(1) - y.array())).matrix();
    });
  }
  return out;
}

template <class T>
Var<T> exp(Var<T> a) {
  Tape<T>& t = *a.tape;
  Var<T> out = t.push(a.value().array().exp().matrix(), {a});
  if (t.requires_grad(out)) {
    t.set_backward(out, [a, out](Tape<T>& t, const Matrix<T>& g) {
      t.grad(a) += g.cwiseProduct(t.value(out));
    });
  }
  return out;
}

template <class T>
Var<T> log(Var<T> a) {
  Tape<T>& t = *a.tape;
  Var<T> out = t.push(a.value().array().log().matrix(), {a});
  if (t.requires_grad(out)) {
    t.set_backward(out, [a](Tape<T>& t, const Matrix<T>& g) {
      t.grad(a) += g.cwiseQuotient(t.value(a));
    });
  }
  return out;
}

template <class T>
Var<T> square(Var<T> a) {
  Tape<T>& t = *a.tape;
  Var<T> out = t.push(a.value().array().square().matrix(), {a});
  if (t.requires_grad(out)) {
    t.set_backward(out, [a](Tape<T>& t, const Matrix<T>& g) {
      t.grad(a) += (T(2) * g.array() * t.value(a).array()).matrix();
    });
  }
  return out;
}

/// Clamps into [lo, hi]; the gradient is zero where the clamp is active.
template <class T>
Var<T> clamp(Var<T> a, T lo, T hi) {
  Tape<T>& t = *a.tape;
  const Matrix<T>& x = a.value();
  std::uint64_t bits = 7;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    T v = x.data()[i];
    bits = bits * 31 + (v < lo ? 1 : (v > hi ? 2 : 3));
  }
  t.note_branch(bits);
  Var<T> out = t.push(x.cwiseMax(lo).cwiseMin(hi), {a});
  if (t.requires_grad(out)) {
    t.set_backward(out, [a, lo, hi](Tape<T>& t, const Matrix<T>& g) {
      const Matrix<T>& x = t.value(a);
      t.grad(a) += g.binaryExpr(x, [lo, hi](T gv, T xv) { return (xv < lo || xv > hi) ? T(0) : gv; });
    });
  }
  return out;
}

template <class T>
Var<T> sum(Var<T> a) {
  Tape<T>& t = *a.tape;
  Matrix<T> value(1, 1);
  value(0, 0) = a.value().sum();
  Var<T> out = t.push(std::move(value), {a});
  if (t.requires_grad(out)) {
    t.set_backward(out, [a](Tape<T>& t, const Matrix<T>& g) { t.grad(a).array() += g(0, 0); });
  }
  return out;
}

template <class T>
Var<T> mean(Var<T> a) {
  detail::require(a.value().size() > 0, "mean", "empty input");
  Tape<T>& t = *a.tape;
  const T n = static_cast<T>(a.value().size());
  Matrix<T> value(1, 1);
  value(0, 0) = a.value().sum() / n;
  Var<T> out = t.push(std::move(value), {a});
  if (t.requires_grad(out)) {
    t.set_backward(out, [a, n](Tape<T>& t, const Matrix<T>& g) { t.grad(a).array() += g(0, 0) / n; });
  }
  return out;
}

/// Mean over rows: (n x c) -> (1 x c).
template <class T>
Var<T> col_mean(Var<T> a) {
  detail::require(a.rows() > 0, "col_mean", "no rows");
  Tape<T>& t = *a.tape;
  const T n = static_cast<T>(a.rows());
  Var<T> out = t.push(a.value().colwise().mean(), {a});
  if (t.requires_grad(out)) {
    t.set_backward(out, [a, n](Tape<T>& t, const Matrix<T>& g) {
      t.grad(a).rowwise() += g.row(0) / n;
    });
  }
  return out;
}

/// Row-wise layer normalisation with learnable gain and shift (both 1 x F).
template <class T>
Var<T> layer_norm(Var<T> x, Var<T> gain, Var<T> shift, T eps = T(1e-5)) {
  const Eigen::Index f = x.cols();
  detail::require(f >= 1, "layer_norm", "empty rows");
  detail::require(gain.rows() == 1 && gain.cols() == f && shift.rows() == 1 && shift.cols() == f,
                  "layer_norm", "gain/shift must be 1x" + std::to_string(f));
  Tape<T>& t = *x.tape;
  const Matrix<T>& in = x.value();
  Matrix<T> normalized(in.rows(), f);
  Eigen::Matrix<T, Eigen::Dynamic, 1> inv_std(in.rows());
  for (Eigen::Index r = 0; r < in.rows(); ++r) {
    T mu = in.row(r).mean();
    T var = (in.row(r).array() - mu).square().mean();
    inv_std(r) = T(1) / std::sqrt(var + eps);
    normalized.row(r) = (in.row(r).array() - mu) * inv_std(r);
  }
  Matrix<T> value = normalized.array().rowwise() * gain.value().row(0).array();
  value.rowwise() += shift.value().row(0);
  Var<T> out = t.push(std::move(value), {x, gain, shift});
  if (t.requires_grad(out)) {
    t.set_backward(out, [x, gain, shift, normalized = std::move(normalized),
                         inv_std = std::move(inv_std)](Tape<T>& t, const Matrix<T>& g) {
      if (t.requires_grad(shift)) t.grad(shift) += g.colwise().sum();
      if (t.requires_grad(gain)) t.grad(gain) += g.cwiseProduct(normalized).colwise().sum();
      if (t.requires_grad(x)) {
        Matrix<T> dn = g.array().rowwise() * t.value(gain).row(0).array();
        Matrix<T>& gx = t.grad(x);
        for (Eigen::Index r = 0; r < dn.rows(); ++r) {
          T mean_dn = dn.row(r).mean();
          T mean_dn_n = dn.row(r).cwiseProduct(normalized.row(r)).mean();
          gx.row(r).array() +=
              inv_std(r) * (dn.row(r).array() - mean_dn - normalized.row(r).array() * mean_dn_n);
        }
      }
    });
  }
  return out;
}

/// Softmax over all entries of a row or column vector, max-stabilised.
template <class T>
Var<T> softmax(Var<T> a) {
  detail::require(a.rows() == 1 || a.cols() == 1, "softmax", "expects a vector, got " + detail::dims(a));
  detail::require(a.value().size() > 0, "softmax", "empty input");
  Tape<T>& t = *a.tape;
  Matrix<T> value = (a.value().array() - a.value().maxCoeff()).exp().matrix();
  value /= value.sum();
  Var<T> out = t.push(std::move(value), {a});
  if (t.requires_grad(out)) {
    t.set_backward(out, [a, out](Tape<T>& t, const Matrix<T>& g) {
      const Matrix<T>& y = t.value(out);
      T dot = g.cwiseProduct(y).sum();
      t.grad(a) += (y.array() * (g.array() - dot)).matrix();
    });
  }
  return out;
}

/// Constant sparse matrix times variable: A (n x m) * X (m x c). The tape
/// shares ownership of A until backward has run.
template <class T>
Var<T> spmm(std::shared_ptr<const SparseMatrix<T>> a, Var<T> x) {
  detail::require(a->cols() == x.rows(), "spmm", "sparse " + std::to_string(a->rows()) + "x" +
                                                     std::to_string(a->cols()) + " * " + detail::dims(x));
  Tape<T>& t = *x.tape;
  Matrix<T> value = (*a) * x.value();
  Var<T> out = t.push(std::move(value), {x});
  if (t.requires_grad(out)) {
    t.set_backward(out, [a = std::move(a), x](Tape<T>& t, const Matrix<T>& g) {
      t.grad(x).noalias() += a->transpose() * g;
    });
  }
  return out;
}

/// Scores rows of H against direction p: H p^T / ||p||, giving (n x 1).
template <class T>
Var<T> projection_score(Var<T> h, Var<T> p) {
  detail::require(p.rows() == 1 && p.cols() == h.cols(), "projection_score", detail::dims(h) + " vs " + detail::dims(p));
  Tape<T>& t = *h.tape;
  const T norm = p.value().norm();
  detail::require(norm > T(0), "projection_score", "zero-norm projection");
  Matrix<T> value = h.value() * p.value().transpose() / norm;
  Var<T> out = t.push(std::move(value), {h, p});
  if (t.requires_grad(out)) {
    t.set_backward(out, [h, p, norm](Tape<T>& t, const Matrix<T>& g) {
      const Matrix<T>& pv = t.value(p);
      if (t.requires_grad(h)) t.grad(h).noalias() += g * pv / norm;
      if (t.requires_grad(p)) {
        Matrix<T> hg = g.transpose() * t.value(h);  // 1 x F
        T along = hg.row(0).dot(pv.row(0));
        t.grad(p) += hg / norm - pv * (along / (norm * norm * norm));
      }
    });
  }
  return out;
}

/// 1 - exp(-x), computed without cancellation near 0.
template <class T>
Var<T> one_minus_exp_neg(Var<T> a) {
  Tape<T>& t = *a.tape;
  Matrix<T> value = a.value().unaryExpr([](T v) { return -std::expm1(-v); });
  Var<T> out = t.push(std::move(value), {a});
  if (t.requires_grad(out)) {
    t.set_backward(out, [a](Tape<T>& t, const Matrix<T>& g) {
      t.grad(a) += g.binaryExpr(t.value(a), [](T gv, T xv) { return gv * std::exp(-xv); });
    });
  }
  return out;
}

template <class T>
Var<T> gather_rows(Var<T> a, std::vector<Eigen::Index> rows) {
  for (auto r : rows) detail::require(r >= 0 && r < a.rows(), "gather_rows", "row index out of range");
  Tape<T>& t = *a.tape;
  const Matrix<T>& src = a.value();
  Matrix<T> value(static_cast<Eigen::Index>(rows.size()), src.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) value.row(static_cast<Eigen::Index>(i)) = src.row(rows[i]);
  Var<T> out = t.push(std::move(value), {a});
  if (t.requires_grad(out)) {
    t.set_backward(out, [a, rows = std::move(rows)](Tape<T>& t, const Matrix<T>& g) {
      Matrix<T>& ga = t.grad(a);
      for (std::size_t i = 0; i < rows.size(); ++i) ga.row(rows[i]) += g.row(static_cast<Eigen::Index>(i));
    });
  }
  return out;
}

template <class T>
Var<T> concat_cols(Var<T> a, Var<T> b) {
  detail::require(a.rows() == b.rows(), "concat_cols", detail::dims(a) + " | " + detail::dims(b));
  Tape<T>& t = *a.tape;
  Matrix<T> value(a.rows(), a.cols() + b.cols());
  value << a.value(), b.value();
  Var<T> out = t.push(std::move(value), {a, b});
  if (t.requires_grad(out)) {
    t.set_backward(out, [a, b](Tape<T>& t, const Matrix<T>& g) {
      const Eigen::Index ca = t.value(a).cols();
      if (t.requires_grad(a)) t.grad(a) += g.leftCols(ca);
      if (t.requires_grad(b)) t.grad(b) += g.rightCols(g.cols() - ca);
    });
  }
  return out;
}

template <class T>
Var<T> concat_rows(const std::vector<Var<T>>& parts) {
  detail::require(!parts.empty(), "concat_rows", "no inputs");
  const Eigen::Index cols = parts.front().cols();
  Eigen::Index rows = 0;
  for (const auto& p : parts) {
    detail::require(p.cols() == cols, "concat_rows", "column mismatch " + detail::dims(p));
    rows += p.rows();
  }
  Tape<T>& t = *parts.front().tape;
  Matrix<T> value(rows, cols);
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    value.middleRows(at, p.rows()) = p.value();
    at += p.rows();
  }
  Var<T> out = t.push(std::move(value), parts);
  if (t.requires_grad(out)) {
    t.set_backward(out, [parts](Tape<T>& t, const Matrix<T>& g) {
      Eigen::Index at = 0;
      for (const auto& p : parts) {
        const Eigen::Index r = t.value(p).rows();
        if (t.requires_grad(p)) t.grad(p) += g.middleRows(at, r);
        at += r;
      }
    });
  }
  return out;
}

template <class T>
Var<T> slice_cols(Var<T> a, Eigen::Index start, Eigen::Index count) {
  detail::require(start >= 0 && count >= 0 && start + count <= a.cols(), "slice_cols", "range out of bounds");
  Tape<T>& t = *a.tape;
  Var<T> out = t.push(a.value().middleCols(start, count), {a});
  if (t.requires_grad(out)) {
    t.set_backward(out, [a, start, count](Tape<T>& t, const Matrix<T>& g) {
      t.grad(a).middleCols(start, count) += g;
    });
  }
  return out;
}

/// Multiplies row i of `a` by s(i); `s` is (n x 1).
template <class T>
Var<T> scale_rows(Var<T> a, Var<T> s) {
  detail::require(s.cols() == 1 && s.rows() == a.rows(), "scale_rows", detail::dims(a) + " by " + detail::dims(s));
  Tape<T>& t = *a.tape;
  Matrix<T> value = a.value().array().colwise() * s.value().col(0).array();
  Var<T> out = t.push(std::move(value), {a, s});
  if (t.requires_grad(out)) {
    t.set_backward(out, [a, s](Tape<T>& t, const Matrix<T>& g) {
      if (t.requires_grad(a)) t.grad(a).array() += g.array().colwise() * t.value(s).col(0).array();
      if (t.requires_grad(s)) t.grad(s).col(0) += g.cwiseProduct(t.value(a)).rowwise().sum();
    });
  }
  return out;
}

/// Child-to-parent attention aggregation for one tree level.
///
/// For parent j with children rows c_1..c_k of `children` (listed in
/// `groups[j]`), weights w = softmax(c_i . p_j) and the message is
/// (1/k) * sum_i w_i c_i. Parents without children receive a zero message.
template <class T>
Var<T> attention_mean(Var<T> children, Var<T> parents, std::vector<std::vector<Eigen::Index>> groups) {
  detail::require(children.cols() == parents.cols(), "attention_mean",
                  detail::dims(children) + " vs " + detail::dims(parents));
  detail::require(static_cast<Eigen::Index>(groups.size()) == parents.rows(), "attention_mean",
                  "one group per parent row required");
  Tape<T>& t = *children.tape;
  const Matrix<T>& c = children.value();
  const Matrix<T>& p = parents.value();
  Matrix<T> value = Matrix<T>::Zero(p.rows(), p.cols());
  std::vector<Eigen::Matrix<T, Eigen::Dynamic, 1>> weights(groups.size());
  for (std::size_t j = 0; j < groups.size(); ++j) {
    const auto& g = groups[j];
    if (g.empty()) continue;
    Eigen::Matrix<T, Eigen::Dynamic, 1> s(static_cast<Eigen::Index>(g.size()));
    for (std::size_t i = 0; i < g.size(); ++i) {
      detail::require(g[i] >= 0 && g[i] < c.rows(), "attention_mean", "child index out of range");
      s(static_cast<Eigen::Index>(i)) = c.row(g[i]).dot(p.row(static_cast<Eigen::Index>(j)));
    }
    s = (s.array() - s.maxCoeff()).exp().matrix();
    s /= s.sum();
    const T inv_k = T(1) / static_cast<T>(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      value.row(static_cast<Eigen::Index>(j)) += inv_k * s(static_cast<Eigen::Index>(i)) * c.row(g[i]);
    }
    weights[j] = std::move(s);
  }
  Var<T> out = t.push(std::move(value), {children, parents});
  if (t.requires_grad(out)) {
    t.set_backward(out, [children, parents, groups = std::move(groups),
                         weights = std::move(weights)](Tape<T>& t, const Matrix<T>& grad) {
      const Matrix<T>& c = t.value(children);
      const Matrix<T>& p = t.value(parents);
      const bool want_c = t.requires_grad(children);
      const bool want_p = t.requires_grad(parents);
      for (std::size_t j = 0; j < groups.size(); ++j) {
        const auto& g = groups[j];
        if (g.empty()) continue;
        const auto& w = weights[j];
        const auto gj = grad.row(static_cast<Eigen::Index>(j));
        const T inv_k = T(1) / static_cast<T>(g.size());
        Eigen::Matrix<T, Eigen::Dynamic, 1> dw(w.size());
        for (std::size_t i = 0; i < g.size(); ++i) dw(static_cast<Eigen::Index>(i)) = inv_k * gj.dot(c.row(g[i]));
        const T weighted = w.dot(dw);
        for (std::size_t i = 0; i < g.size(); ++i) {
          const auto ii = static_cast<Eigen::Index>(i);
          const T ds = w(ii) * (dw(ii) - weighted);
          if (want_c) t.grad(children).row(g[i]) += inv_k * w(ii) * gj + ds * p.row(static_cast<Eigen::Index>(j));
          if (want_p) t.grad(parents).row(static_cast<Eigen::Index>(j)) += ds * c.row(g[i]);
        }
      }
    });
  }
  return out;
}

template <class T>
Var<T> scalar(Tape<T>& t, T v) {
  Matrix<T> m(1, 1);
  m(0, 0) = v;
  return t.constant(std::move(m));
}

}  // namespace specnet::nn
