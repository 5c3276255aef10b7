#pragma once

#include <array>
#include <memory>
#include <vector>

#include "oceancast/dense.hpp"
#include "oceancast/params.hpp"

namespace ocean {

using IndexArray = std::shared_ptr<const std::vector<std::uint32_t>>;

inline IndexArray make_index_array(std::vector<std::uint32_t> v) {
  return std::make_shared<const std::vector<std::uint32_t>>(std::move(v));
}

// Reverse-mode tape over the primitives the model needs: affine maps,
// activations, layer normalization, column concatenation/scaling, row
// gather, segment-sum scatter, and a fused weighted-MSE loss head.
//
// Forward calls append nodes and values; backward(loss) walks the record in
// reverse and returns gradients aligned with the ParamStore order (zeros for
// parameters the forward never touched). A tape is single-threaded in program
// order; independent tapes may run concurrently.
template <class T>
class Tape {
 public:
  explicit Tape(ParamStore<T>* store = nullptr) : store_(store) {
    if (store_) param_nodes_.assign(static_cast<std::size_t>(store_->count()), -1);
  }

  int constant(Matrix<T> value) { return push(Op::Leaf, {-1, -1, -1}, std::move(value), false); }

  int param(const std::string& name) {
    if (!store_) throw ConfigError("tape has no parameter store");
    const int pid = store_->id(name);
    int& cached = param_nodes_[static_cast<std::size_t>(pid)];
    if (cached >= 0) return cached;
    int id = push(Op::Leaf, {-1, -1, -1}, store_->at(pid), true);
    nodes_[static_cast<std::size_t>(id)].param_id = pid;
    cached = id;
    return id;
  }

  int affine(int x, int w, int b) {
    const auto& xm = val(x);
    const auto& wm = val(w);
    const auto& bm = val(b);
    if (xm.cols != wm.rows || bm.cols != wm.cols || bm.rows != 1)
      throw NumericError("affine: shape mismatch");
    Matrix<T> y(xm.rows, wm.cols);
    dense::matmul(y, xm, wm);
    dense::add_row_broadcast(y, bm);
    return push(Op::Affine, {x, w, b}, std::move(y), any_grad({x, w, b}));
  }

  int silu(int x) {
    const auto& xm = val(x);
    Matrix<T> y(xm.rows, xm.cols);
    parallel_for(xm.size(), [&](std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        const T v = xm.data[i];
        y.data[i] = v / (T(1) + std::exp(-v));
      }
    });
    return push(Op::Silu, {x, -1, -1}, std::move(y), needs(x));
  }

  int relu(int x) {
    const auto& xm = val(x);
    Matrix<T> y(xm.rows, xm.cols);
    for (std::size_t i = 0; i < xm.size(); ++i) y.data[i] = xm.data[i] > T(0) ? xm.data[i] : T(0);
    return push(Op::Relu, {x, -1, -1}, std::move(y), needs(x));
  }

  static constexpr double kLayerNormEps = 1e-5;

  int layer_norm(int x, int gain, int offset) {
    const auto& xm = val(x);
    const auto& g = val(gain);
    const auto& b = val(offset);
    if (g.cols != xm.cols || b.cols != xm.cols || g.rows != 1 || b.rows != 1)
      throw NumericError("layer_norm: shape mismatch");
    Matrix<T> y(xm.rows, xm.cols);
    Matrix<T> stats(xm.rows, 2);  // per-row mean, inv-std
    parallel_for(static_cast<std::size_t>(xm.rows), [&](std::size_t lo, std::size_t hi) {
      for (std::size_t r = lo; r < hi; ++r) {
        const T* xr = xm.row(static_cast<int>(r));
        double mean = 0;
        for (int c = 0; c < xm.cols; ++c) mean += xr[c];
        mean /= xm.cols;
        double var = 0;
        for (int c = 0; c < xm.cols; ++c) {
          const double d = xr[c] - mean;
          var += d * d;
        }
        var /= xm.cols;
        const double inv = 1.0 / std::sqrt(var + kLayerNormEps);
        stats(static_cast<int>(r), 0) = static_cast<T>(mean);
        stats(static_cast<int>(r), 1) = static_cast<T>(inv);
        T* yr = y.row(static_cast<int>(r));
        for (int c = 0; c < xm.cols; ++c)
          yr[c] = g.data[c] * static_cast<T>((xr[c] - mean) * inv) + b.data[c];
      }
    });
    const int id = push(Op::LayerNorm, {x, gain, offset}, std::move(y), any_grad({x, gain, offset}));
    nodes_[static_cast<std::size_t>(id)].aux = std::move(stats);
    return id;
  }

  int concat_cols(const std::vector<int>& xs) {
    if (xs.empty()) throw NumericError("concat_cols: empty input");
    int rows = val(xs[0]).rows, cols = 0;
    bool grad = false;
    for (int x : xs) {
      if (val(x).rows != rows) throw NumericError("concat_cols: row mismatch");
      cols += val(x).cols;
      grad = grad || needs(x);
    }
    Matrix<T> y(rows, cols);
    parallel_for(static_cast<std::size_t>(rows), [&](std::size_t lo, std::size_t hi) {
      for (std::size_t r = lo; r < hi; ++r) {
        T* yr = y.row(static_cast<int>(r));
        int off = 0;
        for (int x : xs) {
          const auto& xm = val(x);
          const T* xr = xm.row(static_cast<int>(r));
          for (int c = 0; c < xm.cols; ++c) yr[off + c] = xr[c];
          off += xm.cols;
        }
      }
    });
    const int id = push(Op::ConcatCols, {-1, -1, -1}, std::move(y), grad);
    nodes_[static_cast<std::size_t>(id)].many = xs;
    return id;
  }

  int add(int a, int b) {
    const auto& am = val(a);
    const auto& bm = val(b);
    if (am.rows != bm.rows || am.cols != bm.cols) throw NumericError("add: shape mismatch");
    Matrix<T> y(am.rows, am.cols);
    for (std::size_t i = 0; i < am.size(); ++i) y.data[i] = am.data[i] + bm.data[i];
    return push(Op::Add, {a, b, -1}, std::move(y), any_grad({a, b}));
  }

  int lincomb(int a, int b, double ca, double cb) {
    const auto& am = val(a);
    const auto& bm = val(b);
    if (am.rows != bm.rows || am.cols != bm.cols) throw NumericError("lincomb: shape mismatch");
    Matrix<T> y(am.rows, am.cols);
    for (std::size_t i = 0; i < am.size(); ++i)
      y.data[i] = static_cast<T>(ca * am.data[i] + cb * bm.data[i]);
    const int id = push(Op::Lincomb, {a, b, -1}, std::move(y), any_grad({a, b}));
    nodes_[static_cast<std::size_t>(id)].ca = ca;
    nodes_[static_cast<std::size_t>(id)].cb = cb;
    return id;
  }

  // y[r][c] = x[r][c] * s[c]
  int scale_cols(int x, std::vector<T> s) {
    const auto& xm = val(x);
    if (static_cast<int>(s.size()) != xm.cols) throw NumericError("scale_cols: size mismatch");
    Matrix<T> y(xm.rows, xm.cols);
    for (int r = 0; r < xm.rows; ++r)
      for (int c = 0; c < xm.cols; ++c) y(r, c) = xm(r, c) * s[static_cast<std::size_t>(c)];
    const int id = push(Op::ScaleCols, {x, -1, -1}, std::move(y), needs(x));
    nodes_[static_cast<std::size_t>(id)].colvec = std::move(s);
    return id;
  }

  // y[r][c] = x[r][c] + s[c]
  int shift_cols(int x, std::vector<T> s) {
    const auto& xm = val(x);
    if (static_cast<int>(s.size()) != xm.cols) throw NumericError("shift_cols: size mismatch");
    Matrix<T> y(xm.rows, xm.cols);
    for (int r = 0; r < xm.rows; ++r)
      for (int c = 0; c < xm.cols; ++c) y(r, c) = xm(r, c) + s[static_cast<std::size_t>(c)];
    return push(Op::ShiftCols, {x, -1, -1}, std::move(y), needs(x));
  }

  int gather_rows(int x, IndexArray idx) {
    const auto& xm = val(x);
    for (auto i : *idx)
      if (i >= static_cast<std::uint32_t>(xm.rows)) throw NumericError("gather_rows: index out of range");
    Matrix<T> y(static_cast<int>(idx->size()), xm.cols);
    parallel_for(idx->size(), [&](std::size_t lo, std::size_t hi) {
      for (std::size_t r = lo; r < hi; ++r) {
        const T* src = xm.row(static_cast<int>((*idx)[r]));
        T* dst = y.row(static_cast<int>(r));
        for (int c = 0; c < xm.cols; ++c) dst[c] = src[c];
      }
    });
    const int id = push(Op::GatherRows, {x, -1, -1}, std::move(y), needs(x));
    nodes_[static_cast<std::size_t>(id)].index = std::move(idx);
    return id;
  }

  // y[s] = sum of x rows whose receiver id is s; receivers with no incoming
  // rows get zeros. Accumulation runs in row order regardless of threads.
  int segment_sum(int x, IndexArray receivers, int n_out) {
    const auto& xm = val(x);
    if (static_cast<int>(receivers->size()) != xm.rows)
      throw NumericError("segment_sum: receiver count mismatch");
    for (auto i : *receivers)
      if (i >= static_cast<std::uint32_t>(n_out)) throw NumericError("segment_sum: index out of range");
    Matrix<T> y(n_out, xm.cols);
    for (int r = 0; r < xm.rows; ++r) {
      T* dst = y.row(static_cast<int>((*receivers)[static_cast<std::size_t>(r)]));
      const T* src = xm.row(r);
      for (int c = 0; c < xm.cols; ++c) dst[c] += src[c];
    }
    const int id = push(Op::SegmentSum, {x, -1, -1}, std::move(y), needs(x));
    nodes_[static_cast<std::size_t>(id)].index = std::move(receivers);
    return id;
  }

  // Scalar sum of all entries.
  int sum_all(int x) {
    const auto& xm = val(x);
    double acc = 0.0;
    for (T v : xm.data) acc += static_cast<double>(v);
    Matrix<T> y(1, 1);
    y(0, 0) = static_cast<T>(acc);
    return push(Op::SumAll, {x, -1, -1}, std::move(y), needs(x));
  }

  // Scalar loss: (1/rows) * sum_{r,c} col_w[c] * (x[r][c] - target[r][c])^2
  int weighted_mse_vs(int x, Matrix<T> target, std::vector<T> col_w) {
    const auto& xm = val(x);
    if (target.rows != xm.rows || target.cols != xm.cols ||
        static_cast<int>(col_w.size()) != xm.cols)
      throw NumericError("weighted_mse_vs: shape mismatch");
    double acc = 0.0;
    for (int r = 0; r < xm.rows; ++r) {
      const T* xr = xm.row(r);
      const T* tr = target.row(r);
      for (int c = 0; c < xm.cols; ++c) {
        const double d = static_cast<double>(xr[c]) - tr[c];
        acc += static_cast<double>(col_w[static_cast<std::size_t>(c)]) * d * d;
      }
    }
    Matrix<T> y(1, 1);
    y(0, 0) = static_cast<T>(acc / xm.rows);
    const int id = push(Op::WeightedMse, {x, -1, -1}, std::move(y), needs(x));
    nodes_[static_cast<std::size_t>(id)].aux = std::move(target);
    nodes_[static_cast<std::size_t>(id)].colvec = std::move(col_w);
    return id;
  }

  const Matrix<T>& value(int id) const { return val(id); }
  std::size_t node_count() const { return nodes_.size(); }

  std::vector<Matrix<T>> backward(int loss_id) {
    if (loss_id < 0 || loss_id >= static_cast<int>(nodes_.size()))
      throw NumericError("backward: no recorded forward for the given node");
    if (val(loss_id).rows != 1 || val(loss_id).cols != 1)
      throw NumericError("backward: loss node must be scalar");
    std::vector<Matrix<T>> grad(nodes_.size());
    grad[static_cast<std::size_t>(loss_id)] = Matrix<T>(1, 1);
    grad[static_cast<std::size_t>(loss_id)](0, 0) = T(1);

    for (int i = loss_id; i >= 0; --i) {
      Node& n = nodes_[static_cast<std::size_t>(i)];
      Matrix<T>& gy = grad[static_cast<std::size_t>(i)];
      if (!n.needs_grad || gy.size() == 0) continue;
      switch (n.op) {
        case Op::Leaf:
          break;
        case Op::Affine: {
          const auto& x = val(n.in[0]);
          const auto& w = val(n.in[1]);
          if (needs(n.in[0])) dense::matmul_nt_add(ensure(grad, n.in[0]), gy, w);
          if (needs(n.in[1])) dense::matmul_tn_add(ensure(grad, n.in[1]), x, gy);
          if (needs(n.in[2])) {
            auto& gb = ensure(grad, n.in[2]);
            for (int r = 0; r < gy.rows; ++r)
              for (int c = 0; c < gy.cols; ++c) gb(0, c) += gy(r, c);
          }
          break;
        }
        case Op::Silu: {
          const auto& x = val(n.in[0]);
          auto& gx = ensure(grad, n.in[0]);
          parallel_for(x.size(), [&](std::size_t lo, std::size_t hi) {
            for (std::size_t k = lo; k < hi; ++k) {
              const T v = x.data[k];
              const T s = T(1) / (T(1) + std::exp(-v));
              gx.data[k] += gy.data[k] * s * (T(1) + v * (T(1) - s));
            }
          });
          break;
        }
        case Op::Relu: {
          const auto& x = val(n.in[0]);
          auto& gx = ensure(grad, n.in[0]);
          for (std::size_t k = 0; k < x.size(); ++k)
            if (x.data[k] > T(0)) gx.data[k] += gy.data[k];
          break;
        }
        case Op::LayerNorm: {
          const auto& x = val(n.in[0]);
          const auto& g = val(n.in[1]);
          const int C = x.cols;
          auto* gx = needs(n.in[0]) ? &ensure(grad, n.in[0]) : nullptr;
          auto* gg = needs(n.in[1]) ? &ensure(grad, n.in[1]) : nullptr;
          auto* gb = needs(n.in[2]) ? &ensure(grad, n.in[2]) : nullptr;
          for (int r = 0; r < x.rows; ++r) {
            const T mean = n.aux(r, 0), inv = n.aux(r, 1);
            const T* xr = x.row(r);
            const T* gyr = gy.row(r);
            double sum_dyh = 0, sum_dyh_xhat = 0;
            for (int c = 0; c < C; ++c) {
              const double xhat = (xr[c] - mean) * inv;
              const double dyh = static_cast<double>(gyr[c]) * g.data[c];
              sum_dyh += dyh;
              sum_dyh_xhat += dyh * xhat;
              if (gg) gg->data[c] += static_cast<T>(gyr[c] * xhat);
              if (gb) gb->data[c] += gyr[c];
            }
            if (gx) {
              const double m1 = sum_dyh / C, m2 = sum_dyh_xhat / C;
              T* gxr = gx->row(r);
              for (int c = 0; c < C; ++c) {
                const double xhat = (xr[c] - mean) * inv;
                const double dyh = static_cast<double>(gyr[c]) * g.data[c];
                gxr[c] += static_cast<T>(inv * (dyh - m1 - xhat * m2));
              }
            }
          }
          break;
        }
        case Op::ConcatCols: {
          int off = 0;
          for (int x : n.many) {
            const auto& xm = val(x);
            if (needs(x)) {
              auto& gx = ensure(grad, x);
              for (int r = 0; r < xm.rows; ++r)
                for (int c = 0; c < xm.cols; ++c) gx(r, c) += gy(r, off + c);
            }
            off += xm.cols;
          }
          break;
        }
        case Op::Add:
          for (int k = 0; k < 2; ++k)
            if (needs(n.in[k])) {
              auto& gx = ensure(grad, n.in[k]);
              for (std::size_t j = 0; j < gy.size(); ++j) gx.data[j] += gy.data[j];
            }
          break;
        case Op::Lincomb: {
          const double coef[2] = {n.ca, n.cb};
          for (int k = 0; k < 2; ++k)
            if (needs(n.in[k])) {
              auto& gx = ensure(grad, n.in[k]);
              for (std::size_t j = 0; j < gy.size(); ++j)
                gx.data[j] += static_cast<T>(coef[k] * gy.data[j]);
            }
          break;
        }
        case Op::ScaleCols: {
          auto& gx = ensure(grad, n.in[0]);
          for (int r = 0; r < gy.rows; ++r)
            for (int c = 0; c < gy.cols; ++c)
              gx(r, c) += gy(r, c) * n.colvec[static_cast<std::size_t>(c)];
          break;
        }
        case Op::ShiftCols: {
          auto& gx = ensure(grad, n.in[0]);
          for (std::size_t j = 0; j < gy.size(); ++j) gx.data[j] += gy.data[j];
          break;
        }
        case Op::GatherRows: {
          auto& gx = ensure(grad, n.in[0]);
          for (std::size_t r = 0; r < n.index->size(); ++r) {
            T* dst = gx.row(static_cast<int>((*n.index)[r]));
            const T* src = gy.row(static_cast<int>(r));
            for (int c = 0; c < gy.cols; ++c) dst[c] += src[c];
          }
          break;
        }
        case Op::SegmentSum: {
          auto& gx = ensure(grad, n.in[0]);
          for (std::size_t r = 0; r < n.index->size(); ++r) {
            const T* src = gy.row(static_cast<int>((*n.index)[r]));
            T* dst = gx.row(static_cast<int>(r));
            for (int c = 0; c < gy.cols; ++c) dst[c] += src[c];
          }
          break;
        }
        case Op::SumAll: {
          auto& gx = ensure(grad, n.in[0]);
          const T g = gy(0, 0);
          for (auto& v : gx.data) v += g;
          break;
        }
        case Op::WeightedMse: {
          const auto& x = val(n.in[0]);
          auto& gx = ensure(grad, n.in[0]);
          const T scale = gy(0, 0);
          for (int r = 0; r < x.rows; ++r)
            for (int c = 0; c < x.cols; ++c)
              gx(r, c) += static_cast<T>(2.0 * scale * n.colvec[static_cast<std::size_t>(c)] *
                                         (x(r, c) - n.aux(r, c)) / x.rows);
          break;
        }
      }
      // Node gradients are no longer needed once propagated.
      if (n.param_id < 0) gy = Matrix<T>();
    }

    std::vector<Matrix<T>> out;
    out.reserve(static_cast<std::size_t>(store_ ? store_->count() : 0));
    if (store_) {
      for (int p = 0; p < store_->count(); ++p) {
        const int node = param_nodes_[static_cast<std::size_t>(p)];
        if (node >= 0 && grad[static_cast<std::size_t>(node)].size() != 0)
          out.push_back(std::move(grad[static_cast<std::size_t>(node)]));
        else
          out.emplace_back(store_->at(p).rows, store_->at(p).cols);
      }
    }
    return out;
  }

 private:
  enum class Op {
    Leaf,
    Affine,
    Silu,
    Relu,
    LayerNorm,
    ConcatCols,
    Add,
    Lincomb,
    ScaleCols,
    ShiftCols,
    GatherRows,
    SegmentSum,
    SumAll,
    WeightedMse
  };

  struct Node {
    Op op;
    std::array<int, 3> in;
    std::vector<int> many;
    Matrix<T> value;
    Matrix<T> aux;
    std::vector<T> colvec;
    IndexArray index;
    double ca = 1.0, cb = 1.0;
    int param_id = -1;
    bool needs_grad = false;
  };

  int push(Op op, std::array<int, 3> in, Matrix<T> value, bool needs_grad) {
    Node n;
    n.op = op;
    n.in = in;
    n.value = std::move(value);
    n.needs_grad = needs_grad;
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
  }

  const Matrix<T>& val(int id) const { return nodes_[static_cast<std::size_t>(id)].value; }
  bool needs(int id) const { return id >= 0 && nodes_[static_cast<std::size_t>(id)].needs_grad; }
  bool any_grad(std::initializer_list<int> ids) const {
    for (int id : ids)
      if (needs(id)) return true;
    return false;
  }
  Matrix<T>& ensure(std::vector<Matrix<T>>& grad, int id) {
    auto& g = grad[static_cast<std::size_t>(id)];
    if (g.size() == 0) g = Matrix<T>(val(id).rows, val(id).cols);
    return g;
  }

  ParamStore<T>* store_;
  std::vector<Node> nodes_;
  std::vector<int> param_nodes_;
};

}  // namespace ocean
