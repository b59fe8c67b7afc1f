//
// Project MolStory - Copyright 2026 MolStory Developers.
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLSTORY_TENSOR_HPP
#define MOLSTORY_TENSOR_HPP

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "molstory/error.hpp"
#include "molstory/rng.hpp"

namespace molstory {

/// Reverse-mode autodiff over dense 64-bit tensors (rank 1 and 2). Small and
/// deterministic: evaluation order is fixed by node creation order, so two
/// identical runs produce bit-identical gradients.
class Tensor {
public:
  struct Node {
    std::vector<int> shape;
    std::vector<double> value;
    std::vector<double> grad;
    bool requires_grad = false;
    std::vector<std::shared_ptr<Node>> parents;
    std::function<void(Node&)> backward;
    std::uint64_t id = 0;
  };

  Tensor() = default;
  explicit Tensor(std::shared_ptr<Node> n) : n_(std::move(n)) {}

  static Tensor zeros(std::vector<int> shape, bool requires_grad = false) {
    return make(std::move(shape), 0.0, requires_grad);
  }

  static Tensor full(std::vector<int> shape, double v,
                     bool requires_grad = false) {
    return make(std::move(shape), v, requires_grad);
  }

  static Tensor scalar(double v, bool requires_grad = false) {
    return make({1}, v, requires_grad);
  }

  static Tensor from_values(std::vector<int> shape, std::vector<double> v,
                            bool requires_grad = false) {
    auto n = std::make_shared<Node>();
    n->shape = std::move(shape);
    n->value = std::move(v);
    if (static_cast<std::size_t>(numel(n->shape)) != n->value.size())
      throw Error("tensor value size does not match shape");
    n->grad.assign(n->value.size(), 0.0);
    n->requires_grad = requires_grad;
    n->id = next_id();
    return Tensor(n);
  }

  /// Scaled uniform fan-in initialization for parameters.
  static Tensor init_uniform(std::vector<int> shape, int fan_in, Rng& rng) {
    double bound = 1.0 / std::sqrt(static_cast<double>(std::max(1, fan_in)));
    auto n = std::make_shared<Node>();
    n->shape = std::move(shape);
    n->value.resize(numel(n->shape));
    for (auto& x : n->value) x = (2.0 * rng.uniform() - 1.0) * bound;
    n->grad.assign(n->value.size(), 0.0);
    n->requires_grad = true;
    n->id = next_id();
    return Tensor(n);
  }

  bool defined() const { return static_cast<bool>(n_); }
  const std::vector<int>& shape() const { return n_->shape; }
  int rows() const { return n_->shape[0]; }
  int cols() const { return n_->shape.size() > 1 ? n_->shape[1] : 1; }
  std::vector<double>& value() { return n_->value; }
  const std::vector<double>& value() const { return n_->value; }
  std::vector<double>& grad() { return n_->grad; }
  const std::vector<double>& grad() const { return n_->grad; }
  bool requires_grad() const { return n_->requires_grad; }
  double item() const { return n_->value.at(0); }
  std::shared_ptr<Node> node() const { return n_; }

  /// Runs reverse-mode differentiation from this (scalar) node.
  void backward() {
    if (n_->value.size() != 1)
      throw Error("backward requires a scalar root");
    std::vector<Node*> topo;
    std::vector<const Node*> seen;
    collect(n_.get(), topo, seen);
    for (Node* node : topo) node->grad.assign(node->value.size(), 0.0);
    n_->grad[0] = 1.0;
    for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
      if ((*it)->backward) (*it)->backward(**it);
    }
  }

  static int numel(const std::vector<int>& shape) {
    int n = 1;
    for (int d : shape) n *= d;
    return n;
  }

private:
  static Tensor make(std::vector<int> shape, double v, bool requires_grad) {
    auto n = std::make_shared<Node>();
    n->shape = std::move(shape);
    n->value.assign(numel(n->shape), v);
    n->grad.assign(n->value.size(), 0.0);
    n->requires_grad = requires_grad;
    n->id = next_id();
    return Tensor(n);
  }

  static std::uint64_t next_id() {
    static thread_local std::uint64_t counter = 0;
    return ++counter;
  }

  static void collect(Node* n, std::vector<Node*>& topo,
                      std::vector<const Node*>& seen) {
    for (const Node* s : seen)
      if (s == n) return;
    seen.push_back(n);
    for (auto& p : n->parents) collect(p.get(), topo, seen);
    topo.push_back(n);
  }

  std::shared_ptr<Node> n_;
};

namespace ops {

namespace detail {

inline Tensor unary(const Tensor& a, std::vector<int> shape,
                    std::function<void(const std::vector<double>&,
                                       std::vector<double>&)> fwd,
                    std::function<void(Tensor::Node&)> bwd) {
  auto n = std::make_shared<Tensor::Node>();
  n->shape = std::move(shape);
  n->value.resize(Tensor::numel(n->shape));
  fwd(a.value(), n->value);
  n->grad.assign(n->value.size(), 0.0);
  n->requires_grad = a.requires_grad();
  n->parents = {a.node()};
  n->backward = std::move(bwd);
  n->id = 0;
  return Tensor(n);
}

}  // namespace detail

inline void check_same_shape(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) throw Error("tensor shape mismatch");
}

inline Tensor add(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b);
  auto n = std::make_shared<Tensor::Node>();
  n->shape = a.shape();
  n->value.resize(a.value().size());
  for (std::size_t i = 0; i < n->value.size(); ++i)
    n->value[i] = a.value()[i] + b.value()[i];
  n->grad.assign(n->value.size(), 0.0);
  n->requires_grad = a.requires_grad() || b.requires_grad();
  n->parents = {a.node(), b.node()};
  n->backward = [](Tensor::Node& out) {
    for (std::size_t i = 0; i < out.value.size(); ++i) {
      out.parents[0]->grad[i] += out.grad[i];
      out.parents[1]->grad[i] += out.grad[i];
    }
  };
  return Tensor(n);
}

inline Tensor sub(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b);
  auto n = std::make_shared<Tensor::Node>();
  n->shape = a.shape();
  n->value.resize(a.value().size());
  for (std::size_t i = 0; i < n->value.size(); ++i)
    n->value[i] = a.value()[i] - b.value()[i];
  n->grad.assign(n->value.size(), 0.0);
  n->requires_grad = a.requires_grad() || b.requires_grad();
  n->parents = {a.node(), b.node()};
  n->backward = [](Tensor::Node& out) {
    for (std::size_t i = 0; i < out.value.size(); ++i) {
      out.parents[0]->grad[i] += out.grad[i];
      out.parents[1]->grad[i] -= out.grad[i];
    }
  };
  return Tensor(n);
}

inline Tensor mul(const Tensor& a, const Tensor& b) {
  check_same_shape(a, b);
  auto n = std::make_shared<Tensor::Node>();
  n->shape = a.shape();
  n->value.resize(a.value().size());
  for (std::size_t i = 0; i < n->value.size(); ++i)
    n->value[i] = a.value()[i] * b.value()[i];
  n->grad.assign(n->value.size(), 0.0);
  n->requires_grad = a.requires_grad() || b.requires_grad();
  n->parents = {a.node(), b.node()};
  n->backward = [](Tensor::Node& out) {
    for (std::size_t i = 0; i < out.value.size(); ++i) {
      out.parents[0]->grad[i] += out.grad[i] * out.parents[1]->value[i];
      out.parents[1]->grad[i] += out.grad[i] * out.parents[0]->value[i];
    }
  };
  return Tensor(n);
}

inline Tensor scale(const Tensor& a, double s) {
  return detail::unary(
      a, a.shape(),
      [s](const std::vector<double>& in, std::vector<double>& out) {
        for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] * s;
      },
      [s](Tensor::Node& out) {
        for (std::size_t i = 0; i < out.value.size(); ++i)
          out.parents[0]->grad[i] += out.grad[i] * s;
      });
}

/// s (shape [1], learnable) times a constant matrix; used for the geometry
/// discount term.
inline Tensor scalar_times_const(const Tensor& s, std::vector<int> shape,
                                 std::vector<double> constant) {
  if (s.value().size() != 1) throw Error("expected scalar tensor");
  auto n = std::make_shared<Tensor::Node>();
  n->shape = std::move(shape);
  if (static_cast<std::size_t>(Tensor::numel(n->shape)) != constant.size())
    throw Error("constant size mismatch");
  n->value.resize(constant.size());
  for (std::size_t i = 0; i < constant.size(); ++i)
    n->value[i] = s.value()[0] * constant[i];
  n->grad.assign(n->value.size(), 0.0);
  n->requires_grad = s.requires_grad();
  n->parents = {s.node()};
  auto cst = std::make_shared<std::vector<double>>(std::move(constant));
  n->backward = [cst](Tensor::Node& out) {
    double g = 0.0;
    for (std::size_t i = 0; i < out.value.size(); ++i)
      g += out.grad[i] * (*cst)[i];
    out.parents[0]->grad[0] += g;
  };
  return Tensor(n);
}

inline Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.shape().size() != 2 || b.shape().size() != 2 ||
      a.shape()[1] != b.shape()[0])
    throw Error("matmul shape mismatch");
  int m = a.shape()[0], k = a.shape()[1], p = b.shape()[1];
  auto n = std::make_shared<Tensor::Node>();
  n->shape = {m, p};
  n->value.assign(static_cast<std::size_t>(m) * p, 0.0);
  for (int i = 0; i < m; ++i)
    for (int t = 0; t < k; ++t) {
      double av = a.value()[i * k + t];
      for (int j = 0; j < p; ++j)
        n->value[i * p + j] += av * b.value()[t * p + j];
    }
  n->grad.assign(n->value.size(), 0.0);
  n->requires_grad = a.requires_grad() || b.requires_grad();
  n->parents = {a.node(), b.node()};
  n->backward = [m, k, p](Tensor::Node& out) {
    auto& ga = out.parents[0]->grad;
    auto& gb = out.parents[1]->grad;
    const auto& av = out.parents[0]->value;
    const auto& bv = out.parents[1]->value;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < p; ++j) {
        double go = out.grad[i * p + j];
        if (go == 0.0) continue;
        for (int t = 0; t < k; ++t) {
          ga[i * k + t] += go * bv[t * p + j];
          gb[t * p + j] += go * av[i * k + t];
        }
      }
  };
  return Tensor(n);
}

inline Tensor transpose(const Tensor& a) {
  if (a.shape().size() != 2) throw Error("transpose requires rank 2");
  int m = a.shape()[0], p = a.shape()[1];
  auto n = std::make_shared<Tensor::Node>();
  n->shape = {p, m};
  n->value.resize(a.value().size());
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < p; ++j) n->value[j * m + i] = a.value()[i * p + j];
  n->grad.assign(n->value.size(), 0.0);
  n->requires_grad = a.requires_grad();
  n->parents = {a.node()};
  n->backward = [m, p](Tensor::Node& out) {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < p; ++j)
        out.parents[0]->grad[i * p + j] += out.grad[j * m + i];
  };
  return Tensor(n);
}

/// Adds a row vector to every row of a matrix.
inline Tensor add_row_broadcast(const Tensor& a, const Tensor& row) {
  if (a.shape().size() != 2 || row.shape().size() != 1 ||
      row.shape()[0] != a.shape()[1])
    throw Error("broadcast shape mismatch");
  int m = a.shape()[0], p = a.shape()[1];
  auto n = std::make_shared<Tensor::Node>();
  n->shape = a.shape();
  n->value.resize(a.value().size());
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < p; ++j)
      n->value[i * p + j] = a.value()[i * p + j] + row.value()[j];
  n->grad.assign(n->value.size(), 0.0);
  n->requires_grad = a.requires_grad() || row.requires_grad();
  n->parents = {a.node(), row.node()};
  n->backward = [m, p](Tensor::Node& out) {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < p; ++j) {
        out.parents[0]->grad[i * p + j] += out.grad[i * p + j];
        out.parents[1]->grad[j] += out.grad[i * p + j];
      }
  };
  return Tensor(n);
}

inline Tensor row_softmax(const Tensor& a) {
  if (a.shape().size() != 2) throw Error("softmax requires rank 2");
  int m = a.shape()[0], p = a.shape()[1];
  auto n = std::make_shared<Tensor::Node>();
  n->shape = a.shape();
  n->value.resize(a.value().size());
  for (int i = 0; i < m; ++i) {
    double mx = a.value()[i * p];
    for (int j = 1; j < p; ++j) mx = std::max(mx, a.value()[i * p + j]);
    double z = 0.0;
    for (int j = 0; j < p; ++j) {
      n->value[i * p + j] = std::exp(a.value()[i * p + j] - mx);
      z += n->value[i * p + j];
    }
    for (int j = 0; j < p; ++j) n->value[i * p + j] /= z;
  }
  n->grad.assign(n->value.size(), 0.0);
  n->requires_grad = a.requires_grad();
  n->parents = {a.node()};
  n->backward = [m, p](Tensor::Node& out) {
    for (int i = 0; i < m; ++i) {
      double dot = 0.0;
      for (int j = 0; j < p; ++j)
        dot += out.grad[i * p + j] * out.value[i * p + j];
      for (int j = 0; j < p; ++j)
        out.parents[0]->grad[i * p + j] +=
            out.value[i * p + j] * (out.grad[i * p + j] - dot);
    }
  };
  return Tensor(n);
}

inline Tensor gelu(const Tensor& a) {
  constexpr double inv_sqrt2 = 0.7071067811865476;
  constexpr double inv_sqrt2pi = 0.3989422804014327;
  return detail::unary(
      a, a.shape(),
      [](const std::vector<double>& in, std::vector<double>& out) {
        for (std::size_t i = 0; i < in.size(); ++i)
          out[i] = 0.5 * in[i] * (1.0 + std::erf(in[i] * inv_sqrt2));
      },
      [](Tensor::Node& out) {
        const auto& x = out.parents[0]->value;
        for (std::size_t i = 0; i < out.value.size(); ++i) {
          double phi = 0.5 * (1.0 + std::erf(x[i] * inv_sqrt2));
          double pdf = inv_sqrt2pi * std::exp(-0.5 * x[i] * x[i]);
          out.parents[0]->grad[i] += out.grad[i] * (phi + x[i] * pdf);
        }
      });
}

inline Tensor sigmoid(const Tensor& a) {
  return detail::unary(
      a, a.shape(),
      [](const std::vector<double>& in, std::vector<double>& out) {
        for (std::size_t i = 0; i < in.size(); ++i)
          out[i] = 1.0 / (1.0 + std::exp(-in[i]));
      },
      [](Tensor::Node& out) {
        for (std::size_t i = 0; i < out.value.size(); ++i)
          out.parents[0]->grad[i] +=
              out.grad[i] * out.value[i] * (1.0 - out.value[i]);
      });
}

inline Tensor mean(const Tensor& a) {
  double inv = 1.0 / static_cast<double>(a.value().size());
  auto n = std::make_shared<Tensor::Node>();
  n->shape = {1};
  double s = 0.0;
  for (double v : a.value()) s += v;
  n->value = {s * inv};
  n->grad = {0.0};
  n->requires_grad = a.requires_grad();
  n->parents = {a.node()};
  n->backward = [inv](Tensor::Node& out) {
    for (auto& g : out.parents[0]->grad) g += out.grad[0] * inv;
  };
  return Tensor(n);
}

inline Tensor add_scalars(const std::vector<Tensor>& xs) {
  if (xs.empty()) throw Error("empty sum");
  auto n = std::make_shared<Tensor::Node>();
  n->shape = {1};
  double s = 0.0;
  bool rg = false;
  for (const auto& x : xs) {
    s += x.item();
    rg = rg || x.requires_grad();
  }
  n->value = {s};
  n->grad = {0.0};
  n->requires_grad = rg;
  for (const auto& x : xs) n->parents.push_back(x.node());
  n->backward = [](Tensor::Node& out) {
    for (auto& p : out.parents) p->grad[0] += out.grad[0];
  };
  return Tensor(n);
}

inline Tensor slice_cols(const Tensor& a, int from, int to) {
  if (a.shape().size() != 2) throw Error("slice_cols requires rank 2");
  int m = a.shape()[0], p = a.shape()[1];
  int w = to - from;
  auto n = std::make_shared<Tensor::Node>();
  n->shape = {m, w};
  n->value.resize(static_cast<std::size_t>(m) * w);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < w; ++j)
      n->value[i * w + j] = a.value()[i * p + from + j];
  n->grad.assign(n->value.size(), 0.0);
  n->requires_grad = a.requires_grad();
  n->parents = {a.node()};
  n->backward = [m, p, w, from](Tensor::Node& out) {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < w; ++j)
        out.parents[0]->grad[i * p + from + j] += out.grad[i * w + j];
  };
  return Tensor(n);
}

inline Tensor concat_cols(const std::vector<Tensor>& xs) {
  if (xs.empty()) throw Error("empty concat");
  int m = xs[0].shape()[0];
  int total = 0;
  bool rg = false;
  for (const auto& x : xs) {
    if (x.shape().size() != 2 || x.shape()[0] != m)
      throw Error("concat_cols shape mismatch");
    total += x.shape()[1];
    rg = rg || x.requires_grad();
  }
  auto n = std::make_shared<Tensor::Node>();
  n->shape = {m, total};
  n->value.resize(static_cast<std::size_t>(m) * total);
  int off = 0;
  for (const auto& x : xs) {
    int w = x.shape()[1];
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < w; ++j)
        n->value[i * total + off + j] = x.value()[i * w + j];
    off += w;
  }
  n->grad.assign(n->value.size(), 0.0);
  n->requires_grad = rg;
  std::vector<int> widths;
  for (const auto& x : xs) {
    n->parents.push_back(x.node());
    widths.push_back(x.shape()[1]);
  }
  n->backward = [m, total, widths](Tensor::Node& out) {
    int off2 = 0;
    for (std::size_t t = 0; t < out.parents.size(); ++t) {
      int w = widths[t];
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < w; ++j)
          out.parents[t]->grad[i * w + j] += out.grad[i * total + off2 + j];
      off2 += w;
    }
  };
  return Tensor(n);
}

/// Embedding lookup: rows of `table` selected by `indices`.
inline Tensor gather_rows(const Tensor& table, const std::vector<int>& indices) {
  if (table.shape().size() != 2) throw Error("gather_rows requires rank 2");
  int p = table.shape()[1];
  int m = static_cast<int>(indices.size());
  auto n = std::make_shared<Tensor::Node>();
  n->shape = {m, p};
  n->value.resize(static_cast<std::size_t>(m) * p);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < p; ++j)
      n->value[i * p + j] = table.value()[indices[i] * p + j];
  n->grad.assign(n->value.size(), 0.0);
  n->requires_grad = table.requires_grad();
  n->parents = {table.node()};
  auto idx = std::make_shared<std::vector<int>>(indices);
  n->backward = [p, idx](Tensor::Node& out) {
    for (std::size_t i = 0; i < idx->size(); ++i)
      for (int j = 0; j < p; ++j)
        out.parents[0]->grad[(*idx)[i] * p + j] += out.grad[i * p + j];
  };
  return Tensor(n);
}

/// Per-row layer normalization with learnable scale and offset.
inline Tensor layer_norm_rows(const Tensor& a, const Tensor& gamma,
                              const Tensor& beta, double eps = 1e-8) {
  if (a.shape().size() != 2) throw Error("layer_norm requires rank 2");
  int m = a.shape()[0], p = a.shape()[1];
  if (gamma.shape() != std::vector<int>{p} || beta.shape() != std::vector<int>{p})
    throw Error("layer_norm parameter shape mismatch");
  auto n = std::make_shared<Tensor::Node>();
  n->shape = a.shape();
  n->value.resize(a.value().size());
  auto stats = std::make_shared<std::vector<double>>(2 * m);  // mean, inv_std
  for (int i = 0; i < m; ++i) {
    double mu = 0.0;
    for (int j = 0; j < p; ++j) mu += a.value()[i * p + j];
    mu /= p;
    double var = 0.0;
    for (int j = 0; j < p; ++j) {
      double d = a.value()[i * p + j] - mu;
      var += d * d;
    }
    var /= p;
    double inv = 1.0 / std::sqrt(var + eps);
    (*stats)[2 * i] = mu;
    (*stats)[2 * i + 1] = inv;
    for (int j = 0; j < p; ++j) {
      double xn = (a.value()[i * p + j] - mu) * inv;
      n->value[i * p + j] = xn * gamma.value()[j] + beta.value()[j];
    }
  }
  n->grad.assign(n->value.size(), 0.0);
  n->requires_grad =
      a.requires_grad() || gamma.requires_grad() || beta.requires_grad();
  n->parents = {a.node(), gamma.node(), beta.node()};
  n->backward = [m, p, stats](Tensor::Node& out) {
    const auto& x = out.parents[0]->value;
    const auto& g = out.parents[1]->value;
    for (int i = 0; i < m; ++i) {
      double mu = (*stats)[2 * i];
      double inv = (*stats)[2 * i + 1];
      double sum_dy = 0.0, sum_dy_xn = 0.0;
      for (int j = 0; j < p; ++j) {
        double xn = (x[i * p + j] - mu) * inv;
        double dy = out.grad[i * p + j] * g[j];
        sum_dy += dy;
        sum_dy_xn += dy * xn;
        out.parents[1]->grad[j] += out.grad[i * p + j] * xn;
        out.parents[2]->grad[j] += out.grad[i * p + j];
      }
      for (int j = 0; j < p; ++j) {
        double xn = (x[i * p + j] - mu) * inv;
        double dy = out.grad[i * p + j] * g[j];
        out.parents[0]->grad[i * p + j] +=
            inv * (dy - sum_dy / p - xn * sum_dy_xn / p);
      }
    }
  };
  return Tensor(n);
}

/// Elementwise multiplication by a fixed mask (dropout); no gradient flows
/// into the mask.
inline Tensor apply_mask(const Tensor& a, std::vector<double> mask) {
  if (a.value().size() != mask.size()) throw Error("mask size mismatch");
  auto mk = std::make_shared<std::vector<double>>(std::move(mask));
  return detail::unary(
      a, a.shape(),
      [mk](const std::vector<double>& in, std::vector<double>& out) {
        for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] * (*mk)[i];
      },
      [mk](Tensor::Node& out) {
        for (std::size_t i = 0; i < out.value.size(); ++i)
          out.parents[0]->grad[i] += out.grad[i] * (*mk)[i];
      });
}

/// Mean negative log-likelihood of the labelled columns under row-wise
/// softmax; numerically stable log-sum-exp formulation.
inline Tensor cross_entropy_rows(const Tensor& logits,
                                 const std::vector<int>& labels) {
  if (logits.shape().size() != 2) throw Error("cross entropy requires rank 2");
  int m = logits.shape()[0], p = logits.shape()[1];
  if (static_cast<int>(labels.size()) != m) throw Error("label count mismatch");
  auto n = std::make_shared<Tensor::Node>();
  n->shape = {1};
  auto probs = std::make_shared<std::vector<double>>(logits.value().size());
  double total = 0.0;
  for (int i = 0; i < m; ++i) {
    double mx = logits.value()[i * p];
    for (int j = 1; j < p; ++j) mx = std::max(mx, logits.value()[i * p + j]);
    double z = 0.0;
    for (int j = 0; j < p; ++j) z += std::exp(logits.value()[i * p + j] - mx);
    double logz = std::log(z) + mx;
    total += logz - logits.value()[i * p + labels[i]];
    for (int j = 0; j < p; ++j)
      (*probs)[i * p + j] = std::exp(logits.value()[i * p + j] - logz);
  }
  n->value = {total / m};
  n->grad = {0.0};
  n->requires_grad = logits.requires_grad();
  n->parents = {logits.node()};
  auto lab = std::make_shared<std::vector<int>>(labels);
  n->backward = [m, p, probs, lab](Tensor::Node& out) {
    double s = out.grad[0] / m;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < p; ++j) {
        double g = (*probs)[i * p + j] - (j == (*lab)[i] ? 1.0 : 0.0);
        out.parents[0]->grad[i * p + j] += s * g;
      }
  };
  return Tensor(n);
}

/// Mean elementwise binary cross-entropy on logits (stable form).
inline Tensor bce_with_logits(const Tensor& logits,
                              const std::vector<double>& targets) {
  if (logits.value().size() != targets.size())
    throw Error("target size mismatch");
  auto n = std::make_shared<Tensor::Node>();
  n->shape = {1};
  double total = 0.0;
  std::size_t count = logits.value().size();
  for (std::size_t i = 0; i < count; ++i) {
    double x = logits.value()[i];
    double t = targets[i];
    total += std::max(x, 0.0) - x * t + std::log1p(std::exp(-std::abs(x)));
  }
  n->value = {total / static_cast<double>(count)};
  n->grad = {0.0};
  n->requires_grad = logits.requires_grad();
  n->parents = {logits.node()};
  auto tgt = std::make_shared<std::vector<double>>(targets);
  n->backward = [tgt](Tensor::Node& out) {
    double s = out.grad[0] / static_cast<double>(tgt->size());
    for (std::size_t i = 0; i < tgt->size(); ++i) {
      double x = out.parents[0]->value[i];
      double sig = 1.0 / (1.0 + std::exp(-x));
      out.parents[0]->grad[i] += s * (sig - (*tgt)[i]);
    }
  };
  return Tensor(n);
}

}  // namespace ops

}  // namespace molstory

#endif  // MOLSTORY_TENSOR_HPP
