#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <initializer_list>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "specnet/error.hpp"

namespace specnet::nn {

template <class T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <class T>
struct Parameter {
  std::string name;
  Matrix<T> value;
  Matrix<T> grad;

  Parameter(std::string n, Matrix<T> v)
      : name(std::move(n)), value(std::move(v)), grad(Matrix<T>::Zero(value.rows(), value.cols())) {}

  void zero_grad() { grad.setZero(); }
};

/// Gradients for every parameter of a store, index-aligned with it. Each
/// worker accumulates into its own buffer; buffers are reduced in a fixed
/// order so results do not depend on scheduling.
template <class T>
using GradientBuffer = std::vector<Matrix<T>>;

/// Ordered collection of named parameters. Indices are stable for the life
/// of the store.
template <class T>
class ParameterStore {
 public:
  std::size_t add(std::string name, Matrix<T> value) {
    params_.emplace_back(std::move(name), std::move(value));
    return params_.size() - 1;
  }

  Parameter<T>& operator[](std::size_t i) { return params_[i]; }
  const Parameter<T>& operator[](std::size_t i) const { return params_[i]; }
  std::size_t size() const noexcept { return params_.size(); }
  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

  std::size_t index_of(const std::string& name) const {
    for (std::size_t i = 0; i < params_.size(); ++i) {
      if (params_[i].name == name) return i;
    }
    throw Error(ErrorKind::ConfigError, "unknown parameter " + name);
  }

  GradientBuffer<T> zero_buffer() const {
    GradientBuffer<T> buffer;
    buffer.reserve(params_.size());
    for (const auto& p : params_) buffer.push_back(Matrix<T>::Zero(p.value.rows(), p.value.cols()));
    return buffer;
  }

  void zero_grad() {
    for (auto& p : params_) p.zero_grad();
  }

  void add_to_grad(const GradientBuffer<T>& buffer, T scale) {
    for (std::size_t i = 0; i < params_.size(); ++i) params_[i].grad += scale * buffer[i];
  }

  std::size_t scalar_count() const {
    std::size_t n = 0;
    for (const auto& p : params_) n += static_cast<std::size_t>(p.value.size());
    return n;
  }

  template <class U>
  ParameterStore<U> cast() const {
    ParameterStore<U> out;
    for (const auto& p : params_) out.add(p.name, p.value.template cast<U>());
    return out;
  }

 private:
  std::vector<Parameter<T>> params_;
};

template <class T>
class Tape;

/// Handle to a value recorded on a tape.
template <class T>
struct Var {
  Tape<T>* tape = nullptr;
  std::size_t id = 0;

  const Matrix<T>& value() const { return tape->value(*this); }
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  T item() const { return value()(0, 0); }
};

/// Reverse-mode recording of one dynamic computation.
///
/// Values live in a deque so references stay valid while new nodes are
/// appended. A tape built with `record = false` never stores backward
/// closures and is used for inference.
template <class T>
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, const Matrix<T>&)>;

  explicit Tape(bool record = true) : record_(record) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool recording() const noexcept { return record_; }

  Var<T> constant(Matrix<T> value) { return push_node(std::move(value), nullptr, false); }

  /// Leaf bound to a stored parameter. Repeated requests for the same
  /// parameter return the same node so its gradient accumulates once.
  Var<T> parameter(const ParameterStore<T>& store, std::size_t index) {
    auto key = std::make_pair(&store, index);
    for (const auto& [k, id] : param_nodes_) {
      if (k == key) return Var<T>{this, id};
    }
    Var<T> v = push_node(Matrix<T>(), &store[index].value, record_);
    nodes_[v.id].param_index = static_cast<std::ptrdiff_t>(index);
    nodes_[v.id].store = &store;
    param_nodes_.emplace_back(key, v.id);
    return v;
  }

  /// Records an op output. The node requires a gradient when any input does.
  Var<T> push(Matrix<T> value, std::initializer_list<Var<T>> inputs) {
    bool needs = false;
    for (const auto& in : inputs) needs = needs || nodes_[in.id].requires_grad;
    return push_node(std::move(value), nullptr, needs && record_);
  }

  Var<T> push(Matrix<T> value, const std::vector<Var<T>>& inputs) {
    bool needs = false;
    for (const auto& in : inputs) needs = needs || nodes_[in.id].requires_grad;
    return push_node(std::move(value), nullptr, needs && record_);
  }

  void set_backward(Var<T> v, BackwardFn fn) { nodes_[v.id].backward = std::move(fn); }

  bool requires_grad(Var<T> v) const { return nodes_[v.id].requires_grad; }

  const Matrix<T>& value(Var<T> v) const {
    const auto& n = nodes_[v.id];
    return n.external ? *n.external : n.value;
  }

  /// Gradient accumulator of `v`, zero-initialised on first access.
  Matrix<T>& grad(Var<T> v) {
    auto& n = nodes_[v.id];
    if (n.grad.size() == 0) {
      const auto& val = value(v);
      n.grad = Matrix<T>::Zero(val.rows(), val.cols());
    }
    return n.grad;
  }

  /// Back-propagates from a 1x1 root, adding parameter gradients to `out`
  /// (which must be index-aligned with the store the parameters came from).
  void backward(Var<T> root, GradientBuffer<T>& out, const ParameterStore<T>* store = nullptr) {
    if (value(root).size() != 1) throw Error(ErrorKind::ShapeError, "backward root must be 1x1");
    if (!nodes_[root.id].requires_grad) return;
    grad(root).setConstant(T(1));
    for (std::size_t i = root.id + 1; i-- > 0;) {
      auto& n = nodes_[i];
      if (!n.requires_grad || n.grad.size() == 0) continue;
      if (n.backward) n.backward(*this, n.grad);
      if (n.param_index >= 0 && (store == nullptr || n.store == store)) {
        out[static_cast<std::size_t>(n.param_index)] += n.grad;
      }
    }
  }

  /// Piecewise ops record which branch they took; finite-difference checks
  /// compare signatures to detect probes that straddle a kink.
  void note_branch(std::uint64_t bits) {
    signature_ = (signature_ ^ bits) * 1099511628211ULL;
  }
  std::uint64_t signature() const noexcept { return signature_; }

  std::size_t size() const noexcept { return nodes_.size(); }

 private:
  struct Node {
    Matrix<T> value;
    const Matrix<T>* external = nullptr;
    Matrix<T> grad;
    BackwardFn backward;
    bool requires_grad = false;
    std::ptrdiff_t param_index = -1;
    const ParameterStore<T>* store = nullptr;
  };

  Var<T> push_node(Matrix<T> value, const Matrix<T>* external, bool requires_grad) {
    Node n;
    n.value = std::move(value);
    n.external = external;
    n.requires_grad = requires_grad;
    nodes_.push_back(std::move(n));
    return Var<T>{this, nodes_.size() - 1};
  }

  bool record_;
  std::deque<Node> nodes_;
  std::vector<std::pair<std::pair<const ParameterStore<T>*, std::size_t>, std::size_t>> param_nodes_;
  std::uint64_t signature_ = 14695981039346656037ULL;
};

}  // namespace specnet::nn
