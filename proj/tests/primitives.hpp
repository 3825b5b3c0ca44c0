#pragma once

#include <string>
#include <vector>

#include "specnet/nn/ops.hpp"
#include "support.hpp"

namespace specnet::nn {

inline const std::vector<std::string>& primitive_names() {
  static const std::vector<std::string> names = {
      "matmul", "linear", "add", "sub", "mul", "scale", "add_scalar", "leaky_relu", "tanh", "sigmoid", "exp", "log", "clamp", "mean", "col_mean", "layer_norm", "softmax", "spmm", "projection_score", "one_minus_exp_neg", "gather_rows", "concat_cols", "concat_rows", "slice_cols", "scale_rows", "attention_mean"};
  return names;
}

/// Scalar objective exercising one primitive.
inline Var<double> build_primitive(const std::string& op, Tape<double>& t, ParameterStore<double>& s) {
  auto p = [&](std::size_t i) { return t.parameter(s, i); };
  if (op == "matmul") return sum(matmul(p(0), p(1)));
  if (op == "linear") return sum(square(linear(p(0), p(1), p(2))));
  if (op == "add") return sum(square(add(p(0), p(3))));
  if (op == "sub") return sum(square(sub(p(0), p(3))));
  if (op == "mul") return sum(mul(p(0), p(3)));
  if (op == "scale") return sum(square(scale(p(0), 1.7)));
  if (op == "add_scalar") return sum(square(add_scalar(p(0), 0.3)));
  if (op == "leaky_relu") return sum(mul(leaky_relu(p(0), 0.01), p(3)));
  if (op == "tanh") return sum(mul(nn::tanh(p(0)), p(3)));
  if (op == "sigmoid") return sum(mul(sigmoid(p(0)), p(3)));
  if (op == "exp") return sum(nn::exp(p(0)));
  if (op == "log") return sum(nn::log(add_scalar(square(p(0)), 0.5)));
  if (op == "clamp") return sum(square(clamp(p(0), -0.5, 0.5)));
  if (op == "mean") return mean(square(p(0)));
  if (op == "col_mean") return sum(square(col_mean(p(0))));
  if (op == "layer_norm") return sum(mul(layer_norm(p(0), p(4), p(5)), p(3)));
  if (op == "softmax") return sum(mul(softmax(p(6)), p(7)));
  if (op == "spmm") {
    std::vector<Eigen::Triplet<double>> e = {{0, 0, 0.5}, {0, 1, 0.2}, {1, 2, -0.7}, {2, 1, 0.9}, {3, 3, 1.1}};
    auto a = std::make_shared<SparseMatrix<double>>(4, 4);
    a->setFromTriplets(e.begin(), e.end());
    return sum(square(spmm(std::shared_ptr<const SparseMatrix<double>>(a), p(0))));
  }
  if (op == "projection_score") return sum(square(projection_score(p(0), p(4))));
  if (op == "one_minus_exp_neg") return sum(one_minus_exp_neg(add_scalar(square(p(0)), 0.1)));
  if (op == "gather_rows") return sum(square(gather_rows(p(0), {2, 0, 2})));
  if (op == "concat_cols") return sum(mul(concat_cols(p(0), p(3)), concat_cols(p(3), p(0))));
  if (op == "concat_rows") return sum(square(concat_rows(std::vector<Var<double>>{p(0), p(3), p(0)})));
  if (op == "slice_cols") return sum(square(slice_cols(p(0), 1, 2)));
  if (op == "scale_rows") return sum(square(scale_rows(p(0), p(8))));
  if (op == "attention_mean") return sum(square(attention_mean(p(0), p(9), {{0, 2}, {}, {1}})));
  throw std::logic_error("unknown op " + op);
}

/// Random inputs for build_primitive; slot meanings are fixed per index.
inline ParameterStore<double> primitive_inputs(const std::string& op, std::uint64_t seed) {
  Rng rng(seed);
  ParameterStore<double> s;
  s.add("x", testing::random_matrix(4, 3, rng));  // 0
  s.add("w", testing::random_matrix(2, 3, rng));  // 1
  s.add("b", testing::random_matrix(1, 2, rng));  // 2
  s.add("y", testing::random_matrix(4, 3, rng));  // 3
  s.add("gain", testing::random_matrix(1, 3, rng));  // 4
  s.add("shift", testing::random_matrix(1, 3, rng));  // 5
  s.add("v", testing::random_matrix(5, 1, rng, 2.0));  // 6
  s.add("u", testing::random_matrix(5, 1, rng));  // 7
  s.add("r", testing::random_matrix(4, 1, rng));  // 8
  s.add("parents", testing::random_matrix(3, 3, rng));  // 9
  if (op == "matmul") s[1].value = testing::random_matrix(3, 2, rng);
  return s;
}

}  // namespace specnet::nn
