// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <string>
#include <vector>

namespace thzmesh::nn {

// Dense row-major matrix; vectors are 1 x n or n x 1.
struct Tensor {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;
  std::vector<double> grad;  // same shape as data for trainable tensors

  Tensor() = default;
  Tensor(int r, int c);

  int numel() const { return rows * cols; }
  double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const {
    return data[static_cast<std::size_t>(r) * cols + c];
  }
  void ensure_grad();
  void zero_grad();
};

// Named trainable tensors with deterministic (lexicographic) iteration order.
class ParamSet {
 public:
  Tensor& add(const std::string& name, int rows, int cols);
  Tensor& get(const std::string& name);
  const Tensor& get(const std::string& name) const;
  bool has(const std::string& name) const { return params_.count(name) != 0; }

  void zero_grad();
  long total_parameters() const;

  std::map<std::string, Tensor>& entries() { return params_; }
  const std::map<std::string, Tensor>& entries() const { return params_; }

 private:
  std::map<std::string, Tensor> params_;
};

}  // namespace thzmesh::nn
