// SPDX-License-Identifier: Apache-2.0
#include "thzmesh/nn/tensor.hpp"

#include <stdexcept>

namespace thzmesh::nn {

Tensor::Tensor(int r, int c) : rows(r), cols(c) {
  if (r <= 0 || c <= 0) throw std::invalid_argument("tensor: non-positive shape");
  data.assign(static_cast<std::size_t>(r) * c, 0.0);
}

void Tensor::ensure_grad() {
  if (grad.size() != data.size()) grad.assign(data.size(), 0.0);
}

void Tensor::zero_grad() { grad.assign(data.size(), 0.0); }

Tensor& ParamSet::add(const std::string& name, int rows, int cols) {
  if (params_.count(name)) throw std::invalid_argument("params: duplicate " + name);
  Tensor& t = params_.emplace(name, Tensor(rows, cols)).first->second;
  t.ensure_grad();
  return t;
}

Tensor& ParamSet::get(const std::string& name) {
  auto it = params_.find(name);
  if (it == params_.end()) throw std::invalid_argument("params: missing " + name);
  return it->second;
}

const Tensor& ParamSet::get(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end()) throw std::invalid_argument("params: missing " + name);
  return it->second;
}

void ParamSet::zero_grad() {
  for (auto& [name, t] : params_) t.zero_grad();
}

long ParamSet::total_parameters() const {
  long n = 0;
  for (const auto& [name, t] : params_) n += t.numel();
  return n;
}

}  // namespace thzmesh::nn
