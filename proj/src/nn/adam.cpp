// SPDX-License-Identifier: Apache-2.0
#include "thzmesh/nn/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace thzmesh::nn {

void Adam::step(ParamSet& params, int direction) {
  if (direction != 1 && direction != -1)
    throw std::invalid_argument("adam: direction must be +1 or -1");
  ++t_;
  const double b1t = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
  const double b2t = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
  for (auto& [name, p] : params.entries()) {
    p.ensure_grad();
    Moments& mo = state_[name];
    if (mo.m.size() != p.data.size()) {
      mo.m.assign(p.data.size(), 0.0);
      mo.v.assign(p.data.size(), 0.0);
    }
    for (std::size_t i = 0; i < p.data.size(); ++i) {
      const double g = p.grad[i];
      mo.m[i] = cfg_.beta1 * mo.m[i] + (1.0 - cfg_.beta1) * g;
      mo.v[i] = cfg_.beta2 * mo.v[i] + (1.0 - cfg_.beta2) * g * g;
      const double mhat = mo.m[i] / b1t;
      const double vhat = mo.v[i] / b2t;
      p.data[i] += direction * cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
  }
}

}  // namespace thzmesh::nn
