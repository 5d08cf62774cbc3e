// SPDX-License-Identifier: Apache-2.0
#include "thzmesh/nn/init.hpp"

#include <cmath>

namespace thzmesh::nn {

void xavier_uniform(Tensor& w, std::mt19937_64& rng) {
  const double bound =
      std::sqrt(6.0 / (static_cast<double>(w.rows) + static_cast<double>(w.cols)));
  std::uniform_real_distribution<double> u(-bound, bound);
  for (double& v : w.data) v = u(rng);
}

}  // namespace thzmesh::nn
