// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <random>

#include "thzmesh/nn/tensor.hpp"

namespace thzmesh::nn {

// Glorot/Xavier uniform: U(-b, b) with b = sqrt(6 / (fan_in + fan_out)).
// Weights are applied as out = in * W, so fan_in = rows, fan_out = cols.
void xavier_uniform(Tensor& w, std::mt19937_64& rng);

}  // namespace thzmesh::nn
