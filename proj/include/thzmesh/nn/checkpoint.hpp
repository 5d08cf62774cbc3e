// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "thzmesh/nn/tensor.hpp"

namespace thzmesh::nn {

// Plain-text parameter snapshot.  Values are written as C hexadecimal floats
// so that save -> load round-trips bit-exactly.
//
//   thzmesh-checkpoint 1
//   <tensor count>
//   <group>/<name> <rows> <cols>
//   <rows*cols hexfloat values on one line>
//   ...
void save_checkpoint(const std::string& path,
                     const std::vector<std::pair<std::string, const ParamSet*>>& groups);

// Loads into pre-built groups; every tensor must already exist with the same
// shape, and the file must not contain unknown tensors.
void load_checkpoint(const std::string& path,
                     const std::vector<std::pair<std::string, ParamSet*>>& groups);

}  // namespace thzmesh::nn
