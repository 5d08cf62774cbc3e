// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace thzmesh::constants {

inline constexpr double speed_of_light_m_s = 299792458.0;
inline constexpr double boltzmann_j_k = 1.380649e-23;
inline constexpr double pi = 3.141592653589793238462643383279502884;

}  // namespace thzmesh::constants
