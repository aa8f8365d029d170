#pragma once

#include <vector>

#include "nekh/common.hpp"

namespace nekh {

/// Z-basis of the integer kernel {x in Z^n : r.x = 0 for every row r}, i.e.
/// the saturated lattice Lambda^perp cap Z^n.  Each basis vector is primitive
/// with its first non-zero entry positive.
std::vector<IntVec> integer_kernel_basis(const std::vector<IntVec>& rows, int n);

/// v / gcd(v) with the first non-zero entry made positive.
IntVec primitive(IntVec v);

std::int64_t dot(std::span<const std::int64_t> a, std::span<const std::int64_t> b);

}  // namespace nekh
