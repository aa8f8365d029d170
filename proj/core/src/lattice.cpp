#include "nekh/lattice.hpp"

#include <numeric>
#include <utility>

namespace nekh {

std::int64_t dot(std::span<const std::int64_t> a, std::span<const std::int64_t> b) {
    if (a.size() != b.size()) throw DimensionError("dot: length mismatch");
    std::int64_t s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

IntVec primitive(IntVec v) {
    const std::int64_t g = gcd_all(v);
    if (g == 0) return v;
    int sign = 0;
    for (auto x : v) {
        if (x != 0) {
            sign = x > 0 ? 1 : -1;
            break;
        }
    }
    for (auto& x : v) x = sign * x / g;
    return v;
}

// Column reduction with unimodular operations: U starts as the identity and
// each row is cleared from the columns that have not yet been used as
// pivots.  The unused columns of U then span the integer kernel.
std::vector<IntVec> integer_kernel_basis(const std::vector<IntVec>& rows, int n) {
    std::vector<IntVec> cols(n, IntVec(n, 0));
    for (int i = 0; i < n; ++i) cols[i][i] = 1;
    int pivot = 0;
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != n) throw DimensionError("integer_kernel_basis: row length mismatch");
        auto image = [&](int c) { return dot(row, cols[c]); };
        while (true) {
            // Smallest non-zero |image| among free columns becomes the pivot.
            int best = -1;
            std::int64_t best_val = 0;
            for (int c = pivot; c < n; ++c) {
                const std::int64_t v = image(c);
                if (v != 0 && (best < 0 || std::abs(v) < std::abs(best_val))) {
                    best = c;
                    best_val = v;
                }
            }
            if (best < 0) break;  // row already satisfied on the free columns
            std::swap(cols[pivot], cols[best]);
            bool done = true;
            for (int c = pivot + 1; c < n; ++c) {
                const std::int64_t v = image(c);
                if (v == 0) continue;
                const std::int64_t q = v / best_val;
                for (int i = 0; i < n; ++i) cols[c][i] -= q * cols[pivot][i];
                if (image(c) != 0) done = false;
            }
            if (done) {
                ++pivot;
                break;
            }
        }
    }
    std::vector<IntVec> basis;
    for (int c = pivot; c < n; ++c) basis.push_back(primitive(cols[c]));
    return basis;
}

}  // namespace nekh
