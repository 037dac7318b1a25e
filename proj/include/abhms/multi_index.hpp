#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace abhms {

/// Integer g-vector used for section indices, lattice points and generator keys.
/// std::vector ordering is lexicographic, which is the canonical order everywhere.
using MultiIndex = std::vector<int>;

inline std::int64_t ipow(std::int64_t base, int exp) {
    std::int64_t r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

/// Euclidean remainder in [0, m).
inline int mod_floor(long long x, long long m) {
    long long r = x % m;
    if (r < 0) r += m;
    return static_cast<int>(r);
}

inline long long div_floor(long long x, long long m) {
    long long q = x / m;
    if ((x % m != 0) && ((x < 0) != (m < 0))) --q;
    return q;
}

/// All points of the box {0..k-1}^g in lexicographic order.
inline std::vector<MultiIndex> index_box(int k, int g) {
    std::vector<MultiIndex> out;
    if (k <= 0) return out;
    out.reserve(static_cast<std::size_t>(ipow(k, g)));
    MultiIndex cur(g, 0);
    while (true) {
        out.push_back(cur);
        int j = g - 1;
        while (j >= 0 && ++cur[j] == k) cur[j--] = 0;
        if (j < 0) break;
    }
    return out;
}

/// Lexicographic rank of idx inside {0..k-1}^g.
inline std::size_t linear_index(const MultiIndex& idx, int k) {
    std::size_t r = 0;
    for (int v : idx) r = r * static_cast<std::size_t>(k) + static_cast<std::size_t>(v);
    return r;
}

inline MultiIndex reduce_index(const MultiIndex& idx, int k) {
    MultiIndex out(idx.size());
    for (std::size_t j = 0; j < idx.size(); ++j) out[j] = mod_floor(idx[j], k);
    return out;
}

inline bool in_box(const MultiIndex& idx, int k) {
    for (int v : idx)
        if (v < 0 || v >= k) return false;
    return true;
}

} // namespace abhms
