// Integer boxes, multi-index iteration and uniform-grid geometry shared by
// the filter, coefficient and signal containers.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace siapprox {

using Index = std::vector<int>;
using Point = std::vector<double>;

// Axis-aligned box of integer lattice points, [lo[i], hi[i]] inclusive.
struct IntBox {
    Index lo;
    Index hi;

    IntBox() = default;
    IntBox(Index lo_, Index hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
        if (lo.size() != hi.size())
            throw std::invalid_argument("IntBox: rank mismatch");
        for (size_t i = 0; i < lo.size(); ++i)
            if (hi[i] < lo[i])
                throw std::invalid_argument("IntBox: empty axis " + std::to_string(i));
    }

    int dim() const { return static_cast<int>(lo.size()); }

    int extent(int axis) const { return hi[axis] - lo[axis] + 1; }

    std::int64_t size() const {
        std::int64_t n = 1;
        for (int a = 0; a < dim(); ++a) n *= extent(a);
        return n;
    }

    bool contains(std::span<const int> k) const {
        for (int a = 0; a < dim(); ++a)
            if (k[a] < lo[a] || k[a] > hi[a]) return false;
        return true;
    }

    // Row-major linear offset of a contained point.
    std::int64_t offset(std::span<const int> k) const {
        std::int64_t off = 0;
        for (int a = 0; a < dim(); ++a)
            off = off * extent(a) + (k[a] - lo[a]);
        return off;
    }

    Index unflatten(std::int64_t off) const {
        Index k(dim());
        for (int a = dim() - 1; a >= 0; --a) {
            const int e = extent(a);
            k[a] = lo[a] + static_cast<int>(off % e);
            off /= e;
        }
        return k;
    }

    // Odometer iteration in row-major order.
    template <typename F>
    void for_each(F&& fn) const {
        Index k = lo;
        while (true) {
            fn(std::span<const int>(k));
            int a = dim() - 1;
            while (a >= 0) {
                if (++k[a] <= hi[a]) break;
                k[a] = lo[a];
                --a;
            }
            if (a < 0) return;
        }
    }

    static IntBox cube(int dim, int lo, int hi) {
        return IntBox(Index(dim, lo), Index(dim, hi));
    }
};

// Minkowski sum of two boxes (support of a discrete convolution).
inline IntBox minkowski_sum(const IntBox& a, const IntBox& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("minkowski_sum: rank mismatch");
    Index lo(a.dim()), hi(a.dim());
    for (int i = 0; i < a.dim(); ++i) {
        lo[i] = a.lo[i] + b.lo[i];
        hi[i] = a.hi[i] + b.hi[i];
    }
    return IntBox(std::move(lo), std::move(hi));
}

// Uniform grid over the symmetric window [-T, T]^d with step delta.
// Nodes are x_j = -T + j * delta, j = 0 .. points_per_axis()-1.
struct GridGeometry {
    int dim = 1;
    double T = 1.0;
    double delta = 1.0;

    GridGeometry() = default;
    GridGeometry(int d, double T_, double delta_) : dim(d), T(T_), delta(delta_) {
        if (d < 1) throw std::invalid_argument("GridGeometry: dim must be >= 1");
        if (T <= 0 || delta <= 0) throw std::invalid_argument("GridGeometry: T, delta must be > 0");
        const double n = 2.0 * T / delta;
        const auto ni = static_cast<std::int64_t>(n + 0.5);
        if (std::abs(n - static_cast<double>(ni)) > 1e-9 * n)
            throw std::invalid_argument("GridGeometry: 2T/delta must be an integer");
    }

    std::int64_t panels_per_axis() const {
        return static_cast<std::int64_t>(2.0 * T / delta + 0.5);
    }
    std::int64_t points_per_axis() const { return panels_per_axis() + 1; }

    std::int64_t total_points() const {
        std::int64_t n = 1;
        for (int a = 0; a < dim; ++a) n *= points_per_axis();
        return n;
    }

    double coord(std::int64_t j) const { return -T + static_cast<double>(j) * delta; }

    IntBox index_box() const {
        return IntBox::cube(dim, 0, static_cast<int>(points_per_axis()) - 1);
    }
};

// Multi-index utilities (l in N^d).
inline int multi_index_sum(std::span<const int> l) {
    int s = 0;
    for (int v : l) {
        if (v < 0) throw std::invalid_argument("multi-index components must be >= 0");
        s += v;
    }
    return s;
}

// Enumerates all multi-indices of the given total order in d variables.
inline std::vector<Index> multi_indices_of_order(int dim, int order) {
    std::vector<Index> out;
    Index cur(dim, 0);
    std::function<void(int, int)> rec = [&](int axis, int rem) {
        if (axis == dim - 1) {
            cur[axis] = rem;
            out.push_back(cur);
            return;
        }
        for (int v = 0; v <= rem; ++v) {
            cur[axis] = v;
            rec(axis + 1, rem - v);
        }
    };
    if (dim >= 1) rec(0, order);
    return out;
}

inline double squared_norm(std::span<const double> x) {
    double s = 0;
    for (double v : x) s += v * v;
    return s;
}

inline double sup_norm(std::span<const double> x) {
    double s = 0;
    for (double v : x) s = std::max(s, std::abs(v));
    return s;
}

}  // namespace siapprox
