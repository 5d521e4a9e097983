#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace semilab {

// Points and derivative multi-orders live in at most 3 dimensions.
constexpr int kMaxDim = 3;

using Pt = std::array<double, kMaxDim>;
using Counts = std::array<int, kMaxDim>;  // per-axis derivative orders

inline Pt make_pt(double x) { return {x, 0.0, 0.0}; }
inline Pt make_pt(double x, double y) { return {x, y, 0.0}; }

inline Counts zero_counts() { return {0, 0, 0}; }
inline Counts axis_counts(int axis, int order = 1) {
    Counts c{0, 0, 0};
    c[axis] = order;
    return c;
}

inline int total_order(const Counts& c) { return c[0] + c[1] + c[2]; }

inline double sq_norm(const Pt& x, int dim) {
    double s = 0.0;
    for (int i = 0; i < dim; ++i) s += x[i] * x[i];
    return s;
}

inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
    return r;
}

inline double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

// Number of length-m derivative tuples in {1..d}^m collapsing to the given
// per-axis counts: m! / (c_1! ... c_d!).
inline double tuple_multiplicity(const Counts& c) {
    double r = factorial(total_order(c));
    for (int i = 0; i < kMaxDim; ++i) r /= factorial(c[i]);
    return r;
}

// Enumerates all per-axis count vectors with total order exactly m.
template <typename F>
void for_each_counts_of_order(int dim, int m, F&& fn) {
    if (dim == 1) {
        Counts c{m, 0, 0};
        fn(c);
        return;
    }
    if (dim == 2) {
        for (int i = 0; i <= m; ++i) {
            Counts c{i, m - i, 0};
            fn(c);
        }
        return;
    }
    for (int i = 0; i <= m; ++i)
        for (int j = 0; j <= m - i; ++j) {
            Counts c{i, j, m - i - j};
            fn(c);
        }
}

// Enumerates counts of total order 0..q.
template <typename F>
void for_each_counts_up_to(int dim, int q, F&& fn) {
    for (int m = 0; m <= q; ++m) for_each_counts_of_order(dim, m, fn);
}

struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace semilab
