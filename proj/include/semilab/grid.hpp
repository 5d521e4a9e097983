#pragma once

#include "semilab/core.hpp"

namespace semilab {

// Uniform rectangular grid on a box, up to 3 axes. Node counts include both
// endpoints; spacing must be strictly positive.
class Grid {
public:
    Grid() = default;

    Grid(int dim, Pt lo, Pt hi, std::array<int, kMaxDim> nodes)
        : dim_(dim), lo_(lo), hi_(hi), nodes_(nodes) {
        if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("Grid: dim out of range");
        for (int a = 0; a < dim; ++a) {
            if (nodes_[a] < 2) throw std::invalid_argument("Grid: need at least 2 nodes per axis");
            if (!(hi_[a] > lo_[a])) throw std::invalid_argument("Grid: empty axis extent");
        }
    }

    // Symmetric 1D grid on [-radius, radius].
    static Grid symmetric_1d(double radius, int nodes) {
        return Grid(1, make_pt(-radius), make_pt(radius), {nodes, 1, 1});
    }

    static Grid symmetric(int dim, double radius, int nodes_per_axis) {
        Pt lo{}, hi{};
        std::array<int, kMaxDim> n{1, 1, 1};
        for (int a = 0; a < dim; ++a) {
            lo[a] = -radius;
            hi[a] = radius;
            n[a] = nodes_per_axis;
        }
        return Grid(dim, lo, hi, n);
    }

    int dim() const { return dim_; }
    double lo(int axis) const { return lo_[axis]; }
    double hi(int axis) const { return hi_[axis]; }
    int nodes(int axis) const { return nodes_[axis]; }
    double spacing(int axis) const { return (hi_[axis] - lo_[axis]) / (nodes_[axis] - 1); }

    size_t size() const {
        size_t s = 1;
        for (int a = 0; a < dim_; ++a) s *= static_cast<size_t>(nodes_[a]);
        return s;
    }

    std::array<int, kMaxDim> unflatten(size_t flat) const {
        std::array<int, kMaxDim> idx{0, 0, 0};
        for (int a = dim_ - 1; a >= 0; --a) {
            idx[a] = static_cast<int>(flat % static_cast<size_t>(nodes_[a]));
            flat /= static_cast<size_t>(nodes_[a]);
        }
        return idx;
    }

    size_t flatten(const std::array<int, kMaxDim>& idx) const {
        size_t f = 0;
        for (int a = 0; a < dim_; ++a) f = f * static_cast<size_t>(nodes_[a]) + static_cast<size_t>(idx[a]);
        return f;
    }

    Pt point(const std::array<int, kMaxDim>& idx) const {
        Pt x{};
        for (int a = 0; a < dim_; ++a) x[a] = lo_[a] + spacing(a) * idx[a];
        return x;
    }

    Pt point(size_t flat) const { return point(unflatten(flat)); }

    std::vector<double> axis_points(int axis) const {
        std::vector<double> xs(static_cast<size_t>(nodes_[axis]));
        for (int i = 0; i < nodes_[axis]; ++i) xs[static_cast<size_t>(i)] = lo_[axis] + spacing(axis) * i;
        return xs;
    }

    // Trapezoid quadrature weight of a node (product of per-axis weights).
    double quad_weight(const std::array<int, kMaxDim>& idx) const {
        double w = 1.0;
        for (int a = 0; a < dim_; ++a) {
            double wa = spacing(a);
            if (idx[a] == 0 || idx[a] == nodes_[a] - 1) wa *= 0.5;
            w *= wa;
        }
        return w;
    }

    bool is_boundary(const std::array<int, kMaxDim>& idx) const {
        for (int a = 0; a < dim_; ++a)
            if (idx[a] == 0 || idx[a] == nodes_[a] - 1) return true;
        return false;
    }

    // Same box, 2x refined (spacing halved; node count 2n-1 per axis).
    Grid refined() const {
        std::array<int, kMaxDim> n = nodes_;
        for (int a = 0; a < dim_; ++a) n[a] = 2 * n[a] - 1;
        return Grid(dim_, lo_, hi_, n);
    }

private:
    int dim_ = 1;
    Pt lo_{};
    Pt hi_{};
    std::array<int, kMaxDim> nodes_{2, 1, 1};
};

}  // namespace semilab
