#pragma once

#include "semilab/grid.hpp"
#include "semilab/smooth_fn.hpp"

#include <optional>

namespace semilab {

// Scalar field on a rectangular grid. Derivatives come from the analytic
// closure when one is attached, otherwise from central finite differences
// of the stored node values (order 2 default, order 4 switchable; FD
// derivative order per axis capped at 4).
class SampledField {
public:
    SampledField() = default;

    static SampledField from_function(const Grid& grid, SmoothFn fn, int fd_order = 2) {
        SampledField f;
        f.grid_ = grid;
        f.analytic_ = std::move(fn);
        f.fd_order_ = fd_order;
        f.values_.resize(grid.size());
        for (size_t i = 0; i < grid.size(); ++i) f.values_[i] = f.analytic_->value(grid.point(i));
        return f;
    }

    static SampledField from_values(const Grid& grid, std::vector<double> values, int fd_order = 2) {
        if (values.size() != grid.size()) throw std::invalid_argument("SampledField: value count mismatch");
        SampledField f;
        f.grid_ = grid;
        f.values_ = std::move(values);
        f.fd_order_ = fd_order;
        return f;
    }

    const Grid& grid() const { return grid_; }
    bool analytic() const { return analytic_.has_value(); }
    const SmoothFn& fn() const { return *analytic_; }
    int fd_order() const { return fd_order_; }
    const std::vector<double>& values() const { return values_; }

    double value_at(size_t flat) const { return values_[flat]; }

    double deriv_at_node(const std::array<int, kMaxDim>& idx, const Counts& c) const {
        if (analytic_) return analytic_->deriv(grid_.point(idx), c);
        return fd_deriv(idx, c);
    }

    // Derivative at an arbitrary point: analytic fields evaluate exactly;
    // FD fields require the point to sit on an interior node.
    double deriv_at(const Pt& x, const Counts& c) const {
        if (analytic_) return analytic_->deriv(x, c);
        auto idx = node_index_of(x);
        return fd_deriv(idx, c);
    }

    std::array<int, kMaxDim> node_index_of(const Pt& x) const {
        std::array<int, kMaxDim> idx{0, 0, 0};
        for (int a = 0; a < grid_.dim(); ++a) {
            double rel = (x[a] - grid_.lo(a)) / grid_.spacing(a);
            int i = static_cast<int>(std::lround(rel));
            if (std::abs(rel - i) > 1e-9)
                throw std::invalid_argument("SampledField: FD query off the grid nodes");
            if (i < 0 || i >= grid_.nodes(a))
                throw std::invalid_argument("SampledField: FD query outside the grid");
            idx[a] = i;
        }
        return idx;
    }

    // Stencil half-width needed for FD of the given per-axis order.
    int fd_margin(int axis_order) const {
        if (axis_order == 0) return 0;
        if (fd_order_ == 2) return (axis_order <= 2) ? 1 : 2;
        return (axis_order <= 2) ? 2 : 3;
    }

private:
    struct Stencil {
        std::vector<int> offsets;
        std::vector<double> coeffs;  // divided by h^order already applied outside
        double scale;                // 1 / h^order factor exponent handled by caller
    };

    static void stencil_for(int order, int fd_order, std::vector<int>& off, std::vector<double>& w) {
        if (order == 0) {
            off = {0};
            w = {1.0};
            return;
        }
        if (fd_order == 2) {
            switch (order) {
                case 1: off = {-1, 1}; w = {-0.5, 0.5}; return;
                case 2: off = {-1, 0, 1}; w = {1.0, -2.0, 1.0}; return;
                case 3: off = {-2, -1, 1, 2}; w = {-0.5, 1.0, -1.0, 0.5}; return;
                case 4: off = {-2, -1, 0, 1, 2}; w = {1.0, -4.0, 6.0, -4.0, 1.0}; return;
                default: throw std::invalid_argument("FD derivative order capped at 4");
            }
        }
        switch (order) {
            case 1: off = {-2, -1, 1, 2}; w = {1.0 / 12, -8.0 / 12, 8.0 / 12, -1.0 / 12}; return;
            case 2: off = {-2, -1, 0, 1, 2}; w = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12}; return;
            case 3:
                off = {-3, -2, -1, 1, 2, 3};
                w = {1.0 / 8, -1.0, 13.0 / 8, -13.0 / 8, 1.0, -1.0 / 8};
                return;
            case 4:
                off = {-3, -2, -1, 0, 1, 2, 3};
                w = {-1.0 / 6, 2.0, -13.0 / 2, 28.0 / 3, -13.0 / 2, 2.0, -1.0 / 6};
                return;
            default: throw std::invalid_argument("FD derivative order capped at 4");
        }
    }

    double fd_deriv(const std::array<int, kMaxDim>& idx, const Counts& c) const {
        for (int a = 0; a < grid_.dim(); ++a) {
            int margin = fd_margin(c[a]);
            if (idx[a] < margin || idx[a] >= grid_.nodes(a) - margin)
                throw std::invalid_argument("SampledField: FD stencil leaves the grid interior");
        }
        return fd_axis(idx, c, 0);
    }

    double fd_axis(const std::array<int, kMaxDim>& idx, const Counts& c, int axis) const {
        if (axis >= grid_.dim()) return values_[grid_.flatten(idx)];
        std::vector<int> off;
        std::vector<double> w;
        stencil_for(c[axis], fd_order_, off, w);
        double h = grid_.spacing(axis);
        double scale = 1.0;
        for (int k = 0; k < c[axis]; ++k) scale /= h;
        double acc = 0.0;
        for (size_t i = 0; i < off.size(); ++i) {
            auto shifted = idx;
            shifted[axis] += off[i];
            acc += w[i] * fd_axis(shifted, c, axis + 1);
        }
        return acc * scale;
    }

    Grid grid_;
    std::vector<double> values_;
    std::optional<SmoothFn> analytic_;
    int fd_order_ = 2;
};

}  // namespace semilab
