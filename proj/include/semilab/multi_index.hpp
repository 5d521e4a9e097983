#pragma once

#include "semilab/core.hpp"

namespace semilab {

// A derivative multi-index in sequence form: entries in {1..d}, length = order.
// The empty sequence denotes the order-0 (identity) index.
class MultiIndex {
public:
    MultiIndex() = default;

    MultiIndex(std::initializer_list<int> entries, int dim) : entries_(entries), dim_(dim) {
        validate();
    }

    MultiIndex(std::vector<int> entries, int dim) : entries_(std::move(entries)), dim_(dim) {
        validate();
    }

    static MultiIndex empty(int dim) { return MultiIndex(std::vector<int>{}, dim); }

    // Pure q-th order derivative along one axis (axis is 1-based).
    static MultiIndex along(int axis, int order, int dim) {
        std::vector<int> e(static_cast<size_t>(order), axis);
        return MultiIndex(std::move(e), dim);
    }

    int order() const { return static_cast<int>(entries_.size()); }
    int dim() const { return dim_; }
    const std::vector<int>& entries() const { return entries_; }

    // Collapse to per-axis derivative counts (order of application is
    // immaterial for smooth functions).
    Counts counts() const {
        Counts c = zero_counts();
        for (int e : entries_) c[e - 1] += 1;
        return c;
    }

    MultiIndex appended(int axis) const {
        std::vector<int> e = entries_;
        e.push_back(axis);
        return MultiIndex(std::move(e), dim_);
    }

private:
    void validate() const {
        if (dim_ < 1 || dim_ > kMaxDim) throw std::invalid_argument("MultiIndex: dim out of range");
        for (int e : entries_)
            if (e < 1 || e > dim_) throw std::invalid_argument("MultiIndex: entry outside {1..d}");
    }

    std::vector<int> entries_;
    int dim_ = 1;
};

}  // namespace semilab
