#pragma once

#include "semilab/core.hpp"

#include <memory>

namespace semilab {

// Layout of all derivative counts with total order <= max_order in `dim`
// variables, ordered by total order then lexicographically.
class JetLayout {
public:
    JetLayout(int dim, int max_order) : dim_(dim), max_order_(max_order) {
        int stride = max_order + 1;
        rank_.assign(static_cast<size_t>(stride * stride * stride), -1);
        for_each_counts_up_to(dim, max_order, [&](const Counts& c) {
            rank_[rank_slot(c)] = static_cast<int>(counts_.size());
            counts_.push_back(c);
        });
    }

    int dim() const { return dim_; }
    int max_order() const { return max_order_; }
    int size() const { return static_cast<int>(counts_.size()); }
    const Counts& counts(int rank) const { return counts_[static_cast<size_t>(rank)]; }

    int rank(const Counts& c) const {
        int r = rank_[rank_slot(c)];
        if (r < 0) throw std::invalid_argument("JetLayout: counts outside layout");
        return r;
    }

    bool contains(const Counts& c) const {
        if (total_order(c) > max_order_) return false;
        for (int a = dim_; a < kMaxDim; ++a)
            if (c[a] != 0) return false;
        return true;
    }

private:
    size_t rank_slot(const Counts& c) const {
        int stride = max_order_ + 1;
        return static_cast<size_t>((c[0] * stride + c[1]) * stride + c[2]);
    }

    int dim_;
    int max_order_;
    std::vector<Counts> counts_;
    std::vector<int> rank_;
};

inline std::shared_ptr<const JetLayout> jet_layout(int dim, int max_order) {
    return std::make_shared<const JetLayout>(dim, max_order);
}

// All partial derivatives of a scalar function at one point, up to the
// layout's order. Supports the algebra needed to push derivatives through
// products, quotients and outer compositions.
class Jet {
public:
    Jet() = default;
    explicit Jet(std::shared_ptr<const JetLayout> layout)
        : layout_(std::move(layout)), v_(static_cast<size_t>(layout_->size()), 0.0) {}

    static Jet constant(std::shared_ptr<const JetLayout> layout, double value) {
        Jet j(std::move(layout));
        j.v_[0] = value;
        return j;
    }

    // Coordinate function x_axis at the point x.
    static Jet coordinate(std::shared_ptr<const JetLayout> layout, const Pt& x, int axis) {
        Jet j(layout);
        j.set(zero_counts(), x[axis]);
        if (layout->max_order() >= 1) j.set(axis_counts(axis), 1.0);
        return j;
    }

    const JetLayout& layout() const { return *layout_; }
    std::shared_ptr<const JetLayout> layout_ptr() const { return layout_; }

    double value() const { return v_[0]; }
    double get(const Counts& c) const { return v_[static_cast<size_t>(layout_->rank(c))]; }
    void set(const Counts& c, double val) { v_[static_cast<size_t>(layout_->rank(c))] = val; }
    double& at_rank(int r) { return v_[static_cast<size_t>(r)]; }
    double at_rank(int r) const { return v_[static_cast<size_t>(r)]; }

    Jet operator+(const Jet& o) const {
        Jet r = *this;
        for (size_t i = 0; i < v_.size(); ++i) r.v_[i] += o.v_[i];
        return r;
    }

    Jet operator-(const Jet& o) const {
        Jet r = *this;
        for (size_t i = 0; i < v_.size(); ++i) r.v_[i] -= o.v_[i];
        return r;
    }

    Jet operator*(double s) const {
        Jet r = *this;
        for (double& x : r.v_) x *= s;
        return r;
    }

    // Leibniz product over counts.
    Jet operator*(const Jet& o) const {
        Jet r(layout_);
        const int n = layout_->size();
        for (int ra = 0; ra < n; ++ra) {
            const Counts& gamma = layout_->counts(ra);
            double acc = 0.0;
            for_each_sub(gamma, [&](const Counts& beta, double coeff) {
                Counts rest{gamma[0] - beta[0], gamma[1] - beta[1], gamma[2] - beta[2]};
                acc += coeff * v_[static_cast<size_t>(layout_->rank(beta))] *
                       o.v_[static_cast<size_t>(layout_->rank(rest))];
            });
            r.v_[static_cast<size_t>(ra)] = acc;
        }
        return r;
    }

    // Reciprocal 1/f, requiring f(x) != 0. Solves the Leibniz triangle
    // order by order from f * (1/f) = 1.
    Jet reciprocal() const {
        if (v_[0] == 0.0) throw numeric_error("Jet::reciprocal: value is zero");
        Jet r(layout_);
        r.v_[0] = 1.0 / v_[0];
        const int n = layout_->size();
        for (int ra = 1; ra < n; ++ra) {
            const Counts& gamma = layout_->counts(ra);
            double acc = 0.0;  // sum over proper sub-indices beta < gamma of C * f^(gamma-beta) * r^(beta)
            for_each_sub(gamma, [&](const Counts& beta, double coeff) {
                if (beta == gamma) return;
                Counts rest{gamma[0] - beta[0], gamma[1] - beta[1], gamma[2] - beta[2]};
                acc += coeff * v_[static_cast<size_t>(layout_->rank(rest))] *
                       r.v_[static_cast<size_t>(layout_->rank(beta))];
            });
            r.v_[static_cast<size_t>(ra)] = -acc / v_[0];
        }
        return r;
    }

    // Outer composition g(f): `outer` holds g, g', g'', ... evaluated at
    // f's value, up to the layout order.
    Jet compose_outer(const std::vector<double>& outer) const {
        const int K = layout_->max_order();
        if (static_cast<int>(outer.size()) < K + 1)
            throw std::invalid_argument("Jet::compose_outer: not enough outer derivatives");
        // table[k] = jet of g^(k) o f truncated to order K-k, stored in full layout
        std::vector<Jet> table(static_cast<size_t>(K + 1), Jet(layout_));
        for (int k = K; k >= 0; --k) {
            Jet& t = table[static_cast<size_t>(k)];
            t.v_[0] = outer[static_cast<size_t>(k)];
            const int max_m = K - k;
            for (int m = 1; m <= max_m; ++m) {
                for_each_counts_of_order(layout_->dim(), m, [&](const Counts& gamma) {
                    int axis = first_axis(gamma);
                    Counts gp = gamma;
                    gp[axis] -= 1;
                    // d^gamma (g^(k) o f) = d^gp ( (g^(k+1) o f) * d_axis f )
                    double acc = 0.0;
                    for_each_sub(gp, [&](const Counts& beta, double coeff) {
                        Counts rest{gp[0] - beta[0], gp[1] - beta[1], gp[2] - beta[2]};
                        rest[axis] += 1;
                        if (!layout_->contains(rest)) return;
                        acc += coeff *
                               table[static_cast<size_t>(k + 1)].v_[static_cast<size_t>(layout_->rank(beta))] *
                               v_[static_cast<size_t>(layout_->rank(rest))];
                    });
                    t.v_[static_cast<size_t>(layout_->rank(gamma))] = acc;
                });
            }
        }
        return table[0];
    }

    // Power f^p for real p (via outer composition of s -> s^p; needs f > 0
    // unless p is a nonnegative integer small enough to avoid the pole).
    Jet pow(double p) const {
        const int K = layout_->max_order();
        std::vector<double> outer(static_cast<size_t>(K + 1));
        double base = v_[0];
        for (int k = 0; k <= K; ++k) {
            double coeff = 1.0;
            for (int j = 0; j < k; ++j) coeff *= (p - j);
            outer[static_cast<size_t>(k)] = coeff * std::pow(base, p - k);
        }
        return compose_outer(outer);
    }

    // Derivative jet: shifts every stored order down by `shift` along counts
    // (result valid to order max_order - |shift|; higher entries zero).
    Jet shifted_derivative(const Counts& shift) const {
        Jet r(layout_);
        const int n = layout_->size();
        for (int ra = 0; ra < n; ++ra) {
            Counts c = layout_->counts(ra);
            Counts src{c[0] + shift[0], c[1] + shift[1], c[2] + shift[2]};
            if (layout_->contains(src)) r.v_[static_cast<size_t>(ra)] = v_[static_cast<size_t>(layout_->rank(src))];
        }
        return r;
    }

private:
    static int first_axis(const Counts& c) {
        for (int a = 0; a < kMaxDim; ++a)
            if (c[a] > 0) return a;
        throw std::logic_error("first_axis: zero counts");
    }

    template <typename F>
    void for_each_sub(const Counts& gamma, F&& fn) const {
        for (int b0 = 0; b0 <= gamma[0]; ++b0)
            for (int b1 = 0; b1 <= gamma[1]; ++b1)
                for (int b2 = 0; b2 <= gamma[2]; ++b2) {
                    Counts beta{b0, b1, b2};
                    double coeff = binomial(gamma[0], b0) * binomial(gamma[1], b1) * binomial(gamma[2], b2);
                    fn(beta, coeff);
                }
    }

    std::shared_ptr<const JetLayout> layout_;
    std::vector<double> v_;
};

}  // namespace semilab
