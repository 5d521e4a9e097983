#pragma once

#include "semilab/core.hpp"

namespace semilab {

struct QuadRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;
};

// Gauss-Legendre nodes/weights by Newton iteration on P_n.
inline const QuadRule& gauss_legendre(int n) {
    static thread_local std::vector<QuadRule> cache;
    if (static_cast<size_t>(n) < cache.size() && !cache[static_cast<size_t>(n)].nodes.empty())
        return cache[static_cast<size_t>(n)];
    if (static_cast<size_t>(n) >= cache.size()) cache.resize(static_cast<size_t>(n) + 1);
    QuadRule rule;
    rule.nodes.resize(static_cast<size_t>(n));
    rule.weights.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        double dp = n * (x * p1 - p0) / (x * x - 1.0);
        rule.nodes[static_cast<size_t>(i)] = x;
        rule.weights[static_cast<size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    cache[static_cast<size_t>(n)] = std::move(rule);
    return cache[static_cast<size_t>(n)];
}

template <typename F>
double integrate_gl(F&& f, double a, double b, int order) {
    const QuadRule& r = gauss_legendre(order);
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (size_t i = 0; i < r.nodes.size(); ++i) acc += r.weights[i] * f(mid + half * r.nodes[i]);
    return acc * half;
}

template <typename F>
double integrate_gl_panels(F&& f, double a, double b, int panels, int order = 16) {
    double h = (b - a) / panels;
    double acc = 0.0;
    for (int p = 0; p < panels; ++p) acc += integrate_gl(f, a + p * h, a + (p + 1) * h, order);
    return acc;
}

// Uniform trapezoid rule with n nodes (panel count n-1). Spectrally accurate
// for smooth integrands decaying at both ends.
template <typename F>
double integrate_trapezoid(F&& f, double a, double b, int n) {
    double h = (b - a) / (n - 1);
    double acc = 0.5 * (f(a) + f(b));
    for (int i = 1; i < n - 1; ++i) acc += f(a + i * h);
    return acc * h;
}

// Monotone cubic (Fritsch-Carlson) interpolant through strictly increasing xs.
class MonotoneCubic {
public:
    MonotoneCubic() = default;

    MonotoneCubic(std::vector<double> xs, std::vector<double> ys) : xs_(std::move(xs)), ys_(std::move(ys)) {
        size_t n = xs_.size();
        if (n < 2 || ys_.size() != n) throw std::invalid_argument("MonotoneCubic: need >= 2 matched knots");
        std::vector<double> d(n - 1);
        for (size_t i = 0; i + 1 < n; ++i) {
            double h = xs_[i + 1] - xs_[i];
            if (!(h > 0.0)) throw std::invalid_argument("MonotoneCubic: xs not strictly increasing");
            d[i] = (ys_[i + 1] - ys_[i]) / h;
        }
        m_.assign(n, 0.0);
        m_[0] = d[0];
        m_[n - 1] = d[n - 2];
        for (size_t i = 1; i + 1 < n; ++i)
            m_[i] = (d[i - 1] * d[i] <= 0.0) ? 0.0 : 0.5 * (d[i - 1] + d[i]);
        for (size_t i = 0; i + 1 < n; ++i) {
            if (d[i] == 0.0) {
                m_[i] = m_[i + 1] = 0.0;
                continue;
            }
            double a = m_[i] / d[i], b = m_[i + 1] / d[i];
            double s = a * a + b * b;
            if (s > 9.0) {
                double tau = 3.0 / std::sqrt(s);
                m_[i] = tau * a * d[i];
                m_[i + 1] = tau * b * d[i];
            }
        }
    }

    double operator()(double x) const {
        size_t n = xs_.size();
        if (x <= xs_.front()) return ys_.front();
        if (x >= xs_.back()) return ys_.back();
        size_t lo = 0, hi = n - 1;
        while (hi - lo > 1) {
            size_t mid = (lo + hi) / 2;
            (xs_[mid] <= x ? lo : hi) = mid;
        }
        double h = xs_[lo + 1] - xs_[lo];
        double t = (x - xs_[lo]) / h;
        double t2 = t * t, t3 = t2 * t;
        double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
        double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
        return h00 * ys_[lo] + h10 * h * m_[lo] + h01 * ys_[lo + 1] + h11 * h * m_[lo + 1];
    }

private:
    std::vector<double> xs_, ys_, m_;
};

}  // namespace semilab
