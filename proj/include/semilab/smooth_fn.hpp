#pragma once

#include "semilab/core.hpp"
#include "semilab/jet.hpp"

namespace semilab {

// Scalar function with analytic partial derivatives of every order we ask
// for. All built-in test-corpus members use closed-form derivatives so grid
// sweeps stay noise-free.
class SmoothFn {
public:
    using DerivFn = std::function<double(const Pt&, const Counts&)>;

    SmoothFn() = default;
    SmoothFn(int dim, DerivFn deriv) : dim_(dim), deriv_(std::move(deriv)) {}

    int dim() const { return dim_; }
    double value(const Pt& x) const { return deriv_(x, zero_counts()); }
    double deriv(const Pt& x, const Counts& c) const { return deriv_(x, c); }

    bool valid() const { return static_cast<bool>(deriv_); }

    // ---- constructors for the standard corpus ------------------------------

    static SmoothFn constant(int dim, double c) {
        return SmoothFn(dim, [c](const Pt&, const Counts& k) {
            return total_order(k) == 0 ? c : 0.0;
        });
    }

    // a * exp(-|x-m|^2 / (2 s^2)), separable across axes.
    static SmoothFn gaussian(int dim, Pt center, double s, double amplitude = 1.0) {
        double v = s * s;
        return SmoothFn(dim, [dim, center, v, amplitude](const Pt& x, const Counts& c) {
            double prod = amplitude;
            for (int a = 0; a < dim; ++a)
                prod *= gaussian_1d_deriv(x[a] - center[a], v, c[a]);
            return prod;
        });
    }

    // a * sin(<omega, x> + phase)
    static SmoothFn sin_wave(int dim, Pt omega, double phase, double amplitude = 1.0) {
        return SmoothFn(dim, [dim, omega, phase, amplitude](const Pt& x, const Counts& c) {
            double arg = phase;
            double coef = amplitude;
            for (int a = 0; a < dim; ++a) {
                arg += omega[a] * x[a];
                for (int k = 0; k < c[a]; ++k) coef *= omega[a];
            }
            return coef * std::sin(arg + total_order(c) * M_PI / 2.0);
        });
    }

    // 1D polynomial sum_k coeffs[k] x^k (zero on other axes' derivatives).
    static SmoothFn polynomial_1d(std::vector<double> coeffs) {
        return SmoothFn(1, [coeffs](const Pt& x, const Counts& c) {
            if (c[1] != 0 || c[2] != 0) return 0.0;
            int q = c[0];
            double acc = 0.0;
            for (size_t k = static_cast<size_t>(q); k < coeffs.size(); ++k) {
                double coef = coeffs[k];
                for (int j = 0; j < q; ++j) coef *= double(k - static_cast<size_t>(j));
                acc += coef * std::pow(x[0], double(k - static_cast<size_t>(q)));
            }
            return acc;
        });
    }

    // The polynomial weight (1 + |x|^2)^kappa; derivatives via jets.
    static SmoothFn weight_psi(int dim, double kappa) {
        return SmoothFn(dim, [dim, kappa](const Pt& x, const Counts& c) {
            return weight_psi_deriv(dim, kappa, x, c);
        });
    }

    // erf((x - m) / (s * sqrt(2))): the Gaussian CDF shape, |f| < 1 exactly.
    static SmoothFn erf_sigmoid(double m, double s) {
        double scale = 1.0 / (s * std::sqrt(2.0));
        return SmoothFn(1, [m, scale](const Pt& x, const Counts& c) {
            if (c[1] != 0 || c[2] != 0) return 0.0;
            double u = (x[0] - m) * scale;
            int q = c[0];
            if (q == 0) return std::erf(u);
            // d/dx erf(u(x)) = scale * 2/sqrt(pi) * e^{-u^2}; higher orders via
            // the Gaussian derivative recurrence with variance 1/2 in u.
            double g = (2.0 / std::sqrt(M_PI)) * std::exp(-u * u);
            if (q == 1) return scale * g;
            // derivatives of e^{-u^2}: h^(k) = -2u h^(k-1) - 2(k-1) h^(k-2)
            std::vector<double> h(static_cast<size_t>(q), 0.0);
            h[0] = g;
            if (q >= 2) h[1] = -2.0 * u * g;
            for (int k = 2; k < q; ++k)
                h[static_cast<size_t>(k)] =
                    -2.0 * u * h[static_cast<size_t>(k - 1)] - 2.0 * (k - 1) * h[static_cast<size_t>(k - 2)];
            double coef = std::pow(scale, q);
            return coef * h[static_cast<size_t>(q - 1)];
        });
    }

    // ---- algebra -----------------------------------------------------------

    SmoothFn operator*(double s) const {
        SmoothFn f = *this;
        DerivFn d = deriv_;
        f.deriv_ = [d, s](const Pt& x, const Counts& c) { return s * d(x, c); };
        return f;
    }

    SmoothFn operator+(const SmoothFn& o) const {
        check_same_dim(o);
        DerivFn a = deriv_, b = o.deriv_;
        return SmoothFn(dim_, [a, b](const Pt& x, const Counts& c) { return a(x, c) + b(x, c); });
    }

    // Leibniz product.
    SmoothFn operator*(const SmoothFn& o) const {
        check_same_dim(o);
        DerivFn a = deriv_, b = o.deriv_;
        return SmoothFn(dim_, [a, b](const Pt& x, const Counts& gamma) {
            double acc = 0.0;
            for (int b0 = 0; b0 <= gamma[0]; ++b0)
                for (int b1 = 0; b1 <= gamma[1]; ++b1)
                    for (int b2 = 0; b2 <= gamma[2]; ++b2) {
                        Counts beta{b0, b1, b2};
                        Counts rest{gamma[0] - b0, gamma[1] - b1, gamma[2] - b2};
                        double coeff = binomial(gamma[0], b0) * binomial(gamma[1], b1) * binomial(gamma[2], b2);
                        acc += coeff * a(x, beta) * b(x, rest);
                    }
            return acc;
        });
    }

    // e^{-u^2/2v} normalized derivative helper, shared with the density
    // oracles: returns d^k/du^k [ exp(-u^2/(2v)) ].
    static double gaussian_1d_deriv(double u, double v, int k) {
        double g0 = std::exp(-u * u / (2.0 * v));
        if (k == 0) return g0;
        double gm1 = g0;
        double gm2 = 0.0;
        for (int j = 1; j <= k; ++j) {
            double g = -(u / v) * gm1 - (double(j - 1) / v) * gm2;
            gm2 = gm1;
            gm1 = g;
        }
        return gm1;
    }

    static double weight_psi_deriv(int dim, double kappa, const Pt& x, const Counts& c) {
        int order = total_order(c);
        if (order == 0) return std::pow(1.0 + sq_norm(x, dim), kappa);
        auto layout = jet_layout(dim, order);
        Jet base = Jet::constant(layout, 1.0);
        for (int a = 0; a < dim; ++a) {
            Jet xa = Jet::coordinate(layout, x, a);
            base = base + xa * xa;
        }
        return base.pow(kappa).get(c);
    }

private:
    void check_same_dim(const SmoothFn& o) const {
        if (dim_ != o.dim_) throw std::invalid_argument("SmoothFn: dimension mismatch");
    }

    int dim_ = 1;
    DerivFn deriv_;
};

}  // namespace semilab
