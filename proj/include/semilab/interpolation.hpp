#pragma once

#include "semilab/core.hpp"

#include <optional>

namespace semilab::interp {

// Parameters of the interpolation-series machinery. `ambient_dim` is the
// dimension of the space carrying the measures (2d for kernel measures on
// product space).
struct InterpolationBudget {
    int k = 0;
    int q = 0;
    int h = 1;              // >= 1
    double p = 2.0;         // > 1
    int ambient_dim = 2;    // D
    std::vector<double> theta;  // theta(n) >= 1, increasing
    double theta_growth = 1.0;  // recorded Theta with theta(n+1) <= Theta * theta(n)
    std::optional<double> theta_tail_ratio;  // growth ratio beyond the stored range

    double p_star() const { return p / (p - 1.0); }
    double rho_h() const { return (k + q + double(ambient_dim) / p_star()) / (2.0 * h); }

    void validate() const;
};

struct SeriesValue {
    double partial = 0.0;
    double tail_bound = 0.0;
    double total() const { return partial + tail_bound; }
};

struct PiFunctionalResult {
    SeriesValue distance_series;  // sum 2^{n(k+q+D/p*)} d_k(mu, mu_n)
    SeriesValue norm_series;      // sum 2^{-2nh} ||f_n||_{2h+q,2h,p}
    double total() const { return distance_series.total() + norm_series.total(); }
};

struct TailModel {
    double dk_ratio = 0.0;    // d_k(n+1) <= dk_ratio * d_k(n) beyond the range
    double norm_ratio = 0.0;  // ||f_{n+1}|| <= norm_ratio * ||f_n|| beyond the range
};

// The two-series interpolation functional with certified geometric tail
// bounds. Throws when a configured tail diverges.
PiFunctionalResult pi_functional(const std::vector<double>& dk_seq, const std::vector<double>& norm_seq, int k,
                                 int q, int h, double p, int ambient_dim,
                                 const std::optional<TailModel>& tail = std::nullopt);

struct RegSchedule {
    std::vector<int> n_of_l;       // n(l) for l = 1..L
    int l_star = 1;                // first l with 2^{2hl}/l^2 >= theta(n_star)
    int l_delta = 1;               // min l with 2^{l delta/(1+delta)} >= l
    bool chain_ok = true;          // theta(n(l)-1) < 2^{2hl}/l^2 <= theta(n(l)) at every l
    bool tail_ok = true;           // 2^{2(h-eps(delta)) l*} <= 2^{2h l(delta)} theta(n*)
};

// Level schedule of the regularity bound: n(l), l*, l(delta), with both
// chain inequalities asserted.
RegSchedule reg_schedule(const InterpolationBudget& budget, int n_star, double delta, int l_max = 64);

struct DkBounds {
    std::vector<double> values;              // upper bounds of d_k(mu, mu_n), n = 0..N-1
    std::optional<double> tail_ratio;        // geometric growth of values beyond the range
};

struct RegBound {
    RegSchedule schedule;
    double A = 0.0;           // mass spread factor
    double B = 0.0;           // smoothness series
    double B_remainder = 0.0;
    double C_hn = 0.0;        // sup_n>=n* d_k(n) theta(n)^{rho_h + eps}
    bool C_finite = true;
    double total = std::numeric_limits<double>::infinity();  // modulo the universal interpolation constant
    bool finite = false;
};

// Full bound assembly: A(delta), B(eps), C_{h,n*}(eps) and the combined
// value Theta + A theta(n*)^{rho_h (1+delta)} + B C. The universal constant
// multiplying it is reported as 1.
RegBound reg_bound(const InterpolationBudget& budget, double mu_mass, const DkBounds& dk, int n_star,
                   double delta, double epsilon);

// B(eps) alone (partial sums with a geometric remainder bound).
SeriesValue smoothness_series(double exponent_base, double epsilon);

// Iteration depth 1 + floor((q + 2 dim / p*) / delta*).
int compute_m0(int q, int dim, double p_star, double delta_star);

enum class ImproveMode { lemma_reg, corollary };

struct ImprovedExponent {
    double exponent = 0.0;       // improved time-blow-up exponent
    double theta1_prime = 0.0;   // replacement weight order (corollary mode)
};

// Exponent arithmetic: lemma_reg gives theta0 (q + D/p* + delta); corollary
// gives theta1' = 2D + eps composed into theta0 (q + 2D + eps).
ImprovedExponent improve_exponent(ImproveMode mode, double theta0, int q, int ambient_dim, double p_star,
                                  double delta_or_eps);

}  // namespace semilab::interp
