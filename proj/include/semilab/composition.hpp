#pragma once

#include "semilab/density.hpp"
#include "semilab/smooth_fn.hpp"
#include "semilab/stats.hpp"

#include <Eigen/Dense>

namespace semilab::comp {

// Operator interleaved between chain links: a shift, or a differential sum
// c0(x) + c1(x) d + c2(x) d^2 with analytic coefficients (applied to the
// left argument of the following kernel).
struct ChainOperator {
    bool is_shift = false;
    double shift_by = 0.0;
    SmoothFn c0, c1, c2;  // invalid closure = zero coefficient

    static ChainOperator identity() {
        ChainOperator op;
        op.c0 = SmoothFn::constant(1, 1.0);
        return op;
    }
    static ChainOperator shift(double c) {
        ChainOperator op;
        op.is_shift = true;
        op.shift_by = c;
        return op;
    }
    // a(x) d
    static ChainOperator first_order(SmoothFn a) {
        ChainOperator op;
        op.c1 = std::move(a);
        return op;
    }
    // (1/2) c2 d^2
    static ChainOperator second_order(double c2) {
        ChainOperator op;
        op.c2 = SmoothFn::constant(1, 0.5 * c2);
        return op;
    }
};

struct ChainLinkSpec {
    density::Oracle kernel;
    double duration = 0.0;
};

// Product of semigroup steps with interleaved operators:
// S_{d1} U_1 S_{d2} U_2 ... S_{dm}; m <= 3 links.
struct KernelChain {
    std::vector<ChainLinkSpec> links;
    std::vector<ChainOperator> ops;  // size links.size() - 1

    double total_time() const;
    // index of a link with duration >= t/m (recorded for diagnostics)
    int pigeonhole_index() const;
    void validate() const;
};

struct ChainQuadrature {
    double radius = 12.0;  // intermediate-variable window
    int nodes = 481;       // trapezoid nodes per intermediate axis
};

struct ComposedKernel {
    std::vector<double> xs, ys;
    Eigen::MatrixXd values;
    double quad_error = 0.0;  // max deviation against a half-resolution rerun
};

// The chain's kernel on (x, y), with optional outer derivatives d_x^dx,
// d_y^dy; nested quadrature over the intermediate variables.
ComposedKernel compose_kernels(const KernelChain& chain, const Grid& xg, const Grid& yg,
                               const ChainQuadrature& quad, int dx = 0, int dy = 0);

// ---- weighted-norm probe across a time ladder --------------------------------

struct ComposedBoundProbe {
    std::vector<double> ts;
    std::vector<double> weighted_norm_sup;  // sup_x ||d^beta p~(x,.)||_{q1,kappa,p} / psi_chi(x)
    LinFit fit;
    double budget_exponent = 0.0;  // theta0 (q1+q2+d+2 theta1) + (m-1) theta0 (a+b)
    bool within_budget = false;
};

struct BoundProbeRequest {
    std::function<KernelChain(double t)> make_chain;
    std::vector<double> ts;
    int q1 = 0, q2 = 0;
    double kappa = 0.0;
    double p = 2.0;
    double chi = 0.0;
    double theta0 = 0.5, theta1 = 1.0, a = 0.0, b = 0.0;
    Grid xg = Grid::symmetric_1d(2.0, 41);
    Grid yg = Grid::symmetric_1d(8.0, 321);
    ChainQuadrature quad;
};

ComposedBoundProbe composed_bound_probe(const BoundProbeRequest& req);

// ---- Lindeberg expansion ------------------------------------------------------

// A limit semigroup, its substitute, and their generator defect as an
// explicit operator.
struct SemigroupPair {
    density::Oracle limit;
    density::Oracle approx;
    ChainOperator defect;
    double coupling = 0.0;  // ladder parameter, echoed in reports
};

// commuting pair: both heat kernels, defect (1/2)(s2 - s2n) d^2
SemigroupPair commuting_pair(double sigma2, double sigma2n);
// limit = heat(sigma2), substitute = OU(theta, sigma2), defect theta x d
SemigroupPair ou_pair(double theta, double sigma2);

struct LindebergExpansion {
    double t = 1.0;
    int depth = 1;  // m0
    std::vector<double> xs, ys;
    std::vector<Eigen::MatrixXd> term_kernels;  // I^m kernels, m = 1..m0-1
    Eigen::MatrixXd substitute_kernel;          // p^n_t
    Eigen::MatrixXd series_kernel;              // p^n_t + sum of terms
    std::vector<double> y_weights;

    // action of the truncated series on a test function, per x node
    std::vector<double> apply_series(const SmoothFn& f) const;
    std::vector<double> apply_term(int m, const SmoothFn& f) const;
};

// Iterated time-simplex quadrature (tensor Gauss-Legendre on the Duffy cube)
// of the defect chains; depth m0 <= 3.
LindebergExpansion lindeberg_terms(const SemigroupPair& pair, double t, int m0, const Grid& xg,
                                   const Grid& yg, const ChainQuadrature& quad, int gl_time_order = 16);

struct RemainderEstimate {
    std::vector<double> per_function_sup;  // sup_x |P_t f - series f| per corpus member
    double worst = 0.0;
};

RemainderEstimate remainder_estimate(const SemigroupPair& pair, const LindebergExpansion& expansion,
                                     const std::vector<SmoothFn>& corpus);

struct RemainderOrderFit {
    std::vector<double> couplings;
    std::vector<double> sups;
    LinFit fit;  // log sup against log coupling; slope ~ m0
};

RemainderOrderFit remainder_order(const std::function<SemigroupPair(double)>& make_pair,
                                  const std::vector<double>& couplings, double t, int m0, const Grid& xg,
                                  const Grid& yg, const ChainQuadrature& quad,
                                  const std::vector<SmoothFn>& corpus);

}  // namespace semilab::comp
