#pragma once

#include "semilab/sampled_field.hpp"

#include <limits>
#include <optional>

namespace semilab::weights {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// psi_kappa(x) = (1 + |x|^2)^kappa
inline double eval_weight(const Pt& x, int dim, double kappa) {
    return std::pow(1.0 + sq_norm(x, dim), kappa);
}

// |f|_q(x): sum of |d^alpha f(x)| over all derivative tuples of order <= q,
// tuples in {1..d}^m counted with multiplicity.
double local_seminorm(const SampledField& f, int q, const Pt& x);

// Sup over the grid of |f|_q; FD-backed fields sweep the usable interior.
double seminorm_sup(const SampledField& f, int q);

struct WeightedNormResult {
    double value = 0.0;
    double boundary_share = 0.0;  // fraction of the L^p mass on the outermost shell
};

// ||f||_{q,kappa,p} = || |psi_kappa f|_q ||_p on the field's grid
// (trapezoid for finite p, grid supremum for p = inf, which is a lower
// bound of the true sup). Throws when the boundary shell carries more than
// `boundary_tolerance` of the integral, signalling a non-integrable or
// under-truncated configuration.
WeightedNormResult weighted_norm(const SampledField& f, int q, double kappa, double p,
                                 double boundary_tolerance = 1e-6);

inline double weighted_norm_value(const SampledField& f, int q, double kappa, double p,
                                  double boundary_tolerance = 1e-6) {
    return weighted_norm(f, q, kappa, p, boundary_tolerance).value;
}

// ---- inequality suite ------------------------------------------------------

enum class WeightInequality {
    monotonicity,          // NOT3a: psi_{-k} <= psi_{-k'} for k >= k' >= 0
    peetre,                // NOT3b: psi_k(x) <= C psi_k(y) psi_k(x-y)
    seminorm_product,      // NOT3c: |psi_k f|_q ~ psi_k |f|_q two-sided
    composed_growth,       // NOT3d: psi_k(phi(x)) <= C psi_k(phi(0)) (1+|grad phi|^2)^k psi_k(x)
    norm_equivalence,      // NOT4a: ||psi_k |f|_q||_p ~ ||f||_{q,k,p} two-sided
    inverse_weight_deriv,  // n2: |d^a (1/psi_k)| <= C / psi_k
    weight_deriv,          // n4: |d^a psi_k| <= C psi_k
};

const char* to_string(WeightInequality tag);
WeightInequality weight_inequality_from_string(const std::string& tag);

struct WeightCheckRequest {
    WeightInequality tag{};
    Grid grid;
    double kappa = 1.0;
    double kappa_prime = 0.0;  // second exponent for `monotonicity`
    int q = 1;
    double p = kInf;
    std::optional<SmoothFn> field;         // test field for the two-sided checks
    std::vector<SmoothFn> map_components;  // phi for `composed_growth`
    Counts alpha = zero_counts();          // derivative for n2 / n4
    double stability_tolerance = 0.05;     // relative drift allowed under 2x refinement
};

struct WeightCheckResult {
    std::string tag;
    double constant = 0.0;        // measured best upper constant
    double lower_constant = 0.0;  // measured lower constant for two-sided checks
    double refined_constant = 0.0;
    double refined_lower = 0.0;
    double drift = 0.0;
    bool pass = false;
};

WeightCheckResult verify_weight_inequality(const WeightCheckRequest& req);

}  // namespace semilab::weights
