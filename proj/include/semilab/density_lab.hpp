#pragma once

#include "semilab/density.hpp"
#include "semilab/jump_models.hpp"
#include "semilab/smooth_fn.hpp"
#include "semilab/stats.hpp"

namespace semilab::density_lab {

// ---- kernel derivative fields ----------------------------------------------

// |d_x^qx d_y^qy p_t| over the product of two 1D grids (oracle backend).
Eigen::MatrixXd kernel_derivatives(const density::Oracle& oracle, double t, int qx, int qy,
                                   const Grid& xgrid, const Grid& ygrid);

// y-derivatives of a density slice along a 1D grid (any backend; KDE
// supports total order <= 2 and no x-derivatives).
std::vector<double> kernel_derivatives(const density::KernelDensity& density, int qy, const Grid& ygrid);

// ---- blow-up exponent fitting ------------------------------------------------

struct BoundFit {
    int qx = 0, qy = 0;
    double kappa = 0.0;
    double pi_exponent = 0.0;
    std::vector<double> ts;
    std::vector<double> weighted_sup;  // M(t) per time
    LinFit fit;                        // log M against log t
    double slope() const { return fit.slope; }
    double prefactor() const { return std::exp(fit.intercept); }
};

struct BlowupRequest {
    density::Oracle oracle = density::Oracle::heat(1.0);
    std::vector<double> ts;  // log-spaced, >= 5 values spanning >= 1.5 decades
    Grid xgrid = Grid::symmetric_1d(3.0, 301);
    Grid ygrid = Grid::symmetric_1d(3.0, 301);
    int qx = 0, qy = 0;
    double kappa = 0.0;
    std::optional<double> pi_exponent;  // searched over {0..8} when unset
};

// M(t) = sup_{(x,y)} |d^qx_x d^qy_y p_t(x,y)| psi_kappa(x-y) / psi_pi(x),
// fitted against t in log-log coordinates.
BoundFit blowup_fit(const BlowupRequest& req);

// Empirical variant over density slices (typically KDE-backed): x stays at
// each slice's base point, so only y-derivatives enter.
BoundFit blowup_fit(const std::vector<std::pair<double, density::KernelDensity>>& family, int qy,
                    double kappa, const Grid& ygrid);

std::vector<double> log_spaced(double t_lo, double t_hi, int count);

// ---- transfer exponent check ---------------------------------------------------

struct TransferCheck {
    std::string verdict;  // "pass" | "fail" | "no guarantee"
    double measured = 0.0;
    double predicted = 0.0;
    double slack = 0.0;
};

// Compares a fitted blow-up slope against the budget
// theta0 (1 + (a+b)/delta) (qx + qy + 2 d + epsilon), provided the balance
// functional of the ladder stays bounded at this delta.
TransferCheck transfer_exponent_check(const BoundFit& fit, const jumps::BalanceReport& balance, double a,
                                      double b, double delta, double theta0, double epsilon, int dim);

// ---- semigroup / adjoint property checks -----------------------------------------

enum class SemigroupCheck {
    l1_contraction,           // A31
    weight_moment,            // A32
    adjoint_weighted_lp,      // A34
    derivative_jensen,        // A36
    adjoint_weighted_sobolev, // A38
    weighted_sup_stability,   // A4
    chapman_kolmogorov,       // CK
    psi_moment_growth,        // P_t-psi-moment
};

const char* to_string(SemigroupCheck tag);
SemigroupCheck semigroup_check_from_string(const std::string& tag);

struct SemigroupCheckConfig {
    double t = 0.5;
    double s = 0.3;      // second time for the kernel-composition residual
    double k = 1.0;      // weight exponent
    double p = 2.0;
    double rho = 2.0;    // A36 / A38 integrability split
    int q = 1;
    double lo = -16.0, hi = 16.0;
    int nodes = 1601;
    Grid probe = Grid::symmetric_1d(4.0, 81);
    std::vector<SmoothFn> corpus;  // defaults provided when empty
};

struct SemigroupCheckResult {
    std::string tag;
    double measured = 0.0;  // measured constant (worst ratio / residual)
    double budget = 0.0;    // structural budget when one exists, else 0
    bool pass = false;
    std::string note;
};

SemigroupCheckResult semigroup_property_check(SemigroupCheck tag, const density::Oracle& oracle,
                                              const SemigroupCheckConfig& cfg);

// Standard smooth corpus used by the checks when none is supplied.
std::vector<SmoothFn> default_check_corpus();

}  // namespace semilab::density_lab
