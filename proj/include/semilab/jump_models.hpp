#pragma once

#include "semilab/grid.hpp"
#include "semilab/sampled_field.hpp"
#include "semilab/stats.hpp"

#include <Eigen/Dense>

#include <optional>

namespace semilab::jumps {

// Jump intensity measure on R \ {0}: a density part (possibly with a power
// singularity at the origin and/or unbounded support) plus a list of atoms.
struct LevyMeasure {
    std::function<double(double)> density;  // intensity h(z) >= 0; may be empty
    double sing_exponent = 0.0;             // h ~ |z|^{-1-sing_exponent} near 0 (grading hint)
    double support_radius = std::numeric_limits<double>::infinity();
    bool symmetric = false;                 // h(-z) == h(z)
    std::vector<std::pair<double, double>> atoms;  // (location, mass)

    bool has_density() const { return static_cast<bool>(density); }
};

struct JumpModel {
    std::string name = "custom";
    int dim = 1;
    LevyMeasure levy;
    // c(z, x) in R^d
    std::function<void(double, const Pt&, Pt&)> jump_coeff;
    bool coeff_x_dependent = false;
    bool coeff_odd_in_z = false;  // c(-z,x) == -c(z,x); enables paired quadrature
    std::function<void(const Pt&, Pt&)> drift;  // empty = zero drift
    bool big_jump_compensable = true;           // integral of |c| over big jumps finite
    Grid probe = Grid::symmetric_1d(3.0, 61);   // x sweep for sups / infs

    void eval_coeff(double z, const Pt& x, Pt& out) const { jump_coeff(z, x, out); }
};

// Built-in model zoo (the CLI names match these factory names).
JumpModel stable1d(double alpha);
JumpModel stable1d_onesided(double alpha);
JumpModel tempered_stable1d(double alpha, double beta);
JumpModel compound_poisson(std::vector<std::pair<double, double>> atoms);
JumpModel uniform_jumps();
// stable intensity with x-modulated coefficient c(z,x) = z (1 + 0.5 sin x)
JumpModel modulated_stable1d(double alpha);

// ---- measure quadrature ------------------------------------------------

struct LevyQuadDiag {
    double abs_error = 0.0;   // quadrature refinement delta plus truncation remainder
    int cells = 0;
};

// Integral of g against the measure over {0 < |z| <= r}. Graded geometric
// cells toward the singularity, Gauss-Legendre inside each cell. Throws on
// divergence (e.g. second moment of an alpha >= 2 intensity).
double levy_integral_small(const LevyMeasure& levy, double r, const std::function<double(double)>& g,
                           LevyQuadDiag* diag = nullptr);

// Integral over {|z| > r}; geometric cells outward until the contributions
// are negligible or the support ends.
double levy_integral_big(const LevyMeasure& levy, double r, const std::function<double(double)>& g,
                         LevyQuadDiag* diag = nullptr);

// ---- model-level operations ---------------------------------------------

// A_r(x) = integral of c c^T over {|z| <= r}
Eigen::MatrixXd small_jump_covariance(const JumpModel& model, double r, const Pt& x,
                                      LevyQuadDiag* diag = nullptr);

// sup_x integral of |c(z,x)|^3 over {|z| <= r}
double rate_epsilon(const JumpModel& model, double r);

// Smallest eigenvalue of a symmetric matrix field over a probe grid.
double ellipticity(const std::function<Eigen::MatrixXd(const Pt&)>& field, const Grid& probe);

// Ellipticity of the small-jump covariance field at cutoff r.
double ellipticity(const JumpModel& model, double r);

enum class GeneratorVariant { full, truncated };

// L f(x) (full) or the substituted generator (truncated at r: big jumps kept,
// small jumps replaced by the matched Gaussian term). Fields must carry
// analytic derivatives. `A_override` substitutes the Gaussian covariance.
double apply_generator(const JumpModel& model, GeneratorVariant variant, double r, const SampledField& f,
                       const Pt& x, const Eigen::MatrixXd* A_override = nullptr);

struct DeltaProbeResult {
    double sup_abs = 0.0;   // sup over the probe grid of |Lf - L_r f|
    double budget = 0.0;    // rate(r) * ||f||_{3,inf}
    double ratio = 0.0;     // sup / budget (0 when budget is 0)
};

// Measures the substitution defect directly through its Taylor-remainder
// integrand, avoiding cancellation between the full and truncated forms.
DeltaProbeResult delta_probe(const JumpModel& model, double r, const SampledField& f);

// ---- approximation ladder -------------------------------------------------

struct ApproximationProfile {
    int level = 0;
    double cutoff = 0.0;       // r_n
    double rate = 0.0;         // eps_n
    double ellipticity = 0.0;  // lambda_n
    double propagation = 1.0;  // Lambda_n
};

struct Ladder {
    std::string name = "ladder";
    std::vector<ApproximationProfile> levels;
    double gamma = 1.0;   // recorded geometric-control constant
    double theta0 = 0.5;
    double a = 3.0;
    double b = 0.0;
    std::optional<JumpModel> model;

    const ApproximationProfile& at(int n) const;
};

// Computes rate/ellipticity per level from the model by quadrature and
// validates the ladder monotonicity structure, recording gamma.
Ladder build_ladder(const JumpModel& model, int n_min, int n_max, const std::function<double(int)>& r_of_n,
                    double theta0 = 0.5, double a = 3.0, double b = 0.0, double propagation = 1.0);

// Validates invariants on a hand-built ladder and records gamma.
void finalize_ladder(Ladder& ladder);

struct BalanceReport {
    double delta = 0.0;
    double theta0 = 0.5;
    std::vector<double> phi;           // balance functional per level
    std::vector<double> phi_tail_sup;  // sup over levels >= n
    LinFit slope_fit;                  // log2 phi against level index
    std::string verdict;               // bounded | unbounded | inconclusive
    bool pairwise_growth_ok = true;    // phi_n <= gamma^{1+theta0(a+b+delta)} phi_{n+1}
    double growth_margin = 0.0;        // worst violation ratio (<= 1 when ok)
};

BalanceReport balance_report(const Ladder& ladder, double delta);

}  // namespace semilab::jumps
