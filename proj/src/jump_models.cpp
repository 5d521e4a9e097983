#include "semilab/jump_models.hpp"

#include "semilab/quadrature.hpp"

#include <algorithm>

namespace semilab::jumps {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// One-sided graded quadrature of g(z) h(z) over (0, r] or [-r, 0):
// geometric cells toward 0 absorb the |z|^{-1-alpha} singularity.
double graded_toward_zero(const std::function<double(double)>& h, const std::function<double(double)>& g,
                          double r, int side, LevyQuadDiag* diag) {
    const int max_cells = 20000;
    double acc = 0.0;
    double err = 0.0;
    double hi = r;
    int quiet = 0;
    double prev_abs = kInf;
    int growing = 0;
    for (int j = 0; j < max_cells; ++j) {
        double lo = hi * 0.5;
        auto integrand = [&](double m) {
            double z = side * m;
            return g(z) * h(z);
        };
        double c16 = integrate_gl(integrand, lo, hi, 16);
        double c8 = integrate_gl(integrand, lo, hi, 8);
        acc += c16;
        err += std::abs(c16 - c8);
        if (diag) diag->cells += 1;

        double cell_abs = std::abs(c16);
        if (cell_abs > prev_abs * 1.0000001 && j > 4) {
            if (++growing > 12)
                throw numeric_error("levy_integral_small: contributions grow toward z=0 (divergent integral)");
        } else {
            growing = 0;
        }
        prev_abs = cell_abs;

        double scale = std::max(std::abs(acc), 1e-300);
        if (cell_abs < 1e-15 * scale) {
            if (++quiet >= 3) {
                if (diag) diag->abs_error += err + cell_abs;
                return acc;
            }
        } else {
            quiet = 0;
        }
        hi = lo;
    }
    throw numeric_error("levy_integral_small: no convergence after 20000 graded cells (divergent or near-critical)");
}

double outward_cells(const std::function<double(double)>& h, const std::function<double(double)>& g,
                     double r, double support, int side, LevyQuadDiag* diag) {
    const int max_cells = 400;
    double acc = 0.0;
    double err = 0.0;
    double lo = r;
    int quiet = 0;
    double prev_abs = kInf;
    int growing = 0;
    for (int j = 0; j < max_cells && lo < support; ++j) {
        double hi = std::min(lo * 2.0, support);
        auto integrand = [&](double m) {
            double z = side * m;
            return g(z) * h(z);
        };
        double c16 = integrate_gl(integrand, lo, hi, 16);
        double c8 = integrate_gl(integrand, lo, hi, 8);
        acc += c16;
        err += std::abs(c16 - c8);
        if (diag) diag->cells += 1;

        double cell_abs = std::abs(c16);
        if (cell_abs > prev_abs * 1.0000001 && j > 4) {
            if (++growing > 12) throw numeric_error("levy_integral_big: contributions grow outward (divergent integral)");
        } else {
            growing = 0;
        }
        prev_abs = cell_abs;

        double scale = std::max(std::abs(acc), 1e-300);
        if (cell_abs < 1e-15 * scale) {
            if (++quiet >= 3) break;
        } else {
            quiet = 0;
        }
        lo = hi;
    }
    if (lo < support && std::isinf(support) && quiet < 3)
        throw numeric_error("levy_integral_big: tail did not converge within 400 doubling cells");
    if (diag) diag->abs_error += err;
    return acc;
}

}  // namespace

double levy_integral_small(const LevyMeasure& levy, double r, const std::function<double(double)>& g,
                           LevyQuadDiag* diag) {
    if (!(r > 0.0)) throw std::invalid_argument("levy_integral_small: cutoff must be positive");
    double acc = 0.0;
    if (levy.has_density()) {
        double top = std::min(r, levy.support_radius);
        if (top > 0.0) {
            acc += graded_toward_zero(levy.density, g, top, +1, diag);
            acc += graded_toward_zero(levy.density, g, top, -1, diag);
        }
    }
    for (const auto& [z, w] : levy.atoms)
        if (z != 0.0 && std::abs(z) <= r) acc += w * g(z);
    return acc;
}

double levy_integral_big(const LevyMeasure& levy, double r, const std::function<double(double)>& g,
                         LevyQuadDiag* diag) {
    if (!(r > 0.0)) throw std::invalid_argument("levy_integral_big: cutoff must be positive");
    double acc = 0.0;
    if (levy.has_density() && levy.support_radius > r) {
        acc += outward_cells(levy.density, g, r, levy.support_radius, +1, diag);
        acc += outward_cells(levy.density, g, r, levy.support_radius, -1, diag);
    }
    for (const auto& [z, w] : levy.atoms)
        if (std::abs(z) > r) acc += w * g(z);
    return acc;
}

// ---- built-in models -------------------------------------------------------

namespace {

void coeff_identity(double z, const Pt&, Pt& out) {
    out = Pt{z, 0.0, 0.0};
}

}  // namespace

JumpModel stable1d(double alpha) {
    if (!(alpha > 0.0 && alpha < 2.0)) throw std::invalid_argument("stable1d: alpha must lie in (0,2)");
    JumpModel m;
    m.name = "stable1d";
    m.levy.density = [alpha](double z) { return std::pow(std::abs(z), -1.0 - alpha); };
    m.levy.sing_exponent = alpha;
    m.levy.symmetric = true;
    m.jump_coeff = coeff_identity;
    m.coeff_odd_in_z = true;
    m.big_jump_compensable = alpha > 1.0;
    return m;
}

JumpModel stable1d_onesided(double alpha) {
    if (!(alpha > 0.0 && alpha < 2.0)) throw std::invalid_argument("stable1d_onesided: alpha must lie in (0,2)");
    JumpModel m;
    m.name = "stable1d_onesided";
    m.levy.density = [alpha](double z) { return z > 0.0 ? std::pow(z, -1.0 - alpha) : 0.0; };
    m.levy.sing_exponent = alpha;
    m.jump_coeff = coeff_identity;
    m.big_jump_compensable = alpha > 1.0;
    return m;
}

JumpModel tempered_stable1d(double alpha, double beta) {
    if (!(alpha > 0.0 && alpha < 2.0)) throw std::invalid_argument("tempered_stable1d: alpha must lie in (0,2)");
    if (!(beta > 0.0)) throw std::invalid_argument("tempered_stable1d: beta must be positive");
    JumpModel m;
    m.name = "tempered_stable1d";
    m.levy.density = [alpha, beta](double z) {
        double a = std::abs(z);
        return std::exp(-beta * a) * std::pow(a, -1.0 - alpha);
    };
    m.levy.sing_exponent = alpha;
    m.levy.symmetric = true;
    m.jump_coeff = coeff_identity;
    m.coeff_odd_in_z = true;
    m.big_jump_compensable = true;
    return m;
}

JumpModel compound_poisson(std::vector<std::pair<double, double>> atoms) {
    JumpModel m;
    m.name = "compound_poisson";
    m.levy.atoms = std::move(atoms);
    for (const auto& [z, w] : m.levy.atoms) {
        if (z == 0.0) throw std::invalid_argument("compound_poisson: atom at zero");
        if (w < 0.0) throw std::invalid_argument("compound_poisson: negative mass");
    }
    m.jump_coeff = coeff_identity;
    m.big_jump_compensable = true;
    return m;
}

JumpModel uniform_jumps() {
    JumpModel m;
    m.name = "uniform_jumps";
    m.levy.density = [](double) { return 1.0; };
    m.levy.sing_exponent = 0.0;
    m.levy.support_radius = 1.0;
    m.levy.symmetric = true;
    m.jump_coeff = coeff_identity;
    m.coeff_odd_in_z = true;
    m.big_jump_compensable = true;
    return m;
}

JumpModel modulated_stable1d(double alpha) {
    JumpModel m = stable1d(alpha);
    m.name = "modulated_stable1d";
    m.jump_coeff = [](double z, const Pt& x, Pt& out) { out = Pt{z * (1.0 + 0.5 * std::sin(x[0])), 0.0, 0.0}; };
    m.coeff_x_dependent = true;
    m.coeff_odd_in_z = true;
    return m;
}

// ---- model-level operations -------------------------------------------------

Eigen::MatrixXd small_jump_covariance(const JumpModel& model, double r, const Pt& x, LevyQuadDiag* diag) {
    const int d = model.dim;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
            double v = levy_integral_small(
                model.levy, r,
                [&](double z) {
                    Pt c{};
                    model.eval_coeff(z, x, c);
                    return c[i] * c[j];
                },
                diag);
            A(i, j) = v;
            A(j, i) = v;
        }
    return A;
}

double rate_epsilon(const JumpModel& model, double r) {
    auto one_x = [&](const Pt& x) {
        return levy_integral_small(model.levy, r, [&](double z) {
            Pt c{};
            model.eval_coeff(z, x, c);
            return std::pow(std::sqrt(sq_norm(c, model.dim)), 3.0);
        });
    };
    if (!model.coeff_x_dependent) return one_x(Pt{});
    double best = 0.0;
    for (size_t i = 0; i < model.probe.size(); ++i) best = std::max(best, one_x(model.probe.point(i)));
    return best;
}

double ellipticity(const std::function<Eigen::MatrixXd(const Pt&)>& field, const Grid& probe) {
    double lo = kInf;
    for (size_t i = 0; i < probe.size(); ++i) {
        Eigen::MatrixXd A = field(probe.point(i));
        if (!A.isApprox(A.transpose(), 1e-10)) throw std::invalid_argument("ellipticity: field is not symmetric");
        if (A.rows() == 1) {
            lo = std::min(lo, A(0, 0));
        } else {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
            lo = std::min(lo, es.eigenvalues().minCoeff());
        }
    }
    return lo;
}

double ellipticity(const JumpModel& model, double r) {
    if (!model.coeff_x_dependent) {
        Eigen::MatrixXd A = small_jump_covariance(model, r, Pt{});
        if (model.dim == 1) return A(0, 0);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
        return es.eigenvalues().minCoeff();
    }
    return ellipticity([&](const Pt& x) { return small_jump_covariance(model, r, x); }, model.probe);
}

namespace {

// (1/k!) (c . grad)^k f(x)
double directional_term(const SmoothFn& f, const Pt& x, const Pt& c, int dim, int k) {
    double kfact = factorial(k);
    double acc = 0.0;
    for_each_counts_of_order(dim, k, [&](const Counts& gamma) {
        double cpow = 1.0;
        for (int a = 0; a < dim; ++a)
            for (int j = 0; j < gamma[a]; ++j) cpow *= c[a];
        acc += tuple_multiplicity(gamma) / kfact * cpow * f.deriv(x, gamma);
    });
    return acc;
}

// f(x+c) minus its Taylor polynomial of order k0-1. Small displacements use
// the analytic series of orders k0..6: the direct difference cancels to
// float noise there and poisons the graded quadrature near z = 0.
constexpr double kSeriesRadius = 0.05;

double taylor_remainder(const SmoothFn& f, const Pt& x, const Pt& c, int dim, int k0) {
    double cnorm = std::sqrt(sq_norm(c, dim));
    if (cnorm > kSeriesRadius) {
        Pt shifted = x;
        for (int a = 0; a < dim; ++a) shifted[a] += c[a];
        double acc = f.value(shifted);
        for (int k = 0; k < k0; ++k) acc -= directional_term(f, x, c, dim, k);
        return acc;
    }
    double acc = 0.0;
    for (int k = k0; k <= 6; ++k) acc += directional_term(f, x, c, dim, k);
    return acc;
}

// Compensated jump integrand f(x + c) - f(x) - <c, grad f(x)>.
double compensated_term(const JumpModel& model, const SampledField& f, const Pt& x, double z) {
    Pt c{};
    model.eval_coeff(z, x, c);
    return taylor_remainder(f.fn(), x, c, model.dim, 2);
}

}  // namespace

double apply_generator(const JumpModel& model, GeneratorVariant variant, double r, const SampledField& f,
                       const Pt& x, const Eigen::MatrixXd* A_override) {
    if (!f.analytic())
        throw std::invalid_argument("apply_generator: field must carry analytic derivatives");
    const int d = model.dim;

    double acc = 0.0;
    if (model.drift) {
        Pt b{};
        model.drift(x, b);
        for (int a = 0; a < d; ++a) acc += b[a] * f.fn().deriv(x, axis_counts(a));
    }

    auto integrand = [&](double z) { return compensated_term(model, f, x, z); };

    if (variant == GeneratorVariant::full) {
        if (model.levy.has_density()) {
            if (model.levy.symmetric && model.coeff_odd_in_z) {
                // Pair +-z: the compensator cancels analytically, which keeps
                // the outward tail absolutely convergent for every alpha < 2.
                auto paired = [&](double z) {
                    Pt c{};
                    model.eval_coeff(z, x, c);
                    Pt minus{};
                    for (int a = 0; a < d; ++a) minus[a] = -c[a];
                    return taylor_remainder(f.fn(), x, c, d, 1) + taylor_remainder(f.fn(), x, minus, d, 1);
                };
                LevyMeasure pos = model.levy;
                pos.atoms.clear();
                pos.symmetric = false;
                pos.density = [h = model.levy.density](double z) { return z > 0.0 ? h(z) : 0.0; };
                acc += levy_integral_small(pos, r, paired);
                acc += levy_integral_big(pos, r, paired);
            } else {
                LevyMeasure dens = model.levy;
                dens.atoms.clear();
                acc += levy_integral_small(dens, r, integrand);
                acc += levy_integral_big(dens, r, integrand);
            }
        }
        for (const auto& [z, w] : model.levy.atoms)
            if (z != 0.0) acc += w * integrand(z);
        return acc;
    }

    // truncated: big jumps kept, small jumps replaced by the Gaussian term
    acc += levy_integral_big(model.levy, r, integrand);
    Eigen::MatrixXd A = A_override ? *A_override : small_jump_covariance(model, r, x);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            Counts c = zero_counts();
            c[i] += 1;
            c[j] += 1;
            acc += 0.5 * A(i, j) * f.fn().deriv(x, c);
        }
    return acc;
}

DeltaProbeResult delta_probe(const JumpModel& model, double r, const SampledField& f) {
    if (!f.analytic()) throw std::invalid_argument("delta_probe: field must carry analytic derivatives");
    const int d = model.dim;
    const Grid& probe = model.probe;

    auto defect_at = [&](const Pt& x) {
        // third-order Taylor remainder of the substitution, integrated over
        // the small jumps
        auto integrand = [&](double z) {
            Pt c{};
            model.eval_coeff(z, x, c);
            return taylor_remainder(f.fn(), x, c, d, 3);
        };
        return levy_integral_small(model.levy, r, integrand);
    };

    DeltaProbeResult out;
    for (size_t i = 0; i < probe.size(); ++i)
        out.sup_abs = std::max(out.sup_abs, std::abs(defect_at(probe.point(i))));

    double f3 = 0.0;  // ||f||_{3,inf} on the probe grid
    for (size_t i = 0; i < probe.size(); ++i) {
        Pt x = probe.point(i);
        double s = 0.0;
        for_each_counts_up_to(d, 3, [&](const Counts& c) {
            s += tuple_multiplicity(c) * std::abs(f.fn().deriv(x, c));
        });
        f3 = std::max(f3, s);
    }
    out.budget = rate_epsilon(model, r) * f3;
    out.ratio = out.budget > 0.0 ? out.sup_abs / out.budget : 0.0;
    return out;
}

// ---- ladders ----------------------------------------------------------------

const ApproximationProfile& Ladder::at(int n) const {
    for (const auto& p : levels)
        if (p.level == n) return p;
    throw std::invalid_argument("Ladder::at: no such level");
}

void finalize_ladder(Ladder& ladder) {
    auto& ls = ladder.levels;
    if (ls.size() < 2) throw std::invalid_argument("ladder needs at least 2 levels");
    double gamma = 1.0;
    for (size_t i = 0; i + 1 < ls.size(); ++i) {
        if (!(ls[i + 1].cutoff < ls[i].cutoff))
            throw std::invalid_argument("ladder: cutoff radii must decrease strictly");
        if (ls[i + 1].rate > ls[i].rate * (1.0 + 1e-12))
            throw std::invalid_argument("ladder: rates must be non-increasing");
        if (ls[i + 1].ellipticity > ls[i].ellipticity * (1.0 + 1e-12))
            throw std::invalid_argument("ladder: ellipticities must be non-increasing");
        if (ls[i + 1].propagation < ls[i].propagation * (1.0 - 1e-12))
            throw std::invalid_argument("ladder: propagation constants must be non-decreasing");
        if (ls[i + 1].ellipticity > 0.0) gamma = std::max(gamma, ls[i].ellipticity / ls[i + 1].ellipticity);
        if (ls[i].propagation > 0.0) gamma = std::max(gamma, ls[i + 1].propagation / ls[i].propagation);
    }
    ladder.gamma = gamma;
}

Ladder build_ladder(const JumpModel& model, int n_min, int n_max, const std::function<double(int)>& r_of_n,
                    double theta0, double a, double b, double propagation) {
    Ladder lad;
    lad.name = model.name;
    lad.theta0 = theta0;
    lad.a = a;
    lad.b = b;
    lad.model = model;
    for (int n = n_min; n <= n_max; ++n) {
        ApproximationProfile p;
        p.level = n;
        p.cutoff = r_of_n(n);
        p.rate = rate_epsilon(model, p.cutoff);
        p.ellipticity = ellipticity(model, p.cutoff);
        p.propagation = propagation;
        lad.levels.push_back(p);
    }
    finalize_ladder(lad);
    return lad;
}

BalanceReport balance_report(const Ladder& ladder, double delta) {
    if (ladder.levels.size() < 3) throw std::invalid_argument("balance_report: need >= 3 ladder levels");
    BalanceReport rep;
    rep.delta = delta;
    rep.theta0 = ladder.theta0;
    double expo = ladder.theta0 * (ladder.a + ladder.b + delta);

    for (const auto& p : ladder.levels) {
        if (p.ellipticity == 0.0) {
            if (p.rate == 0.0) {
                rep.phi.push_back(0.0);  // vanished defect: balance trivially holds
                continue;
            }
            throw numeric_error("balance_report: zero ellipticity with nonzero rate");
        }
        rep.phi.push_back(p.rate * p.propagation * std::pow(p.ellipticity, -expo));
    }

    rep.phi_tail_sup.assign(rep.phi.size(), 0.0);
    double running = 0.0;
    for (size_t i = rep.phi.size(); i-- > 0;) {
        running = std::max(running, rep.phi[i]);
        rep.phi_tail_sup[i] = running;
    }

    double growth_bound = std::pow(ladder.gamma, 1.0 + expo);
    rep.growth_margin = 0.0;
    for (size_t i = 0; i + 1 < rep.phi.size(); ++i) {
        if (rep.phi[i + 1] == 0.0) continue;
        double ratio = rep.phi[i] / (growth_bound * rep.phi[i + 1]);
        rep.growth_margin = std::max(rep.growth_margin, ratio);
    }
    rep.pairwise_growth_ok = rep.growth_margin <= 1.0 + 1e-9;

    bool any_zero = std::any_of(rep.phi.begin(), rep.phi.end(), [](double v) { return v == 0.0; });
    if (any_zero) {
        bool all_zero = std::all_of(rep.phi.begin(), rep.phi.end(), [](double v) { return v == 0.0; });
        rep.verdict = all_zero ? "bounded" : "inconclusive";
        return rep;
    }

    std::vector<double> ns(rep.phi.size()), logs(rep.phi.size());
    for (size_t i = 0; i < rep.phi.size(); ++i) {
        ns[i] = double(ladder.levels[i].level);
        logs[i] = std::log2(rep.phi[i]);
    }
    rep.slope_fit = fit_line(ns, logs);
    double ci = 2.0 * rep.slope_fit.slope_stderr + 1e-9;
    rep.verdict = rep.slope_fit.slope <= ci ? "bounded" : "unbounded";
    return rep;
}

}  // namespace semilab::jumps
