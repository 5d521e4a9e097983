#include "semilab/density_lab.hpp"

#include "semilab/parallel.hpp"
#include "semilab/quadrature.hpp"
#include "semilab/weights.hpp"

#include <algorithm>

namespace semilab::density_lab {

using density::Oracle;

Eigen::MatrixXd kernel_derivatives(const Oracle& oracle, double t, int qx, int qy, const Grid& xgrid,
                                   const Grid& ygrid) {
    if (xgrid.dim() != 1 || ygrid.dim() != 1)
        throw std::invalid_argument("kernel_derivatives: 1D grids expected");
    return oracle.deriv_matrix(t, qx, qy, xgrid.axis_points(0), ygrid.axis_points(0));
}

std::vector<double> kernel_derivatives(const density::KernelDensity& density, int qy, const Grid& ygrid) {
    std::vector<double> out(ygrid.size());
    parallel_for(ygrid.size(), [&](size_t i) {
        out[i] = density.deriv(ygrid.point(i), axis_counts(0, qy));
    });
    return out;
}

std::vector<double> log_spaced(double t_lo, double t_hi, int count) {
    if (count < 2 || !(t_lo > 0.0) || !(t_hi > t_lo)) throw std::invalid_argument("log_spaced: bad range");
    std::vector<double> ts(static_cast<size_t>(count));
    double step = std::log(t_hi / t_lo) / (count - 1);
    for (int i = 0; i < count; ++i) ts[static_cast<size_t>(i)] = t_lo * std::exp(step * i);
    return ts;
}

namespace {

double weighted_sup(const Oracle& oracle, double t, int qx, int qy, double kappa, double pi_expo,
                    const Grid& xgrid, const Grid& ygrid) {
    auto xs = xgrid.axis_points(0);
    auto ys = ygrid.axis_points(0);
    Eigen::MatrixXd d = oracle.deriv_matrix(t, qx, qy, xs, ys);
    std::vector<double> best(xs.size(), 0.0);
    parallel_for(xs.size(), [&](size_t i) {
        double psi_pi = weights::eval_weight(make_pt(xs[i]), 1, pi_expo);
        double b = 0.0;
        for (size_t j = 0; j < ys.size(); ++j) {
            double w = weights::eval_weight(make_pt(xs[i] - ys[j]), 1, kappa);
            b = std::max(b, std::abs(d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) * w / psi_pi);
        }
        best[i] = b;
    });
    return *std::max_element(best.begin(), best.end());
}

Grid widened(const Grid& g, double factor) {
    double radius = std::max(std::abs(g.lo(0)), std::abs(g.hi(0))) * factor;
    int nodes = static_cast<int>(std::lround((g.nodes(0) - 1) * factor)) + 1;
    return Grid::symmetric_1d(radius, nodes);
}

}  // namespace

BoundFit blowup_fit(const BlowupRequest& req) {
    if (req.ts.size() < 5) throw std::invalid_argument("blowup_fit: need >= 5 times");
    double decades = std::log10(req.ts.back() / req.ts.front());
    if (decades < 1.5 - 1e-9) throw std::invalid_argument("blowup_fit: time grid must span >= 1.5 decades");

    double pi_expo = 0.0;
    if (req.pi_exponent) {
        pi_expo = *req.pi_exponent;
    } else {
        // smallest integer exponent keeping the weighted sup stable when the
        // x-window widens, at both ends of the time grid
        Grid wide = widened(req.xgrid, 2.0);
        for (int cand = 0; cand <= 8; ++cand) {
            bool ok = true;
            for (double t_probe : {req.ts.front(), req.ts.back()}) {
                double base =
                    weighted_sup(req.oracle, t_probe, req.qx, req.qy, req.kappa, cand, req.xgrid, req.ygrid);
                double grown = weighted_sup(req.oracle, t_probe, req.qx, req.qy, req.kappa, cand, wide, req.ygrid);
                ok = ok && std::isfinite(base) && grown <= base * 1.10 + 1e-300;
            }
            if (ok) {
                pi_expo = cand;
                break;
            }
            if (cand == 8)
                throw numeric_error("blowup_fit: no stabilizing weight exponent in 0..8");
        }
    }

    BoundFit out;
    out.qx = req.qx;
    out.qy = req.qy;
    out.kappa = req.kappa;
    out.pi_exponent = pi_expo;
    out.ts = req.ts;
    out.weighted_sup.resize(req.ts.size());
    for (size_t i = 0; i < req.ts.size(); ++i) {
        out.weighted_sup[i] =
            weighted_sup(req.oracle, req.ts[i], req.qx, req.qy, req.kappa, pi_expo, req.xgrid, req.ygrid);
        if (!(out.weighted_sup[i] > 0.0)) throw numeric_error("blowup_fit: nonpositive weighted sup");
    }
    out.fit = fit_loglog(req.ts, out.weighted_sup);
    return out;
}

BoundFit blowup_fit(const std::vector<std::pair<double, density::KernelDensity>>& family, int qy,
                    double kappa, const Grid& ygrid) {
    if (family.size() < 5) throw std::invalid_argument("blowup_fit: need >= 5 time slices");
    BoundFit out;
    out.qy = qy;
    out.kappa = kappa;
    for (const auto& [t, dens] : family) {
        double base = dens.backend() == density::KernelDensity::Backend::oracle ? dens.base_point() : 0.0;
        std::vector<double> best(ygrid.size(), 0.0);
        parallel_for(ygrid.size(), [&](size_t i) {
            Pt y = ygrid.point(i);
            double w = weights::eval_weight(make_pt(base - y[0]), 1, kappa);
            best[i] = std::abs(dens.deriv(y, axis_counts(0, qy))) * w;
        });
        double m = *std::max_element(best.begin(), best.end());
        if (!(m > 0.0)) throw numeric_error("blowup_fit: nonpositive weighted sup");
        out.ts.push_back(t);
        out.weighted_sup.push_back(m);
    }
    double decades = std::log10(out.ts.back() / out.ts.front());
    if (decades < 1.5 - 1e-9) throw std::invalid_argument("blowup_fit: time grid must span >= 1.5 decades");
    out.fit = fit_loglog(out.ts, out.weighted_sup);
    return out;
}

TransferCheck transfer_exponent_check(const BoundFit& fit, const jumps::BalanceReport& balance, double a,
                                      double b, double delta, double theta0, double epsilon, int dim) {
    TransferCheck out;
    if (balance.verdict != "bounded") {
        out.verdict = "no guarantee";
        return out;
    }
    out.measured = std::abs(fit.slope());
    out.predicted = theta0 * (1.0 + (a + b) / delta) * (fit.qx + fit.qy + 2.0 * dim + epsilon);
    out.slack = out.predicted - out.measured;
    out.verdict = out.measured <= out.predicted + 1e-12 ? "pass" : "fail";
    return out;
}

// ---- semigroup checks --------------------------------------------------------

const char* to_string(SemigroupCheck tag) {
    switch (tag) {
        case SemigroupCheck::l1_contraction: return "A31";
        case SemigroupCheck::weight_moment: return "A32";
        case SemigroupCheck::adjoint_weighted_lp: return "A34";
        case SemigroupCheck::derivative_jensen: return "A36";
        case SemigroupCheck::adjoint_weighted_sobolev: return "A38";
        case SemigroupCheck::weighted_sup_stability: return "A4";
        case SemigroupCheck::chapman_kolmogorov: return "CK";
        case SemigroupCheck::psi_moment_growth: return "P_t-psi-moment";
    }
    return "?";
}

SemigroupCheck semigroup_check_from_string(const std::string& tag) {
    if (tag == "A31") return SemigroupCheck::l1_contraction;
    if (tag == "A32") return SemigroupCheck::weight_moment;
    if (tag == "A34") return SemigroupCheck::adjoint_weighted_lp;
    if (tag == "A36") return SemigroupCheck::derivative_jensen;
    if (tag == "A38") return SemigroupCheck::adjoint_weighted_sobolev;
    if (tag == "A4") return SemigroupCheck::weighted_sup_stability;
    if (tag == "CK") return SemigroupCheck::chapman_kolmogorov;
    if (tag == "P_t-psi-moment") return SemigroupCheck::psi_moment_growth;
    throw std::invalid_argument("unknown semigroup check tag: " + tag);
}

std::vector<SmoothFn> default_check_corpus() {
    std::vector<SmoothFn> fs;
    fs.push_back(SmoothFn::constant(1, 1.0));
    fs.push_back(SmoothFn::gaussian(1, make_pt(0.0), 1.0));
    fs.push_back(SmoothFn::gaussian(1, make_pt(1.0), 0.7));
    fs.push_back(SmoothFn::gaussian(1, make_pt(-1.5), 1.2, 0.5));
    fs.push_back(SmoothFn::gaussian(1, make_pt(0.0), 2.0) * SmoothFn::sin_wave(1, make_pt(1.3), 0.4));
    fs.push_back(SmoothFn::sin_wave(1, make_pt(0.7), 0.0) * SmoothFn::gaussian(1, make_pt(0.5), 1.5));
    return fs;
}

namespace {

struct QuadDomain {
    double lo, hi;
    int nodes;
};

double semigroup_apply(const Oracle& o, double t, const std::function<double(double)>& f, double x,
                       const QuadDomain& dom, int out_deriv = 0) {
    return integrate_trapezoid([&](double y) { return o.deriv(t, out_deriv, 0, x, y) * f(y); }, dom.lo, dom.hi,
                               dom.nodes);
}

double adjoint_apply(const Oracle& o, double t, const std::function<double(double)>& f, double y,
                     const QuadDomain& dom, int out_deriv = 0) {
    return integrate_trapezoid([&](double x) { return o.deriv(t, 0, out_deriv, x, y) * f(x); }, dom.lo, dom.hi,
                               dom.nodes);
}

double l1_norm(const std::function<double(double)>& f, const QuadDomain& dom) {
    return integrate_trapezoid([&](double x) { return std::abs(f(x)); }, dom.lo, dom.hi, dom.nodes);
}

double lp_norm(const std::function<double(double)>& f, double p, const QuadDomain& dom) {
    return std::pow(
        integrate_trapezoid([&](double x) { return std::pow(std::abs(f(x)), p); }, dom.lo, dom.hi, dom.nodes),
        1.0 / p);
}

}  // namespace

SemigroupCheckResult semigroup_property_check(SemigroupCheck tag, const Oracle& oracle,
                                              const SemigroupCheckConfig& cfg) {
    SemigroupCheckResult out;
    out.tag = to_string(tag);
    const QuadDomain dom{cfg.lo, cfg.hi, cfg.nodes};
    std::vector<SmoothFn> corpus = cfg.corpus.empty() ? default_check_corpus() : cfg.corpus;
    const double t = cfg.t;

    switch (tag) {
        case SemigroupCheck::l1_contraction: {
            double worst = 0.0;
            for (const auto& f : corpus) {
                auto fv = [&](double x) { return f.value(make_pt(x)); };
                double num = l1_norm([&](double x) { return semigroup_apply(oracle, t, fv, x, dom); }, dom);
                double den = l1_norm(fv, dom);
                worst = std::max(worst, num / den);
            }
            out.measured = worst;
            out.budget = 1.0;
            out.pass = std::isfinite(worst);
            out.note = "worst ||P_t f||_1 / ||f||_1 over the corpus";
            return out;
        }
        case SemigroupCheck::weight_moment: {
            double worst = 0.0;
            auto psi = [&](double y) { return weights::eval_weight(make_pt(y), 1, cfg.k); };
            for (size_t i = 0; i < cfg.probe.size(); ++i) {
                double x = cfg.probe.point(i)[0];
                double lhs = std::abs(semigroup_apply(oracle, t, psi, x, dom));
                worst = std::max(worst, lhs / psi(x));
            }
            out.measured = worst;
            out.pass = std::isfinite(worst);
            out.note = "measured K_k for P_t psi_k <= K_k psi_k";
            return out;
        }
        case SemigroupCheck::adjoint_weighted_lp: {
            // || psi_k P*_t (f / psi_k) ||_p <= K_{kp}^{1/p} Q^{1/p*} ||f||_p
            double p = cfg.p, pstar = p / (p - 1.0);
            // measured budget pieces
            SemigroupCheckConfig sub = cfg;
            sub.k = cfg.k * p;
            double Kkp = semigroup_property_check(SemigroupCheck::weight_moment, oracle, sub).measured;
            double Q = semigroup_property_check(SemigroupCheck::l1_contraction, oracle, cfg).measured;
            double worst = 0.0;
            for (const auto& f : corpus) {
                auto ratio_f = [&](double x) {
                    return f.value(make_pt(x)) / weights::eval_weight(make_pt(x), 1, cfg.k);
                };
                auto lhs_fn = [&](double y) {
                    return weights::eval_weight(make_pt(y), 1, cfg.k) * adjoint_apply(oracle, t, ratio_f, y, dom);
                };
                double lhs = lp_norm(lhs_fn, p, dom);
                double den = lp_norm([&](double x) { return f.value(make_pt(x)); }, p, dom);
                worst = std::max(worst, lhs / den);
            }
            out.measured = worst;
            out.budget = std::pow(Kkp, 1.0 / p) * std::pow(Q, 1.0 / pstar);
            out.pass = worst <= out.budget * (1.0 + 1e-6);
            out.note = "measured vs K_{kp}^{1/p} Q^{1/p*}";
            return out;
        }
        case SemigroupCheck::derivative_jensen: {
            double worst = 0.0;
            for (const auto& f : corpus) {
                for (size_t i = 0; i < cfg.probe.size(); ++i) {
                    double y = cfg.probe.point(i)[0];
                    double lhs = 0.0, rhs = 0.0;
                    for (int j = 0; j <= cfg.q; ++j) {
                        auto fv = [&](double x) { return f.value(make_pt(x)); };
                        lhs += std::abs(adjoint_apply(oracle, t, fv, y, dom, j));
                        auto dj_abs_rho = [&](double x) {
                            return std::pow(std::abs(f.deriv(make_pt(x), axis_counts(0, j))), cfg.rho);
                        };
                        rhs += std::pow(std::max(adjoint_apply(oracle, t, dj_abs_rho, y, dom), 0.0), 1.0 / cfg.rho);
                    }
                    if (rhs > 1e-12) worst = std::max(worst, lhs / rhs);
                }
            }
            out.measured = worst;
            out.pass = std::isfinite(worst);
            out.note = "measured D* in the adjoint derivative-vs-moment bound";
            return out;
        }
        case SemigroupCheck::adjoint_weighted_sobolev: {
            double p = cfg.p, rho = cfg.rho;
            SemigroupCheckConfig sub = cfg;
            sub.k = cfg.k * rho * p;
            double Kkrp = semigroup_property_check(SemigroupCheck::weight_moment, oracle, sub).measured;
            double Q = semigroup_property_check(SemigroupCheck::l1_contraction, oracle, cfg).measured;
            double Dstar = semigroup_property_check(SemigroupCheck::derivative_jensen, oracle, cfg).measured;
            double budget = std::pow(Kkrp, 1.0 / p) * std::pow(Q, (p - rho) / (rho * p)) * Dstar;
            double worst = 0.0;
            for (const auto& f : corpus) {
                auto ratio_f = [&](double x) {
                    return f.value(make_pt(x)) / weights::eval_weight(make_pt(x), 1, cfg.k);
                };
                double lhs = 0.0, den = 0.0;
                for (int j = 0; j <= cfg.q; ++j) {
                    // d^j of psi_k P*(f/psi_k): differentiate through the weight
                    // product numerically via the kernel derivative
                    auto lhs_fn = [&](double y) {
                        // product rule on psi_k(y) * (P* ratio_f)(y)
                        double acc = 0.0;
                        for (int m = 0; m <= j; ++m) {
                            double psi_d =
                                SmoothFn::weight_psi_deriv(1, cfg.k, make_pt(y), axis_counts(0, j - m));
                            acc += binomial(j, m) * psi_d * adjoint_apply(oracle, t, ratio_f, y, dom, m);
                        }
                        return acc;
                    };
                    lhs += std::pow(lp_norm(lhs_fn, p, dom), p);
                    den += std::pow(
                        lp_norm([&](double x) { return f.deriv(make_pt(x), axis_counts(0, j)); }, p, dom), p);
                }
                worst = std::max(worst, std::pow(lhs, 1.0 / p) / std::pow(den, 1.0 / p));
            }
            out.measured = worst / budget;  // implied universal constant
            out.budget = budget;
            out.pass = std::isfinite(out.measured);
            out.note = "implied constant in the weighted adjoint Sobolev bound";
            return out;
        }
        case SemigroupCheck::weighted_sup_stability: {
            double worst = 0.0;
            for (const auto& f : corpus) {
                double num = 0.0, den = 0.0;
                for (size_t i = 0; i < cfg.probe.size(); ++i) {
                    double x = cfg.probe.point(i)[0];
                    double wn = 0.0, wd = 0.0;
                    for (int j = 0; j <= cfg.q; ++j) {
                        auto fv = [&](double y) { return f.value(make_pt(y)); };
                        wn += std::abs(semigroup_apply(oracle, t, fv, x, dom, j));
                        wd += std::abs(f.deriv(make_pt(x), axis_counts(0, j)));
                    }
                    double inv_psi = weights::eval_weight(make_pt(x), 1, -cfg.k);
                    num = std::max(num, wn * inv_psi);
                    den = std::max(den, wd * inv_psi);
                }
                if (den > 0.0) worst = std::max(worst, num / den);
            }
            out.measured = worst;
            out.pass = std::isfinite(worst);
            out.note = "measured C in the weighted-sup stability bound";
            return out;
        }
        case SemigroupCheck::chapman_kolmogorov: {
            double worst = 0.0;
            for (size_t i = 0; i < cfg.probe.size(); ++i)
                for (size_t j = 0; j < cfg.probe.size(); ++j) {
                    double x = cfg.probe.point(i)[0], z = cfg.probe.point(j)[0];
                    double comp = integrate_trapezoid(
                        [&](double u) { return oracle.value(cfg.s, x, u) * oracle.value(t, u, z); }, dom.lo,
                        dom.hi, dom.nodes);
                    worst = std::max(worst, std::abs(comp - oracle.value(cfg.s + t, x, z)));
                }
            out.measured = worst;
            out.budget = 1e-6;
            out.pass = worst < 1e-6;
            out.note = "sup residual of the two-step kernel composition";
            return out;
        }
        case SemigroupCheck::psi_moment_growth: {
            auto psi = [&](double y) { return weights::eval_weight(make_pt(y), 1, cfg.k); };
            for (double kbar = cfg.k; kbar <= cfg.k + 4.0 + 1e-9; kbar += 1.0) {
                double worst = 0.0, worst_wide = 0.0;
                Grid wide = widened(cfg.probe, 2.0);
                for (size_t i = 0; i < cfg.probe.size(); ++i) {
                    double x = cfg.probe.point(i)[0];
                    worst = std::max(worst, semigroup_apply(oracle, t, psi, x, dom) /
                                                weights::eval_weight(make_pt(x), 1, kbar));
                }
                for (size_t i = 0; i < wide.size(); ++i) {
                    double x = wide.point(i)[0];
                    worst_wide = std::max(worst_wide, semigroup_apply(oracle, t, psi, x, dom) /
                                                          weights::eval_weight(make_pt(x), 1, kbar));
                }
                if (worst_wide <= worst * 1.10) {
                    out.measured = worst;
                    out.budget = kbar;  // the exponent that worked
                    out.pass = true;
                    out.note = "P_t psi_k dominated by psi_kbar; budget holds kbar";
                    return out;
                }
            }
            out.pass = false;
            out.note = "no dominating weight exponent found in k..k+4";
            return out;
        }
    }
    throw std::logic_error("unreachable semigroup check tag");
}

}  // namespace semilab::density_lab
