#include "semilab/composition.hpp"

#include "semilab/parallel.hpp"
#include "semilab/quadrature.hpp"
#include "semilab/weights.hpp"

#include <algorithm>

namespace semilab::comp {

using density::Oracle;

double KernelChain::total_time() const {
    double t = 0.0;
    for (const auto& l : links) t += l.duration;
    return t;
}

int KernelChain::pigeonhole_index() const {
    double t = total_time();
    for (size_t i = 0; i < links.size(); ++i)
        if (links[i].duration >= t / double(links.size()) - 1e-15) return static_cast<int>(i);
    return 0;
}

void KernelChain::validate() const {
    if (links.empty() || links.size() > 3)
        throw std::invalid_argument("KernelChain: 1..3 links supported");
    if (ops.size() + 1 != links.size())
        throw std::invalid_argument("KernelChain: need one operator between consecutive links");
    for (const auto& l : links)
        if (!(l.duration > 0.0)) throw std::invalid_argument("KernelChain: durations must be positive");
}

namespace {

// (U s(., y))(u): the operator hits the left kernel argument.
double apply_op_to_kernel(const ChainOperator& op, const Oracle& kernel, double duration, double u, double y,
                          int dy) {
    if (op.is_shift) return kernel.deriv(duration, 0, dy, u + op.shift_by, y);
    double acc = 0.0;
    if (op.c0.valid()) acc += op.c0.value(make_pt(u)) * kernel.deriv(duration, 0, dy, u, y);
    if (op.c1.valid()) acc += op.c1.value(make_pt(u)) * kernel.deriv(duration, 1, dy, u, y);
    if (op.c2.valid()) acc += op.c2.value(make_pt(u)) * kernel.deriv(duration, 2, dy, u, y);
    return acc;
}

Eigen::MatrixXd chain_matrix(const KernelChain& chain, const std::vector<double>& xs,
                             const std::vector<double>& ys, const std::vector<double>& us, double uw, int dx,
                             int dy) {
    const size_t m = chain.links.size();
    if (m == 1) {
        Eigen::MatrixXd out(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(ys.size()));
        parallel_for(xs.size(), [&](size_t i) {
            for (size_t j = 0; j < ys.size(); ++j)
                out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    chain.links[0].kernel.deriv(chain.links[0].duration, dx, dy, xs[i], ys[j]);
        });
        return out;
    }

    const size_t nu = us.size();
    // first factor: d_x^dx s_1(x, u) with the u-quadrature weight folded in
    Eigen::MatrixXd acc(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(nu));
    parallel_for(xs.size(), [&](size_t i) {
        for (size_t j = 0; j < nu; ++j) {
            double w = uw * ((j == 0 || j + 1 == nu) ? 0.5 : 1.0);
            acc(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                chain.links[0].kernel.deriv(chain.links[0].duration, dx, 0, xs[i], us[j]) * w;
        }
    });

    for (size_t l = 1; l + 1 < m; ++l) {
        Eigen::MatrixXd mid(static_cast<Eigen::Index>(nu), static_cast<Eigen::Index>(nu));
        parallel_for(nu, [&](size_t j) {
            for (size_t k = 0; k < nu; ++k) {
                double w = uw * ((k == 0 || k + 1 == nu) ? 0.5 : 1.0);
                mid(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) =
                    apply_op_to_kernel(chain.ops[l - 1], chain.links[l].kernel, chain.links[l].duration, us[j],
                                       us[k], 0) *
                    w;
            }
        });
        acc = acc * mid;
    }

    Eigen::MatrixXd last(static_cast<Eigen::Index>(nu), static_cast<Eigen::Index>(ys.size()));
    parallel_for(nu, [&](size_t j) {
        for (size_t k = 0; k < ys.size(); ++k)
            last(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) =
                apply_op_to_kernel(chain.ops[m - 2], chain.links[m - 1].kernel, chain.links[m - 1].duration,
                                   us[j], ys[k], dy);
    });
    return acc * last;
}

std::vector<double> trapezoid_nodes(double radius, int n, double& spacing) {
    std::vector<double> us(static_cast<size_t>(n));
    spacing = 2.0 * radius / (n - 1);
    for (int i = 0; i < n; ++i) us[static_cast<size_t>(i)] = -radius + spacing * i;
    return us;
}

}  // namespace

ComposedKernel compose_kernels(const KernelChain& chain, const Grid& xg, const Grid& yg,
                               const ChainQuadrature& quad, int dx, int dy) {
    chain.validate();
    if (xg.dim() != 1 || yg.dim() != 1) throw std::invalid_argument("compose_kernels: 1D grids expected");
    ComposedKernel out;
    out.xs = xg.axis_points(0);
    out.ys = yg.axis_points(0);
    double uw = 0.0;
    auto us = trapezoid_nodes(quad.radius, quad.nodes, uw);
    out.values = chain_matrix(chain, out.xs, out.ys, us, uw, dx, dy);
    if (chain.links.size() > 1) {
        double uw2 = 0.0;
        auto us2 = trapezoid_nodes(quad.radius, (quad.nodes - 1) / 2 + 1, uw2);
        Eigen::MatrixXd coarse = chain_matrix(chain, out.xs, out.ys, us2, uw2, dx, dy);
        out.quad_error = (out.values - coarse).cwiseAbs().maxCoeff();
    }
    return out;
}

ComposedBoundProbe composed_bound_probe(const BoundProbeRequest& req) {
    ComposedBoundProbe out;
    out.ts = req.ts;
    auto ys = req.yg.axis_points(0);
    auto xs = req.xg.axis_points(0);

    int m = 0;
    for (double t : req.ts) {
        KernelChain chain = req.make_chain(t);
        chain.validate();
        m = static_cast<int>(chain.links.size());
        double best = 0.0;
        for (int beta = 0; beta <= req.q2; ++beta) {
            // y-derivative stack of the composed kernel up to order q1
            std::vector<Eigen::MatrixXd> dmats;
            for (int j = 0; j <= req.q1; ++j)
                dmats.push_back(compose_kernels(chain, req.xg, req.yg, req.quad, beta, j).values);
            for (size_t i = 0; i < xs.size(); ++i) {
                // || |psi_kappa p~(x,.)|_{q1} ||_p over y
                double norm_acc = 0.0, sup_acc = 0.0;
                for (size_t k = 0; k < ys.size(); ++k) {
                    double semi = 0.0;
                    for (int j = 0; j <= req.q1; ++j) {
                        double term = 0.0;  // d^j(psi_kappa * g) by Leibniz
                        for (int a2 = 0; a2 <= j; ++a2) {
                            double psi_d = SmoothFn::weight_psi_deriv(1, req.kappa, make_pt(ys[k]),
                                                                      axis_counts(0, j - a2));
                            term += binomial(j, a2) * psi_d *
                                    dmats[static_cast<size_t>(a2)](static_cast<Eigen::Index>(i),
                                                                   static_cast<Eigen::Index>(k));
                        }
                        semi += std::abs(term);
                    }
                    if (req.p == weights::kInf) {
                        sup_acc = std::max(sup_acc, semi);
                    } else {
                        double w = req.yg.spacing(0) * ((k == 0 || k + 1 == ys.size()) ? 0.5 : 1.0);
                        norm_acc += w * std::pow(semi, req.p);
                    }
                }
                double norm = req.p == weights::kInf ? sup_acc : std::pow(norm_acc, 1.0 / req.p);
                best = std::max(best, norm / weights::eval_weight(make_pt(xs[i]), 1, req.chi));
            }
        }
        if (!(best > 0.0)) throw numeric_error("composed_bound_probe: nonpositive weighted sup");
        out.weighted_norm_sup.push_back(best);
    }
    out.fit = fit_loglog(out.ts, out.weighted_norm_sup);
    out.budget_exponent = req.theta0 * (req.q1 + req.q2 + 1.0 + 2.0 * req.theta1) +
                          double(m - 1) * req.theta0 * (req.a + req.b);
    out.within_budget = std::abs(out.fit.slope) <= out.budget_exponent + 1e-9;
    return out;
}

SemigroupPair commuting_pair(double sigma2, double sigma2n) {
    if (!(sigma2 > 0.0) || !(sigma2n > 0.0))
        throw std::invalid_argument("commuting_pair: variances must be positive");
    SemigroupPair pair{Oracle::heat(sigma2), Oracle::heat(sigma2n),
                       ChainOperator::second_order(sigma2 - sigma2n), sigma2 - sigma2n};
    return pair;
}

SemigroupPair ou_pair(double theta, double sigma2) {
    SemigroupPair pair{Oracle::heat(sigma2), Oracle::ou(theta, sigma2),
                       ChainOperator::first_order(SmoothFn::polynomial_1d({0.0, theta})), theta};
    return pair;
}

std::vector<double> LindebergExpansion::apply_series(const SmoothFn& f) const {
    std::vector<double> out(xs.size(), 0.0);
    for (size_t i = 0; i < xs.size(); ++i) {
        double acc = 0.0;
        for (size_t k = 0; k < ys.size(); ++k)
            acc += y_weights[k] * series_kernel(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) *
                   f.value(make_pt(ys[k]));
        out[i] = acc;
    }
    return out;
}

std::vector<double> LindebergExpansion::apply_term(int m, const SmoothFn& f) const {
    const Eigen::MatrixXd& ker =
        m == 0 ? substitute_kernel : term_kernels.at(static_cast<size_t>(m - 1));
    std::vector<double> out(xs.size(), 0.0);
    for (size_t i = 0; i < xs.size(); ++i) {
        double acc = 0.0;
        for (size_t k = 0; k < ys.size(); ++k)
            acc += y_weights[k] * ker(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) *
                   f.value(make_pt(ys[k]));
        out[i] = acc;
    }
    return out;
}

LindebergExpansion lindeberg_terms(const SemigroupPair& pair, double t, int m0, const Grid& xg, const Grid& yg,
                                   const ChainQuadrature& quad, int gl_time_order) {
    if (m0 < 1 || m0 > 3) throw std::invalid_argument("lindeberg_terms: depth 1..3 supported");
    LindebergExpansion exp;
    exp.t = t;
    exp.depth = m0;
    exp.xs = xg.axis_points(0);
    exp.ys = yg.axis_points(0);
    exp.y_weights.resize(exp.ys.size());
    for (size_t k = 0; k < exp.ys.size(); ++k)
        exp.y_weights[k] = yg.spacing(0) * ((k == 0 || k + 1 == exp.ys.size()) ? 0.5 : 1.0);

    exp.substitute_kernel = pair.approx.deriv_matrix(t, 0, 0, exp.xs, exp.ys);
    exp.series_kernel = exp.substitute_kernel;

    const QuadRule& rule = gauss_legendre(gl_time_order);

    for (int m = 1; m <= m0 - 1; ++m) {
        // ordered times t > t_1 > ... > t_m > 0 via the Duffy map
        // t_i = t v_1 ... v_i, Jacobian t^m v_1^{m-1} ... v_{m-1}
        size_t node_count = 1;
        for (int i = 0; i < m; ++i) node_count *= rule.nodes.size();
        std::vector<Eigen::MatrixXd> slots(node_count);
        parallel_for(node_count, [&](size_t flat) {
            std::vector<double> v(static_cast<size_t>(m));
            std::vector<double> w(static_cast<size_t>(m));
            size_t rest = flat;
            for (int i = 0; i < m; ++i) {
                size_t idx = rest % rule.nodes.size();
                rest /= rule.nodes.size();
                v[static_cast<size_t>(i)] = 0.5 * (rule.nodes[idx] + 1.0);
                w[static_cast<size_t>(i)] = 0.5 * rule.weights[idx];
            }
            double jac = std::pow(t, m);
            double weight = 1.0;
            std::vector<double> times(static_cast<size_t>(m));
            double prod = t;
            for (int i = 0; i < m; ++i) {
                prod *= v[static_cast<size_t>(i)];
                times[static_cast<size_t>(i)] = prod;
                weight *= w[static_cast<size_t>(i)];
                if (i < m - 1) jac *= std::pow(v[static_cast<size_t>(i)], m - 1 - i);
            }
            KernelChain chain;
            double prev = t;
            for (int i = 0; i < m; ++i) {
                chain.links.push_back({pair.approx, prev - times[static_cast<size_t>(i)]});
                chain.ops.push_back(pair.defect);
                prev = times[static_cast<size_t>(i)];
            }
            chain.links.push_back({pair.approx, prev});
            double uw = 0.0;
            std::vector<double> us(static_cast<size_t>(quad.nodes));
            uw = 2.0 * quad.radius / (quad.nodes - 1);
            for (int i = 0; i < quad.nodes; ++i) us[static_cast<size_t>(i)] = -quad.radius + uw * i;
            slots[flat] = chain_matrix(chain, exp.xs, exp.ys, us, uw, 0, 0) * (weight * jac);
        }, 1);  // sequential over time nodes; the matrix fills parallelize inside
        Eigen::MatrixXd term = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(exp.xs.size()),
                                                     static_cast<Eigen::Index>(exp.ys.size()));
        for (const auto& s : slots) term += s;
        exp.term_kernels.push_back(term);
        exp.series_kernel += term;
    }
    return exp;
}

RemainderEstimate remainder_estimate(const SemigroupPair& pair, const LindebergExpansion& expansion,
                                     const std::vector<SmoothFn>& corpus) {
    RemainderEstimate out;
    for (const auto& f : corpus) {
        auto series = expansion.apply_series(f);
        double sup = 0.0;
        for (size_t i = 0; i < expansion.xs.size(); ++i) {
            double exact = 0.0;
            for (size_t k = 0; k < expansion.ys.size(); ++k)
                exact += expansion.y_weights[k] *
                         pair.limit.value(expansion.t, expansion.xs[i], expansion.ys[k]) *
                         f.value(make_pt(expansion.ys[k]));
            sup = std::max(sup, std::abs(exact - series[i]));
        }
        out.per_function_sup.push_back(sup);
        out.worst = std::max(out.worst, sup);
    }
    return out;
}

RemainderOrderFit remainder_order(const std::function<SemigroupPair(double)>& make_pair,
                                  const std::vector<double>& couplings, double t, int m0, const Grid& xg,
                                  const Grid& yg, const ChainQuadrature& quad,
                                  const std::vector<SmoothFn>& corpus) {
    RemainderOrderFit out;
    out.couplings = couplings;
    for (double c : couplings) {
        SemigroupPair pair = make_pair(c);
        auto expansion = lindeberg_terms(pair, t, m0, xg, yg, quad);
        out.sups.push_back(remainder_estimate(pair, expansion, corpus).worst);
    }
    out.fit = fit_loglog(out.couplings, out.sups);
    return out;
}

}  // namespace semilab::comp
