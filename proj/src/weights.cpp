#include "semilab/weights.hpp"

#include "semilab/parallel.hpp"
#include "semilab/stats.hpp"

#include <algorithm>

namespace semilab::weights {

namespace {

// Per-axis interior margin needed so FD stencils up to order q stay inside.
std::array<int, kMaxDim> interior_margin(const SampledField& f, int q) {
    std::array<int, kMaxDim> m{0, 0, 0};
    if (f.analytic()) return m;
    for (int a = 0; a < f.grid().dim(); ++a) m[a] = f.fd_margin(std::min(q, 4));
    return m;
}

bool usable_node(const Grid& g, const std::array<int, kMaxDim>& idx, const std::array<int, kMaxDim>& margin) {
    for (int a = 0; a < g.dim(); ++a)
        if (idx[a] < margin[a] || idx[a] >= g.nodes(a) - margin[a]) return false;
    return true;
}

double seminorm_at_node(const SampledField& f, int q, const std::array<int, kMaxDim>& idx) {
    double acc = 0.0;
    for_each_counts_up_to(f.grid().dim(), q, [&](const Counts& c) {
        acc += tuple_multiplicity(c) * std::abs(f.deriv_at_node(idx, c));
    });
    return acc;
}

}  // namespace

double local_seminorm(const SampledField& f, int q, const Pt& x) {
    double acc = 0.0;
    for_each_counts_up_to(f.grid().dim(), q, [&](const Counts& c) {
        acc += tuple_multiplicity(c) * std::abs(f.deriv_at(x, c));
    });
    return acc;
}

double seminorm_sup(const SampledField& f, int q) {
    const Grid& g = f.grid();
    auto margin = interior_margin(f, q);
    std::vector<double> vals(g.size(), 0.0);
    parallel_for(g.size(), [&](size_t i) {
        auto idx = g.unflatten(i);
        if (!usable_node(g, idx, margin)) return;
        vals[i] = seminorm_at_node(f, q, idx);
    });
    return *std::max_element(vals.begin(), vals.end());
}

WeightedNormResult weighted_norm(const SampledField& f, int q, double kappa, double p,
                                 double boundary_tolerance) {
    const Grid& g = f.grid();
    // weighted field psi_kappa * f
    SampledField wf;
    if (f.analytic()) {
        wf = SampledField::from_function(g, SmoothFn::weight_psi(g.dim(), kappa) * f.fn(), f.fd_order());
    } else {
        std::vector<double> vals(g.size());
        for (size_t i = 0; i < g.size(); ++i) vals[i] = eval_weight(g.point(i), g.dim(), kappa) * f.value_at(i);
        wf = SampledField::from_values(g, std::move(vals), f.fd_order());
    }

    auto margin = interior_margin(wf, q);
    std::vector<double> semin(g.size(), 0.0);
    std::vector<char> usable(g.size(), 0);
    parallel_for(g.size(), [&](size_t i) {
        auto idx = g.unflatten(i);
        if (!usable_node(g, idx, margin)) return;
        usable[i] = 1;
        semin[i] = seminorm_at_node(wf, q, idx);
    });

    WeightedNormResult out;
    if (p == kInf) {
        double best = 0.0, boundary_best = 0.0;
        for (size_t i = 0; i < g.size(); ++i) {
            if (!usable[i]) continue;
            best = std::max(best, semin[i]);
            auto idx = g.unflatten(i);
            bool shell = false;
            for (int a = 0; a < g.dim(); ++a)
                if (idx[a] == margin[a] || idx[a] == g.nodes(a) - 1 - margin[a]) shell = true;
            if (shell) boundary_best = std::max(boundary_best, semin[i]);
        }
        out.value = best;
        out.boundary_share = best > 0.0 ? boundary_best / best : 0.0;
        return out;
    }

    std::vector<double> contrib(g.size(), 0.0), boundary(g.size(), 0.0);
    parallel_for(g.size(), [&](size_t i) {
        if (!usable[i]) return;
        auto idx = g.unflatten(i);
        double c = g.quad_weight(idx) * std::pow(semin[i], p);
        contrib[i] = c;
        bool shell = false;
        for (int a = 0; a < g.dim(); ++a)
            if (idx[a] == margin[a] || idx[a] == g.nodes(a) - 1 - margin[a]) shell = true;
        if (shell) boundary[i] = c;
    });
    double total = pairwise_sum(contrib);
    double shell_mass = pairwise_sum(boundary);
    out.value = std::pow(total, 1.0 / p);
    out.boundary_share = total > 0.0 ? shell_mass / total : 0.0;
    if (out.boundary_share > boundary_tolerance)
        throw numeric_error("weighted_norm: boundary shell carries " + std::to_string(out.boundary_share) +
                            " of the integral; enlarge the truncation radius");
    return out;
}

const char* to_string(WeightInequality tag) {
    switch (tag) {
        case WeightInequality::monotonicity: return "NOT3a";
        case WeightInequality::peetre: return "NOT3b";
        case WeightInequality::seminorm_product: return "NOT3c";
        case WeightInequality::composed_growth: return "NOT3d";
        case WeightInequality::norm_equivalence: return "NOT4a";
        case WeightInequality::inverse_weight_deriv: return "n2";
        case WeightInequality::weight_deriv: return "n4";
    }
    return "?";
}

WeightInequality weight_inequality_from_string(const std::string& tag) {
    if (tag == "NOT3a") return WeightInequality::monotonicity;
    if (tag == "NOT3b") return WeightInequality::peetre;
    if (tag == "NOT3c") return WeightInequality::seminorm_product;
    if (tag == "NOT3d") return WeightInequality::composed_growth;
    if (tag == "NOT4a") return WeightInequality::norm_equivalence;
    if (tag == "n2") return WeightInequality::inverse_weight_deriv;
    if (tag == "n4") return WeightInequality::weight_deriv;
    throw std::invalid_argument("unknown weight inequality tag: " + tag);
}

namespace {

struct TwoSided {
    double upper = 0.0;
    double lower = kInf;
};

TwoSided run_check(const WeightCheckRequest& req, const Grid& grid) {
    const int dim = grid.dim();
    TwoSided r;
    switch (req.tag) {
        case WeightInequality::monotonicity: {
            if (req.kappa < req.kappa_prime || req.kappa_prime < 0)
                throw std::invalid_argument("monotonicity requires kappa >= kappa' >= 0");
            for (size_t i = 0; i < grid.size(); ++i) {
                Pt x = grid.point(i);
                double ratio = eval_weight(x, dim, -req.kappa) / eval_weight(x, dim, -req.kappa_prime);
                r.upper = std::max(r.upper, ratio);
            }
            r.lower = 0.0;
            return r;
        }
        case WeightInequality::peetre: {
            size_t n = grid.size();
            std::vector<double> best(n, 0.0);
            parallel_for(n, [&](size_t i) {
                Pt x = grid.point(i);
                double psix = eval_weight(x, dim, req.kappa);
                double b = 0.0;
                for (size_t j = 0; j < n; ++j) {
                    Pt y = grid.point(j);
                    Pt diff{};
                    for (int a = 0; a < dim; ++a) diff[a] = x[a] - y[a];
                    double denom = eval_weight(y, dim, req.kappa) * eval_weight(diff, dim, req.kappa);
                    b = std::max(b, psix / denom);
                }
                best[i] = b;
            });
            r.upper = *std::max_element(best.begin(), best.end());
            r.lower = 0.0;
            return r;
        }
        case WeightInequality::seminorm_product: {
            if (!req.field) throw std::invalid_argument("seminorm_product needs a test field");
            SampledField f = SampledField::from_function(grid, *req.field);
            SampledField wf = SampledField::from_function(
                grid, SmoothFn::weight_psi(dim, req.kappa) * *req.field);
            for (size_t i = 0; i < grid.size(); ++i) {
                auto idx = grid.unflatten(i);
                double lhs = seminorm_at_node(wf, req.q, idx);
                double rhs = eval_weight(grid.point(i), dim, req.kappa) * seminorm_at_node(f, req.q, idx);
                if (rhs < 1e-300) continue;
                double ratio = lhs / rhs;
                r.upper = std::max(r.upper, ratio);
                r.lower = std::min(r.lower, ratio);
            }
            return r;
        }
        case WeightInequality::composed_growth: {
            if (req.map_components.size() != static_cast<size_t>(dim))
                throw std::invalid_argument("composed_growth needs phi with one component per axis");
            // sup over the grid of |grad phi|, entrywise max norm
            double grad_sup = 0.0;
            for (size_t i = 0; i < grid.size(); ++i) {
                Pt x = grid.point(i);
                for (int ci = 0; ci < dim; ++ci)
                    for (int a = 0; a < dim; ++a)
                        grad_sup = std::max(
                            grad_sup, std::abs(req.map_components[static_cast<size_t>(ci)].deriv(x, axis_counts(a))));
            }
            Pt zero{};
            Pt phi0{};
            for (int ci = 0; ci < dim; ++ci) phi0[ci] = req.map_components[static_cast<size_t>(ci)].value(zero);
            double base = eval_weight(phi0, dim, req.kappa) * std::pow(1.0 + grad_sup * grad_sup, req.kappa);
            for (size_t i = 0; i < grid.size(); ++i) {
                Pt x = grid.point(i);
                Pt px{};
                for (int ci = 0; ci < dim; ++ci) px[ci] = req.map_components[static_cast<size_t>(ci)].value(x);
                double ratio = eval_weight(px, dim, req.kappa) / (base * eval_weight(x, dim, req.kappa));
                r.upper = std::max(r.upper, ratio);
            }
            r.lower = 0.0;
            return r;
        }
        case WeightInequality::norm_equivalence: {
            if (!req.field) throw std::invalid_argument("norm_equivalence needs a test field");
            SampledField f = SampledField::from_function(grid, *req.field);
            double lhs = weighted_norm_value(f, req.q, req.kappa, req.p, 1e-3);
            // || psi_kappa |f|_q ||_p
            std::vector<double> semin(grid.size());
            for (size_t i = 0; i < grid.size(); ++i) {
                auto idx = grid.unflatten(i);
                semin[i] = eval_weight(grid.point(i), dim, req.kappa) * seminorm_at_node(f, req.q, idx);
            }
            double rhs;
            if (req.p == kInf) {
                rhs = *std::max_element(semin.begin(), semin.end());
            } else {
                std::vector<double> contrib(grid.size());
                for (size_t i = 0; i < grid.size(); ++i)
                    contrib[i] = grid.quad_weight(grid.unflatten(i)) * std::pow(semin[i], req.p);
                rhs = std::pow(pairwise_sum(contrib), 1.0 / req.p);
            }
            double ratio = lhs / rhs;
            r.upper = ratio;
            r.lower = ratio;
            return r;
        }
        case WeightInequality::inverse_weight_deriv: {
            for (size_t i = 0; i < grid.size(); ++i) {
                Pt x = grid.point(i);
                double lhs = std::abs(SmoothFn::weight_psi_deriv(dim, -req.kappa, x, req.alpha));
                double ratio = lhs * eval_weight(x, dim, req.kappa);
                r.upper = std::max(r.upper, ratio);
            }
            r.lower = 0.0;
            return r;
        }
        case WeightInequality::weight_deriv: {
            for (size_t i = 0; i < grid.size(); ++i) {
                Pt x = grid.point(i);
                double lhs = std::abs(SmoothFn::weight_psi_deriv(dim, req.kappa, x, req.alpha));
                double ratio = lhs / eval_weight(x, dim, req.kappa);
                r.upper = std::max(r.upper, ratio);
            }
            r.lower = 0.0;
            return r;
        }
    }
    throw std::logic_error("unreachable weight inequality tag");
}

}  // namespace

WeightCheckResult verify_weight_inequality(const WeightCheckRequest& req) {
    TwoSided base = run_check(req, req.grid);
    TwoSided fine = run_check(req, req.grid.refined());
    WeightCheckResult out;
    out.tag = to_string(req.tag);
    out.constant = base.upper;
    out.lower_constant = (base.lower == kInf) ? 0.0 : base.lower;
    out.refined_constant = fine.upper;
    out.refined_lower = (fine.lower == kInf) ? 0.0 : fine.lower;
    double drift_up = base.upper > 0.0 ? std::abs(fine.upper - base.upper) / base.upper : 0.0;
    double drift_lo =
        out.lower_constant > 0.0 ? std::abs(out.refined_lower - out.lower_constant) / out.lower_constant : 0.0;
    out.drift = std::max(drift_up, drift_lo);
    out.pass = std::isfinite(fine.upper) && out.drift <= req.stability_tolerance;
    return out;
}

}  // namespace semilab::weights
