#include "semilab/distance_lab.hpp"

#include "semilab/parallel.hpp"
#include "semilab/stats.hpp"
#include "semilab/weights.hpp"

#include <algorithm>

namespace semilab::dist {

namespace {

// sup_u |d^k/du^k exp(-u^2/2)|, scanned once; these are universal constants
// of the standard Gaussian shape.
double gauss_shape_sup(int k) {
    static const std::vector<double> cache = [] {
        std::vector<double> sups(9, 0.0);
        for (int k = 0; k <= 8; ++k) {
            double best = 0.0;
            for (double u = 0.0; u <= 8.0; u += 1e-4)
                best = std::max(best, std::abs(SmoothFn::gaussian_1d_deriv(u, 1.0, k)));
            sups[static_cast<size_t>(k)] = best * (1.0 + 1e-6);
        }
        return sups;
    }();
    return cache[static_cast<size_t>(k)];
}

// sup_u |d^k/du^k exp(-u^2)| (variance 1/2 shape, used by erf derivatives)
double erf_shape_sup(int k) {
    static const std::vector<double> cache = [] {
        std::vector<double> sups(9, 0.0);
        for (int k = 0; k <= 8; ++k) {
            double best = 0.0;
            for (double u = 0.0; u <= 8.0; u += 1e-4)
                best = std::max(best, std::abs(SmoothFn::gaussian_1d_deriv(u, 0.5, k)));
            sups[static_cast<size_t>(k)] = best * (1.0 + 1e-6);
        }
        return sups;
    }();
    return cache[static_cast<size_t>(k)];
}

double gaussian_member_bound(double s, int k) {
    double bound = 0.0;
    for (int j = 0; j <= k; ++j) bound += gauss_shape_sup(j) / std::pow(s, j);
    return bound;
}

double trig_member_bound(double omega, int k) {
    double bound = 0.0;
    for (int j = 0; j <= k; ++j) bound += std::pow(omega, j);
    return bound;
}

double erf_member_bound(double s, int k) {
    double scale = 1.0 / (s * std::sqrt(2.0));
    double bound = 1.0;  // |erf| < 1
    for (int j = 1; j <= k; ++j)
        bound += std::pow(scale, j) * (2.0 / std::sqrt(M_PI)) * erf_shape_sup(j - 1);
    return bound;
}

}  // namespace

TestFunctionDictionary TestFunctionDictionary::standard(int k) {
    if (k < 0 || k > 6) throw std::invalid_argument("TestFunctionDictionary: k in 0..6");
    TestFunctionDictionary dict;
    dict.k_ = k;

    const std::vector<double> centers{-3.5, -2.5, -1.5, -0.5, 0.5, 1.5, 2.5, 3.5};
    const std::vector<double> scales{0.25, 0.4, 0.6, 0.9, 1.3, 1.8, 2.5, 3.5};
    for (double m : centers)
        for (double s : scales) {
            double bound = gaussian_member_bound(s, k);
            dict.members_.push_back({SmoothFn::gaussian(1, make_pt(m), s, 1.0 / bound), 1.0, "gaussian"});
        }

    const std::vector<double> omegas{0.25, 0.5, 0.75, 1.0, 1.35, 1.8, 2.4, 3.0};
    const std::vector<double> phases{0.0, M_PI / 4.0, M_PI / 2.0, 3.0 * M_PI / 4.0};
    for (double w : omegas)
        for (double ph : phases) {
            double bound = trig_member_bound(w, k);
            dict.members_.push_back({SmoothFn::sin_wave(1, make_pt(w), ph, 1.0 / bound), 1.0, "trig"});
        }

    const std::vector<double> erf_centers{-1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0};
    const std::vector<double> erf_scales{0.25, 0.6};
    for (double m : erf_centers)
        for (double s : erf_scales) {
            double bound = erf_member_bound(s, k);
            dict.members_.push_back({SmoothFn::erf_sigmoid(m, s) * (1.0 / bound), 1.0, "erf"});
        }
    return dict;
}

bool TestFunctionDictionary::verify(const Grid& grid, double margin) const {
    for (const auto& entry : members_) {
        for (size_t i = 0; i < grid.size(); ++i) {
            Pt x = grid.point(i);
            double semi = 0.0;
            for (int j = 0; j <= k_; ++j) semi += std::abs(entry.fn.deriv(x, axis_counts(0, j)));
            if (semi > 1.0 + margin) return false;
        }
    }
    return true;
}

PairingMeasure PairingMeasure::from_cloud(std::shared_ptr<const density::SampleCloud> cloud) {
    if (!cloud || cloud->size() == 0) throw std::invalid_argument("PairingMeasure: empty cloud");
    PairingMeasure m;
    m.cloud_ = std::move(cloud);
    return m;
}

PairingMeasure PairingMeasure::from_density(density::KernelDensity density, Grid quad_grid) {
    PairingMeasure m;
    m.density_ = std::move(density);
    m.grid_ = quad_grid;
    return m;
}

double PairingMeasure::integrate(const SmoothFn& f) const {
    if (cloud_) {
        std::vector<double> vals(cloud_->size());
        parallel_for(cloud_->size(), [&](size_t i) {
            Pt x{};
            for (int a = 0; a < cloud_->dim; ++a) x[a] = cloud_->coord(i, a);
            vals[i] = f.value(x);
        });
        return pairwise_sum(vals) / double(vals.size());
    }
    std::vector<double> vals(grid_.size());
    parallel_for(grid_.size(), [&](size_t i) {
        Pt x = grid_.point(i);
        vals[i] = grid_.quad_weight(grid_.unflatten(i)) * density_->value(x) * f.value(x);
    });
    return pairwise_sum(vals);
}

double dk_lower(const PairingMeasure& mu, const PairingMeasure& nu, const TestFunctionDictionary& dict) {
    if (dict.members().empty()) throw std::invalid_argument("dk_lower: empty dictionary");
    double best = 0.0;
    for (const auto& entry : dict.members())
        best = std::max(best, std::abs(mu.integrate(entry.fn) - nu.integrate(entry.fn)));
    return best;
}

double dk_oracle_tv(const density::KernelDensity& p, const density::KernelDensity& q, const Grid& grid) {
    std::vector<double> vals(grid.size());
    parallel_for(grid.size(), [&](size_t i) {
        Pt x = grid.point(i);
        vals[i] = grid.quad_weight(grid.unflatten(i)) * std::abs(p.value(x) - q.value(x));
    });
    return pairwise_sum(vals);
}

double dk_oracle_tv(const density::KernelDensity& p, const Grid& pgrid, const density::KernelDensity& q,
                    const Grid& qgrid) {
    bool same = pgrid.dim() == qgrid.dim();
    for (int a = 0; same && a < pgrid.dim(); ++a)
        same = pgrid.lo(a) == qgrid.lo(a) && pgrid.hi(a) == qgrid.hi(a) && pgrid.nodes(a) == qgrid.nodes(a);
    if (!same) throw std::invalid_argument("dk_oracle_tv: mismatched grids");
    return dk_oracle_tv(p, q, pgrid);
}

}  // namespace semilab::dist
