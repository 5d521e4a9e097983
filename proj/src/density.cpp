#include "semilab/density.hpp"

#include "semilab/parallel.hpp"
#include "semilab/quadrature.hpp"
#include "semilab/smooth_fn.hpp"
#include "semilab/stats.hpp"

#include <algorithm>
#include <mutex>

namespace semilab::density {

namespace {

double gauss_norm(double v) { return 1.0 / std::sqrt(2.0 * M_PI * v); }

// d^k/du^k of the normalized Gaussian with variance v.
double gauss_deriv(double u, double v, int k) {
    return gauss_norm(v) * SmoothFn::gaussian_1d_deriv(u, v, k);
}

}  // namespace

// ---- stable Fourier table ----------------------------------------------

struct Oracle::StableTable {
    static constexpr int kModes = 1 << 16;
    double alpha = 1.5;

    std::mutex mu;
    // per time t: xi nodes are implicit (uniform); store exp(-t xi^alpha) weights
    std::map<double, std::vector<double>> damping;
    std::map<double, double> xi_max;

    double cutoff(double t, int k) const {
        // choose Xi with t Xi^alpha - k ln Xi >= 42
        double xi = std::pow(45.0 / t, 1.0 / alpha);
        for (int it = 0; it < 4; ++it)
            xi = std::pow((42.0 + k * std::log(std::max(xi, 2.0))) / t, 1.0 / alpha);
        return xi;
    }

    const std::vector<double>& table_for(double t, double& xi_hi) {
        std::lock_guard<std::mutex> lock(mu);
        auto it = damping.find(t);
        if (it != damping.end()) {
            xi_hi = xi_max[t];
            return it->second;
        }
        double hi = cutoff(t, 6);
        std::vector<double> w(static_cast<size_t>(kModes) + 1);
        double h = hi / kModes;
        for (int m = 0; m <= kModes; ++m) {
            double xi = m * h;
            double wt = std::exp(-t * std::pow(xi, alpha));
            if (m == 0 || m == kModes) wt *= 0.5;
            w[static_cast<size_t>(m)] = wt;
        }
        xi_max[t] = hi;
        xi_hi = hi;
        return damping.emplace(t, std::move(w)).first->second;
    }
};

double Oracle::stable_deriv(double t, int k, double u) const {
    double xi_hi = 0.0;
    const std::vector<double>& w = stable_cache_->table_for(t, xi_hi);
    const int n = StableTable::kModes;
    const double h = xi_hi / n;
    const double phase = k * M_PI / 2.0;
    double acc = 0.0;
    for (int m = 0; m <= n; ++m) {
        double xi = m * h;
        double xik = (k == 0) ? 1.0 : std::pow(xi, k);
        acc += w[static_cast<size_t>(m)] * xik * std::cos(u * xi + phase);
    }
    return acc * h / M_PI;
}

// ---- Oracle ---------------------------------------------------------------

Oracle Oracle::heat(double sigma2) {
    if (!(sigma2 > 0.0)) throw std::invalid_argument("Oracle::heat: sigma2 must be positive");
    Oracle o;
    o.kind_ = Kind::heat;
    o.p1_ = sigma2;
    return o;
}

Oracle Oracle::ou(double theta, double sigma2) {
    if (!(sigma2 > 0.0) || !(theta > 0.0)) throw std::invalid_argument("Oracle::ou: need positive parameters");
    Oracle o;
    o.kind_ = Kind::ou;
    o.p1_ = sigma2;
    o.p2_ = theta;
    return o;
}

Oracle Oracle::stable(double alpha) {
    if (!(alpha > 0.0 && alpha < 2.0)) throw std::invalid_argument("Oracle::stable: alpha must lie in (0,2)");
    Oracle o;
    o.kind_ = Kind::stable;
    o.p1_ = alpha;
    o.stable_cache_ = std::make_shared<StableTable>();
    o.stable_cache_->alpha = alpha;
    return o;
}

double Oracle::deriv(double t, int qx, int qy, double x, double y) const {
    if (!(t > 0.0)) throw std::invalid_argument("Oracle::deriv: t must be positive");
    switch (kind_) {
        case Kind::heat: {
            // p = g(y - x; sigma2 t); d/dx = -d/du, d/dy = +d/du
            double v = p1_ * t;
            double sign = (qx % 2 == 0) ? 1.0 : -1.0;
            return sign * gauss_deriv(y - x, v, qx + qy);
        }
        case Kind::ou: {
            double e = std::exp(-p2_ * t);
            double v = p1_ * (1.0 - e * e) / (2.0 * p2_);
            double u = y - e * x;
            double sign = (qx % 2 == 0) ? 1.0 : -1.0;
            return sign * std::pow(e, qx) * gauss_deriv(u, v, qx + qy);
        }
        case Kind::stable: {
            double sign = (qy % 2 == 0) ? 1.0 : -1.0;
            return sign * stable_deriv(t, qx + qy, x - y);
        }
    }
    return 0.0;
}

Eigen::MatrixXd Oracle::deriv_matrix(double t, int qx, int qy, const std::vector<double>& xs,
                                     const std::vector<double>& ys) const {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(xs.size()), static_cast<Eigen::Index>(ys.size()));
    if (kind_ == Kind::stable && xs.size() > 1 && ys.size() > 1) {
        double hx = xs[1] - xs[0];
        double hy = ys[1] - ys[0];
        bool uniform = true;
        for (size_t i = 1; i + 1 < xs.size() && uniform; ++i)
            uniform = std::abs(xs[i + 1] - xs[i] - hx) < 1e-12;
        for (size_t j = 1; j + 1 < ys.size() && uniform; ++j)
            uniform = std::abs(ys[j + 1] - ys[j] - hy) < 1e-12;
        if (uniform && std::abs(hx - hy) < 1e-12) {
            // all differences x_i - y_j lie on one uniform grid of size nx+ny-1
            int nx = static_cast<int>(xs.size()), ny = static_cast<int>(ys.size());
            std::vector<double> vals(static_cast<size_t>(nx + ny - 1));
            double sign = (qy % 2 == 0) ? 1.0 : -1.0;
            parallel_for(vals.size(), [&](size_t s) {
                int i_minus_j = static_cast<int>(s) - (ny - 1);
                double u = xs[0] - ys[0] + hx * i_minus_j;
                vals[s] = sign * stable_deriv(t, qx + qy, u);
            });
            for (int i = 0; i < nx; ++i)
                for (int j = 0; j < ny; ++j) out(i, j) = vals[static_cast<size_t>(i - j + ny - 1)];
            return out;
        }
    }
    parallel_for(xs.size(), [&](size_t i) {
        for (size_t j = 0; j < ys.size(); ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = deriv(t, qx, qy, xs[i], ys[j]);
    });
    return out;
}

double Oracle::aliasing_bound(double t) const {
    if (kind_ != Kind::stable) return 0.0;
    // images sit at |u| ~ 2 pi / h; bound them by the stable tail c t |u|^{-1-alpha}
    double xi_hi = stable_cache_->cutoff(t, 6);
    double h = xi_hi / StableTable::kModes;
    double u_img = 2.0 * M_PI / h;
    double alpha = p1_;
    double c = std::tgamma(1.0 + alpha) * std::sin(M_PI * alpha / 2.0) / M_PI;
    return c * t * std::pow(u_img, -1.0 - alpha);
}

double Oracle::apply(double t, const std::function<double(double)>& f, double x, double lo, double hi,
                     int nodes) const {
    return integrate_trapezoid([&](double y) { return value(t, x, y) * f(y); }, lo, hi, nodes);
}

double Oracle::apply_adjoint(double t, const std::function<double(double)>& f, double y, double lo, double hi,
                             int nodes) const {
    return integrate_trapezoid([&](double x) { return value(t, x, y) * f(x); }, lo, hi, nodes);
}

double Oracle::sample_step(double t, double x, double gauss) const {
    switch (kind_) {
        case Kind::heat: return x + std::sqrt(p1_ * t) * gauss;
        case Kind::ou: {
            double e = std::exp(-p2_ * t);
            double v = p1_ * (1.0 - e * e) / (2.0 * p2_);
            return e * x + std::sqrt(v) * gauss;
        }
        case Kind::stable: throw std::invalid_argument("Oracle::sample_step: stable sampling not supported");
    }
    return x;
}

// ---- mixture ----------------------------------------------------------------

double GaussianMixture::value(double y) const { return deriv(y, 0); }

double GaussianMixture::deriv(double y, int q) const {
    double acc = 0.0;
    for (const auto& c : components) acc += c.weight * gauss_deriv(y - c.mean, c.sdev * c.sdev, q);
    return acc;
}

double GaussianMixture::mass() const {
    double acc = 0.0;
    for (const auto& c : components) acc += c.weight;
    return acc;
}

// ---- KDE ---------------------------------------------------------------------

Kde::Kde(std::shared_ptr<const SampleCloud> cloud, double bandwidth) : cloud_(std::move(cloud)) {
    const int d = cloud_->dim;
    const size_t n = cloud_->size();
    if (n < 1) throw std::invalid_argument("Kde: empty cloud");
    h_.assign(static_cast<size_t>(d), bandwidth);
    if (bandwidth > 0.0) return;
    for (int a = 0; a < d; ++a) {
        std::vector<double> col(n);
        for (size_t i = 0; i < n; ++i) col[i] = cloud_->coord(i, a);
        double sd = n >= 2 ? std::sqrt(sample_variance(col)) : 0.0;
        std::sort(col.begin(), col.end());
        double iqr = col[static_cast<size_t>(0.75 * double(n - 1))] - col[static_cast<size_t>(0.25 * double(n - 1))];
        double spread = std::min(sd, iqr / 1.34);
        if (spread <= 0.0) spread = std::max(sd, iqr / 1.34);
        if (spread <= 0.0) {
            point_mass_ = true;
            spread = 1e-3 * (1.0 + std::abs(col[n / 2]));
        }
        double expo = (d == 1) ? -0.2 : -1.0 / (double(d) + 4.0);
        double factor = (d == 1) ? 0.9 : std::pow(4.0 / (double(d) + 2.0), 1.0 / (double(d) + 4.0));
        h_[static_cast<size_t>(a)] = factor * spread * std::pow(double(n), expo);
    }
}

double Kde::value(const Pt& y) const { return deriv(y, zero_counts()); }

double Kde::deriv(const Pt& y, const Counts& c) const {
    if (total_order(c) > 2) throw std::invalid_argument("Kde: derivatives supported up to total order 2");
    const int d = cloud_->dim;
    const size_t n = cloud_->size();
    double norm = 1.0 / double(n);
    for (int a = 0; a < d; ++a) norm /= h_[static_cast<size_t>(a)];
    double acc = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double term = 1.0;
        for (int a = 0; a < d; ++a) {
            double u = (y[a] - cloud_->coord(i, a)) / h_[static_cast<size_t>(a)];
            double g = gauss_norm(1.0) * SmoothFn::gaussian_1d_deriv(u, 1.0, c[a]);
            term *= g / std::pow(h_[static_cast<size_t>(a)], c[a]);
        }
        acc += term;
    }
    return acc * norm;
}

// ---- KernelDensity -------------------------------------------------------------

KernelDensity KernelDensity::oracle_slice(Oracle oracle, double t, double x) {
    KernelDensity k;
    k.backend_ = Backend::oracle;
    k.oracle_ = std::move(oracle);
    k.t_ = t;
    k.x_ = x;
    return k;
}

KernelDensity KernelDensity::from_kde(Kde kde) {
    KernelDensity k;
    k.backend_ = Backend::kde;
    k.kde_ = std::move(kde);
    return k;
}

KernelDensity KernelDensity::from_mixture(GaussianMixture mix) {
    KernelDensity k;
    k.backend_ = Backend::mixture;
    k.mix_ = std::move(mix);
    return k;
}

int KernelDensity::dim() const {
    if (backend_ == Backend::kde) return kde_->dim();
    return 1;
}

double KernelDensity::value(const Pt& y) const { return deriv(y, zero_counts()); }

double KernelDensity::deriv(const Pt& y, const Counts& c) const {
    switch (backend_) {
        case Backend::oracle: {
            if (c[1] != 0 || c[2] != 0) throw std::invalid_argument("oracle slice is 1D");
            return oracle_->deriv(t_, 0, c[0], x_, y[0]);
        }
        case Backend::kde: return kde_->deriv(y, c);
        case Backend::mixture: {
            if (c[1] != 0 || c[2] != 0) throw std::invalid_argument("mixture is 1D");
            return mix_.deriv(y[0], c[0]);
        }
    }
    return 0.0;
}

double KernelDensity::mass(const Grid& grid) const {
    std::vector<double> contrib(grid.size());
    parallel_for(grid.size(), [&](size_t i) {
        contrib[i] = grid.quad_weight(grid.unflatten(i)) * value(grid.point(i));
    });
    return pairwise_sum(contrib);
}

KernelDensity kde_estimate(std::shared_ptr<const SampleCloud> cloud, double bandwidth) {
    if (!cloud || cloud->size() < 100) throw std::invalid_argument("kde_estimate: need at least 100 samples");
    return KernelDensity::from_kde(Kde(std::move(cloud), bandwidth));
}

double l1_distance(const KernelDensity& a, const std::function<double(double)>& ref, const Grid& grid) {
    if (grid.dim() != 1) throw std::invalid_argument("l1_distance: 1D grids only");
    std::vector<double> contrib(grid.size());
    parallel_for(grid.size(), [&](size_t i) {
        Pt y = grid.point(i);
        contrib[i] = grid.quad_weight(grid.unflatten(i)) * std::abs(a.value(y) - ref(y[0]));
    });
    return pairwise_sum(contrib);
}

}  // namespace semilab::density
