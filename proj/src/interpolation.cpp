#include "semilab/interpolation.hpp"

#include <algorithm>
#include <cmath>

namespace semilab::interp {

void InterpolationBudget::validate() const {
    if (h < 1) throw std::invalid_argument("InterpolationBudget: h >= 1 required");
    if (!(p > 1.0)) throw std::invalid_argument("InterpolationBudget: p > 1 required");
    if (theta.size() < 2) throw std::invalid_argument("InterpolationBudget: need a theta sequence");
    for (size_t i = 0; i < theta.size(); ++i) {
        if (!(theta[i] >= 1.0)) throw std::invalid_argument("InterpolationBudget: theta(n) >= 1 required");
        if (i > 0) {
            if (theta[i] < theta[i - 1] * (1.0 - 1e-12))
                throw std::invalid_argument("InterpolationBudget: theta must be non-decreasing");
            if (theta[i] > theta_growth * theta[i - 1] * (1.0 + 1e-12))
                throw std::invalid_argument("InterpolationBudget: theta growth exceeds the recorded Theta");
        }
    }
}

PiFunctionalResult pi_functional(const std::vector<double>& dk_seq, const std::vector<double>& norm_seq, int k,
                                 int q, int h, double p, int ambient_dim, const std::optional<TailModel>& tail) {
    if (dk_seq.size() != norm_seq.size())
        throw std::invalid_argument("pi_functional: sequences must have equal length");
    if (!(p > 1.0)) throw std::invalid_argument("pi_functional: p > 1 required");
    double p_star = p / (p - 1.0);
    double c = k + q + double(ambient_dim) / p_star;

    PiFunctionalResult out;
    double dist_term = 0.0, norm_term = 0.0;
    for (size_t n = 0; n < dk_seq.size(); ++n) {
        dist_term = std::pow(2.0, double(n) * c) * dk_seq[n];
        norm_term = std::pow(2.0, -2.0 * double(n) * h) * norm_seq[n];
        out.distance_series.partial += dist_term;
        out.norm_series.partial += norm_term;
    }
    if (tail) {
        double g1 = std::pow(2.0, c) * tail->dk_ratio;
        double g2 = std::pow(2.0, -2.0 * h) * tail->norm_ratio;
        if (g1 >= 1.0 && dist_term > 0.0)
            throw numeric_error("pi_functional: configured distance tail diverges");
        if (g2 >= 1.0 && norm_term > 0.0)
            throw numeric_error("pi_functional: configured norm tail diverges");
        if (dist_term > 0.0) out.distance_series.tail_bound = dist_term * g1 / (1.0 - g1);
        if (norm_term > 0.0) out.norm_series.tail_bound = norm_term * g2 / (1.0 - g2);
    }
    return out;
}

namespace {

double dyadic_threshold(int h, int l) { return std::pow(2.0, 2.0 * h * double(l)) / (double(l) * double(l)); }

}  // namespace

RegSchedule reg_schedule(const InterpolationBudget& budget, int n_star, double delta, int l_max) {
    budget.validate();
    if (n_star < 0 || static_cast<size_t>(n_star) >= budget.theta.size())
        throw std::invalid_argument("reg_schedule: n_star outside the theta range");
    if (!(delta > 0.0)) throw std::invalid_argument("reg_schedule: delta > 0 required");

    RegSchedule sched;

    // l(delta) = min{l >= 1 : 2^{l delta/(1+delta)} >= l}
    sched.l_delta = -1;
    for (int l = 1; l <= 1024; ++l)
        if (std::pow(2.0, double(l) * delta / (1.0 + delta)) >= double(l)) {
            sched.l_delta = l;
            break;
        }
    if (sched.l_delta < 0) throw numeric_error("reg_schedule: no l(delta) found");

    // n(l) tables while the theta sequence can resolve them
    double theta_top = budget.theta.back();
    sched.l_star = -1;
    for (int l = 1; l <= l_max; ++l) {
        double thr = dyadic_threshold(budget.h, l);
        if (thr > theta_top) break;
        int n_l = -1;
        for (size_t n = 0; n < budget.theta.size(); ++n)
            if (budget.theta[n] >= thr) {
                n_l = static_cast<int>(n);
                break;
            }
        sched.n_of_l.push_back(n_l);
        // chain inequality at this l
        bool ok = budget.theta[static_cast<size_t>(n_l)] >= thr;
        if (n_l > 0) ok = ok && budget.theta[static_cast<size_t>(n_l - 1)] < thr;
        sched.chain_ok = sched.chain_ok && ok;
        if (sched.l_star < 0 && thr >= budget.theta[static_cast<size_t>(n_star)]) sched.l_star = l;
    }
    if (sched.l_star < 0)
        throw numeric_error("reg_schedule: theta sequence exhausted before resolving l*");
    // consequence of the construction: the subsequence starts at or above n*
    if (sched.n_of_l[static_cast<size_t>(sched.l_star - 1)] < n_star) sched.chain_ok = false;

    double eps_delta = budget.h * delta / (1.0 + delta);
    double lhs = std::pow(2.0, 2.0 * (budget.h - eps_delta) * sched.l_star);
    double rhs = std::pow(2.0, 2.0 * budget.h * sched.l_delta) * budget.theta[static_cast<size_t>(n_star)];
    sched.tail_ok = lhs <= rhs * (1.0 + 1e-12);
    return sched;
}

SeriesValue smoothness_series(double exponent_base, double epsilon) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("smoothness_series: epsilon > 0 required");
    SeriesValue out;
    double expo = 2.0 * (exponent_base + epsilon);
    const int l_cap = 10000;
    double term = 0.0;
    int last_l = 0;
    for (int l = 1; l <= l_cap; ++l) {
        term = std::pow(double(l), expo) * std::pow(2.0, -2.0 * epsilon * double(l));
        out.partial += term;
        last_l = l;
        if (term < 1e-15 * out.partial && l > 4) break;
    }
    double ratio = std::pow(double(last_l + 1) / double(last_l), expo) * std::pow(2.0, -2.0 * epsilon);
    if (ratio < 1.0) out.tail_bound = term * ratio / (1.0 - ratio);
    else out.tail_bound = std::numeric_limits<double>::infinity();
    return out;
}

RegBound reg_bound(const InterpolationBudget& budget, double mu_mass, const DkBounds& dk, int n_star,
                   double delta, double epsilon) {
    budget.validate();
    if (dk.values.size() != budget.theta.size())
        throw std::invalid_argument("reg_bound: dk bounds must align with the theta sequence");
    RegBound out;
    out.schedule = reg_schedule(budget, n_star, delta);

    double c = budget.k + budget.q + double(budget.ambient_dim) / budget.p_star();
    out.A = mu_mass * std::pow(2.0, double(out.schedule.l_delta) * (1.0 + delta) * c);

    SeriesValue b = smoothness_series(c, epsilon);
    out.B = b.total();
    out.B_remainder = b.tail_bound;

    double expo = budget.rho_h() + epsilon;
    out.C_hn = 0.0;
    for (size_t n = static_cast<size_t>(n_star); n < dk.values.size(); ++n)
        out.C_hn = std::max(out.C_hn, dk.values[n] * std::pow(budget.theta[n], expo));
    out.C_finite = std::isfinite(out.C_hn);
    if (dk.tail_ratio && budget.theta_tail_ratio) {
        double g = *dk.tail_ratio * std::pow(*budget.theta_tail_ratio, expo);
        if (g >= 1.0 && dk.values.back() > 0.0) out.C_finite = false;
    }

    if (out.C_finite && std::isfinite(out.B)) {
        out.total = budget.theta_growth +
                    out.A * std::pow(budget.theta[static_cast<size_t>(n_star)], budget.rho_h() * (1.0 + delta)) +
                    out.B * out.C_hn;
        out.finite = std::isfinite(out.total);
    }
    return out;
}

int compute_m0(int q, int dim, double p_star, double delta_star) {
    if (!(delta_star > 0.0)) throw std::invalid_argument("compute_m0: delta* > 0 required");
    double ratio = (double(q) + 2.0 * double(dim) / p_star) / delta_star;
    return 1 + static_cast<int>(std::floor(ratio + 1e-12));
}

ImprovedExponent improve_exponent(ImproveMode mode, double theta0, int q, int ambient_dim, double p_star,
                                  double delta_or_eps) {
    if (!(theta0 > 0.0)) throw std::invalid_argument("improve_exponent: theta0 > 0 required");
    ImprovedExponent out;
    if (mode == ImproveMode::lemma_reg) {
        out.theta1_prime = double(ambient_dim) / p_star;
        out.exponent = theta0 * (double(q) + out.theta1_prime + delta_or_eps);
        return out;
    }
    out.theta1_prime = 2.0 * double(ambient_dim) + delta_or_eps;
    out.exponent = theta0 * (double(q) + out.theta1_prime);
    return out;
}

}  // namespace semilab::interp
