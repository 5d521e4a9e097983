#include "doctest.h"

#include "semilab/interpolation.hpp"
#include "semilab/jump_models.hpp"

using namespace semilab;
using namespace semilab::interp;

namespace {

InterpolationBudget pow2_budget(int k, int q, int h, double p, int D, int levels) {
    InterpolationBudget b;
    b.k = k;
    b.q = q;
    b.h = h;
    b.p = p;
    b.ambient_dim = D;
    for (int n = 0; n < levels; ++n) b.theta.push_back(std::pow(2.0, n));
    b.theta_growth = 2.0;
    b.theta_tail_ratio = 2.0;
    return b;
}

}  // namespace

TEST_CASE("interpolation series functional") {
    SUBCASE("all-zero sequences give zero") {
        auto r = pi_functional(std::vector<double>(6, 0.0), std::vector<double>(6, 0.0), 0, 0, 1, 2.0, 1);
        CHECK(r.total() == doctest::Approx(0.0));
    }

    SUBCASE("single distance term with unit exponent") {
        // k + q + D/p* = 1 via k=q=0, D=1, p* = 1 -> p large; use p = 1e9
        std::vector<double> dk(1, 1.0), norms(1, 0.0);
        auto r = pi_functional(dk, norms, 0, 0, 1, 1e9, 1);
        CHECK(r.distance_series.partial == doctest::Approx(1.0).epsilon(1e-6));
    }

    SUBCASE("geometric distance sequence sums to 4/3") {
        std::vector<double> dk(40), norms(40, 0.0);
        for (int n = 0; n < 40; ++n) dk[static_cast<size_t>(n)] = std::pow(8.0, -n);
        auto r = pi_functional(dk, norms, 0, 0, 1, 1e9, 1);
        CHECK(r.distance_series.partial == doctest::Approx(4.0 / 3.0).epsilon(1e-9));
    }

    SUBCASE("certified geometric tails extend truncated sums") {
        std::vector<double> dk(10), norms(10, 1.0);
        for (int n = 0; n < 10; ++n) dk[static_cast<size_t>(n)] = std::pow(8.0, -n);
        TailModel tail{1.0 / 8.0, 1.0};
        auto full = pi_functional(std::vector<double>(40, 0.0), std::vector<double>(40, 1.0), 0, 0, 1, 1e9, 1);
        auto trunc = pi_functional(dk, norms, 0, 0, 1, 1e9, 1, tail);
        // truncated partial + tail bound covers the longer sum
        CHECK(trunc.norm_series.total() >= full.norm_series.partial - 1e-12);
        double exact_dist = 4.0 / 3.0;
        CHECK(trunc.distance_series.partial <= exact_dist);
        CHECK(trunc.distance_series.total() >= exact_dist - 1e-9);
    }

    SUBCASE("divergent configured tail is an error") {
        std::vector<double> dk(4, 1.0), norms(4, 0.0);
        TailModel tail{1.0, 0.0};  // 2^c * 1 >= 1
        CHECK_THROWS_AS(pi_functional(dk, norms, 0, 0, 1, 2.0, 1, tail), numeric_error);
    }

    SUBCASE("monotone in every entry") {
        std::vector<double> dk{0.5, 0.1, 0.02}, norms{1.0, 2.0, 4.0};
        auto base = pi_functional(dk, norms, 1, 1, 2, 2.0, 2);
        for (size_t i = 0; i < dk.size(); ++i) {
            auto d2 = dk;
            d2[i] += 0.01;
            CHECK(pi_functional(d2, norms, 1, 1, 2, 2.0, 2).total() > base.total());
            auto n2 = norms;
            n2[i] += 0.01;
            CHECK(pi_functional(dk, n2, 1, 1, 2, 2.0, 2).total() > base.total());
        }
    }
}

TEST_CASE("level schedule on the dyadic sequence") {
    InterpolationBudget b = pow2_budget(0, 0, 1, 2.0, 1, 24);
    auto sched = reg_schedule(b, 4, 1.0);
    CHECK(sched.chain_ok);
    CHECK(sched.tail_ok);
    // 2^{2h l} / l^2 at h=1: l=2 -> 4 -> n=2; l=3 -> 64/9 = 7.11 -> n=3
    REQUIRE(sched.n_of_l.size() >= 3);
    CHECK(sched.n_of_l[1] == 2);
    CHECK(sched.n_of_l[2] == 3);
    CHECK(sched.l_delta == 1);  // 2^{1/2} >= 1 at l = 1
    // n(l*) >= n*
    CHECK(sched.n_of_l[static_cast<size_t>(sched.l_star - 1)] >= 4);

    SUBCASE("exhausted theta sequence is reported") {
        InterpolationBudget tiny = pow2_budget(0, 0, 3, 2.0, 1, 4);
        CHECK_THROWS_AS(reg_schedule(tiny, 3, 1.0), numeric_error);
    }
}

TEST_CASE("smoothness series closed form") {
    // base exponent 0, eps = 1: sum l^2 / 4^l = 20/27
    auto s = smoothness_series(0.0, 1.0);
    CHECK(s.partial == doctest::Approx(20.0 / 27.0).epsilon(1e-10));
    CHECK(s.tail_bound < 1e-12);

    // Richardson-style cross-check: partial sums converge within the
    // declared remainder
    double direct = 0.0;
    for (int l = 1; l <= 2000; ++l) direct += double(l) * double(l) * std::pow(4.0, -l);
    CHECK(std::abs(s.total() - direct) <= s.tail_bound + 1e-13);
}

TEST_CASE("regularity bound assembly") {
    SUBCASE("vanishing distances reduce the bound to its mass term") {
        InterpolationBudget b = pow2_budget(0, 0, 1, 1e9, 1, 24);
        DkBounds dk;
        dk.values.assign(24, 0.0);
        dk.tail_ratio = 0.0;
        auto rb = reg_bound(b, 1.0, dk, 4, 1.0, 1.0);
        CHECK(rb.finite);
        CHECK(rb.C_hn == doctest::Approx(0.0));
        // A(delta=1) with |mu| = 1, l(delta) = 1, unit exponent: 2^2 = 4
        CHECK(rb.A == doctest::Approx(4.0).epsilon(1e-6));
        double expect = b.theta_growth + rb.A * std::pow(b.theta[4], b.rho_h() * 2.0);
        CHECK(rb.total == doctest::Approx(expect).epsilon(1e-12));
    }

    SUBCASE("bound blows up exactly when the distance tail outruns theta") {
        InterpolationBudget b = pow2_budget(0, 0, 1, 2.0, 2, 20);
        DkBounds good;
        good.values.resize(20);
        for (int n = 0; n < 20; ++n) good.values[static_cast<size_t>(n)] = std::pow(2.0, -3.0 * n);
        good.tail_ratio = std::pow(2.0, -3.0);
        CHECK(reg_bound(b, 1.0, good, 2, 1.0, 0.1).finite);

        DkBounds bad;
        bad.values.assign(20, 0.5);
        bad.tail_ratio = 1.0;
        CHECK_FALSE(reg_bound(b, 1.0, bad, 2, 1.0, 0.1).finite);
    }
}

TEST_CASE("iteration depth") {
    CHECK(compute_m0(2, 1, 2.0, 1.0) == 4);
    CHECK(compute_m0(0, 1, 2.0, 1e9) == 1);
    CHECK(compute_m0(0, 2, 1.0, 2.0) == 3);
    CHECK_THROWS_AS(compute_m0(1, 1, 2.0, 0.0), std::invalid_argument);
}

TEST_CASE("exponent improvement arithmetic") {
    auto lr = improve_exponent(ImproveMode::lemma_reg, 0.5, 1, 1, 2.0, 0.1);
    CHECK(lr.exponent == doctest::Approx(0.8));

    auto cor = improve_exponent(ImproveMode::corollary, 0.5, 0, 1, 2.0, 0.1);
    CHECK(cor.theta1_prime == doctest::Approx(2.1));
    CHECK(cor.exponent == doctest::Approx(0.5 * 2.1));

    // heat-kernel sanity: measured slope 1/2 at q=0 is below the lemma
    // budget with p* -> 1, delta = 0.1
    auto budget = improve_exponent(ImproveMode::lemma_reg, 0.5, 0, 1, 1.0, 0.1);
    CHECK(budget.exponent == doctest::Approx(0.55));
    CHECK(0.5 <= budget.exponent);
}

TEST_CASE("end-to-end: bound finiteness tracks the balance verdict") {
    // four ladders: two balanced, two not
    struct LadderSpec {
        std::string name;
        jumps::Ladder ladder;
        bool expect_balanced;
    };
    std::vector<LadderSpec> specs;

    specs.push_back({"stable15", jumps::build_ladder(jumps::stable1d(1.5), 0, 10,
                                                     [](int n) { return std::pow(2.0, -n); }),
                     true});

    jumps::Ladder tuned;
    tuned.name = "tuned";
    for (int n = 0; n <= 10; ++n) {
        double lambda = std::pow(2.0, -n);
        tuned.levels.push_back({n, std::pow(2.0, -n), std::pow(lambda, 0.5 * (3.0 + 2.0)), lambda, 1.0});
    }
    jumps::finalize_ladder(tuned);
    specs.push_back({"tuned", tuned, true});

    jumps::Ladder flat;
    flat.name = "flat_rate";
    for (int n = 0; n <= 10; ++n) flat.levels.push_back({n, std::pow(2.0, -n), 1.0, std::pow(2.0, -n), 1.0});
    jumps::finalize_ladder(flat);
    specs.push_back({"flat_rate", flat, false});

    jumps::Ladder weak;
    weak.name = "weak_rate";
    for (int n = 0; n <= 10; ++n) {
        double lambda = std::pow(2.0, -n);
        weak.levels.push_back({n, std::pow(2.0, -n), std::pow(lambda, 0.5 * (3.0 + 0.4)), lambda, 1.0});
    }
    jumps::finalize_ladder(weak);
    specs.push_back({"weak_rate", weak, false});

    const double delta_star = 1.0, theta0 = 0.5, a = 3.0, b = 0.0, t = 0.5;
    const int q = 1, d = 1, h = 32;
    const double p = 2.0, p_star = 2.0, theta1 = 1.0;
    const int m0 = compute_m0(q, d, p_star, delta_star);
    REQUIRE(m0 == 3);

    for (auto& spec : specs) {
        auto rep = jumps::balance_report(spec.ladder, delta_star);
        CHECK((rep.verdict == "bounded") == spec.expect_balanced);

        // theta(n) and d_k(n) sequences in the shapes produced by the
        // iterated-defect analysis at fixed t
        const double xi1 = q + 2.0 * h + d + 2.0 * theta1 + m0 * (a + b);
        const double omega1 = q + 2.0 * h + d + 2.0 * theta1;
        InterpolationBudget budget;
        budget.k = static_cast<int>((a + b)) * m0;
        budget.q = q;
        budget.h = h;
        budget.p = p;
        budget.ambient_dim = 2 * d;
        std::vector<double> dk_vals;
        double theta_raw0 = 0.0;
        for (size_t i = 0; i < spec.ladder.levels.size(); ++i) {
            const auto& lev = spec.ladder.levels[i];
            double phi0 = lev.rate * lev.propagation * std::pow(lev.ellipticity, -theta0 * (a + b));
            double theta_raw = std::pow(t, -theta0 * xi1) * std::pow(lev.ellipticity, -theta0 * omega1) *
                               std::pow(phi0, m0);
            if (i == 0) theta_raw0 = theta_raw;
            budget.theta.push_back(std::max(1.0, theta_raw / theta_raw0));
            double phi_star = lev.rate * lev.propagation * std::pow(lev.ellipticity, -theta0 * (a + b + delta_star));
            dk_vals.push_back(std::pow(std::pow(lev.ellipticity, theta0 * (a + b + delta_star)) * phi_star, m0));
        }
        budget.theta_growth = 1.0;
        for (size_t i = 1; i < budget.theta.size(); ++i)
            budget.theta_growth = std::max(budget.theta_growth, budget.theta[i] / budget.theta[i - 1]);
        budget.theta_tail_ratio = budget.theta.back() / budget.theta[budget.theta.size() - 2];

        DkBounds dk;
        dk.values = dk_vals;
        dk.tail_ratio = dk_vals.back() / dk_vals[dk_vals.size() - 2];

        // epsilon must shrink as the theta sequence steepens: half the
        // lambda-exponent slack left once the schedule terms are paid
        double rho_h = budget.rho_h();
        double omega2 = delta_star * m0 - (q + 2.0 * d / p_star) - rho_h * (q + d + 2.0 * theta1);
        REQUIRE(omega2 > 0.0);
        double omega1_full = q + 2.0 * h + d + 2.0 * theta1;
        double eps = 0.5 * omega2 / omega1_full;
        auto rb = reg_bound(budget, 1.0, dk, 2, delta_star, eps);
        CHECK(rb.finite == spec.expect_balanced);
    }
}
