#include "doctest.h"

#include "semilab/density_lab.hpp"
#include "semilab/rng.hpp"

using namespace semilab;
using namespace semilab::density;
using namespace semilab::density_lab;

namespace {

jumps::Ladder stable_ladder(double delta_unused = 1.0) {
    (void)delta_unused;
    return jumps::build_ladder(jumps::stable1d(1.5), 0, 8, [](int n) { return std::pow(2.0, -n); });
}

jumps::Ladder trivial_gaussian_ladder() {
    jumps::Ladder lad;
    lad.name = "pure_gaussian";
    for (int n = 0; n < 4; ++n) lad.levels.push_back({n, std::pow(2.0, -n), 0.0, 1.0, 1.0});
    jumps::finalize_ladder(lad);
    return lad;
}

jumps::Ladder unbalanced_ladder() {
    jumps::Ladder lad;
    lad.name = "unbalanced_const_rate";
    for (int n = 0; n < 6; ++n) lad.levels.push_back({n, std::pow(2.0, -n), 1.0, std::pow(2.0, -n), 1.0});
    jumps::finalize_ladder(lad);
    return lad;
}

}  // namespace

TEST_CASE("heat-kernel blow-up exponents") {
    Grid xg = Grid::symmetric_1d(3.0, 241);
    Grid yg = Grid::symmetric_1d(3.0, 1201);
    auto ts = log_spaced(0.02, 1.0, 7);

    for (int q = 0; q <= 2; ++q) {
        BlowupRequest req;
        req.oracle = Oracle::heat(1.0);
        req.ts = ts;
        req.xgrid = xg;
        req.ygrid = yg;
        req.qy = q;
        auto fit = blowup_fit(req);
        CHECK(fit.slope() == doctest::Approx(-(q + 1) / 2.0).epsilon(0.02));
        CHECK(fit.fit.r2 > 0.999);
        // the scaling identity: M(t) t^{(q+1)/2} constant across the grid
        for (size_t i = 0; i < fit.ts.size(); ++i) {
            double c0 = fit.weighted_sup[0] * std::pow(fit.ts[0], (q + 1) / 2.0);
            double ci = fit.weighted_sup[i] * std::pow(fit.ts[i], (q + 1) / 2.0);
            CHECK(ci == doctest::Approx(c0).epsilon(0.02));
        }
    }
}

TEST_CASE("stable-kernel blow-up exponents") {
    // equal spacing on both axes keeps the Fourier oracle on its shared
    // difference grid
    Grid xg = Grid::symmetric_1d(2.0, 321);
    Grid yg = Grid::symmetric_1d(2.0, 321);
    auto ts = log_spaced(0.03, 1.0, 6);
    for (int q = 0; q <= 1; ++q) {
        BlowupRequest req;
        req.oracle = Oracle::stable(1.5);
        req.ts = ts;
        req.xgrid = xg;
        req.ygrid = yg;
        req.qy = q;
        auto fit = blowup_fit(req);
        CHECK(fit.slope() == doctest::Approx(-(q + 1) / 1.5).epsilon(0.03));
    }
}

TEST_CASE("weighted sup picks a stabilizing x-exponent for drifting kernels") {
    BlowupRequest req;
    req.oracle = Oracle::ou(1.0, 1.0);
    req.ts = log_spaced(0.02, 1.0, 6);
    req.xgrid = Grid::symmetric_1d(4.0, 161);
    req.ygrid = Grid::symmetric_1d(4.0, 321);
    req.kappa = 1.0;
    auto fit = blowup_fit(req);
    CHECK(fit.pi_exponent >= 1.0);  // psi_kappa(x-y) grows in x for the OU mean drift
    CHECK(std::isfinite(fit.slope()));
}

TEST_CASE("transfer exponent check across ladders") {
    Grid xg = Grid::symmetric_1d(2.0, 321);
    Grid yg = Grid::symmetric_1d(2.0, 321);
    BlowupRequest req;
    req.oracle = Oracle::stable(1.5);
    req.ts = log_spaced(0.03, 1.0, 6);
    req.xgrid = xg;
    req.ygrid = yg;
    req.qy = 1;
    BoundFit fit = blowup_fit(req);

    double delta = 1.0, theta0 = 0.5, a = 3.0, b = 0.0;

    SUBCASE("balanced stable ladder passes with slack") {
        auto rep = jumps::balance_report(stable_ladder(), delta);
        REQUIRE(rep.verdict == "bounded");
        auto check = transfer_exponent_check(fit, rep, a, b, delta, theta0, 0.1, 1);
        CHECK(check.verdict == "pass");
        CHECK(check.measured == doctest::Approx(4.0 / 3.0).epsilon(0.05));
        CHECK(check.predicted > check.measured);
        CHECK(check.slack > 0.0);
    }

    SUBCASE("pure Gaussian ladder is trivially satisfied") {
        auto rep = jumps::balance_report(trivial_gaussian_ladder(), delta);
        REQUIRE(rep.verdict == "bounded");
        BlowupRequest hq;
        hq.oracle = Oracle::heat(1.0);
        hq.ts = log_spaced(0.02, 1.0, 6);
        hq.xgrid = xg;
        hq.ygrid = yg;
        auto hfit = blowup_fit(hq);
        auto check = transfer_exponent_check(hfit, rep, a, b, delta, theta0, 0.1, 1);
        CHECK(check.verdict == "pass");
    }

    SUBCASE("unbalanced ladder yields no guarantee, not a failure") {
        auto rep = jumps::balance_report(unbalanced_ladder(), delta);
        REQUIRE(rep.verdict == "unbounded");
        auto check = transfer_exponent_check(fit, rep, a, b, delta, theta0, 0.1, 1);
        CHECK(check.verdict == "no guarantee");
    }
}

TEST_CASE("KDE slope agrees with the oracle blow-up for low orders") {
    CounterRng rng(7);
    auto ts = log_spaced(0.03, 1.0, 6);
    Grid yg = Grid::symmetric_1d(4.0, 801);
    for (int q = 0; q <= 1; ++q) {
        std::vector<std::pair<double, KernelDensity>> family;
        for (double t : ts) {
            auto cloud = std::make_shared<SampleCloud>();
            cloud->dim = 1;
            const size_t n = 40000;
            cloud->points.resize(n);
            for (size_t i = 0; i < n; ++i)
                cloud->points[i] = std::sqrt(t) * rng.gaussian(i, static_cast<uint32_t>(t * 1e6), 0, 0);
            family.emplace_back(t, kde_estimate(cloud));
        }
        BoundFit kfit = blowup_fit(family, q, 0.0, yg);
        CHECK(kfit.slope() == doctest::Approx(-(q + 1) / 2.0).epsilon(0.10));
    }
}

TEST_CASE("semigroup property suite on the heat oracle") {
    Oracle heat = Oracle::heat(1.0);
    SemigroupCheckConfig cfg;

    auto a31 = semigroup_property_check(SemigroupCheck::l1_contraction, heat, cfg);
    CHECK(a31.pass);
    CHECK(a31.measured == doctest::Approx(1.0).epsilon(1e-6));

    auto a32 = semigroup_property_check(SemigroupCheck::weight_moment, heat, cfg);
    CHECK(a32.pass);
    CHECK(a32.measured == doctest::Approx(1.0 + cfg.t).epsilon(1e-6));  // second-moment identity
    CHECK(a32.measured <= 2.0);

    auto a34 = semigroup_property_check(SemigroupCheck::adjoint_weighted_lp, heat, cfg);
    CHECK(a34.pass);
    CHECK(a34.measured <= a34.budget * (1.0 + 1e-6));

    auto a36 = semigroup_property_check(SemigroupCheck::derivative_jensen, heat, cfg);
    CHECK(a36.pass);
    CHECK(a36.measured == doctest::Approx(1.0).epsilon(1e-6));

    auto a38 = semigroup_property_check(SemigroupCheck::adjoint_weighted_sobolev, heat, cfg);
    CHECK(a38.pass);
    CHECK(std::isfinite(a38.measured));

    auto a4 = semigroup_property_check(SemigroupCheck::weighted_sup_stability, heat, cfg);
    CHECK(a4.pass);
    CHECK(a4.measured < 5.0);

    auto ck = semigroup_property_check(SemigroupCheck::chapman_kolmogorov, heat, cfg);
    CHECK(ck.pass);
    CHECK(ck.measured < 1e-6);

    auto mom = semigroup_property_check(SemigroupCheck::psi_moment_growth, heat, cfg);
    CHECK(mom.pass);
}

TEST_CASE("semigroup property suite on the OU oracle") {
    Oracle ou = Oracle::ou(0.5, 1.0);
    SemigroupCheckConfig cfg;

    auto a31 = semigroup_property_check(SemigroupCheck::l1_contraction, ou, cfg);
    CHECK(a31.pass);
    // mass spreads under the adjoint volume factor e^{theta t}
    CHECK(a31.measured == doctest::Approx(std::exp(0.5 * cfg.t)).epsilon(1e-4));

    auto a32 = semigroup_property_check(SemigroupCheck::weight_moment, ou, cfg);
    CHECK(a32.pass);
    CHECK(std::isfinite(a32.measured));

    auto a36 = semigroup_property_check(SemigroupCheck::derivative_jensen, ou, cfg);
    CHECK(a36.pass);
    CHECK(std::isfinite(a36.measured));

    auto ck = semigroup_property_check(SemigroupCheck::chapman_kolmogorov, ou, cfg);
    CHECK(ck.pass);
    CHECK(ck.measured < 1e-6);
}

TEST_CASE("check tags round-trip through their wire names") {
    for (auto tag : {SemigroupCheck::l1_contraction, SemigroupCheck::weight_moment,
                     SemigroupCheck::adjoint_weighted_lp, SemigroupCheck::derivative_jensen,
                     SemigroupCheck::adjoint_weighted_sobolev, SemigroupCheck::weighted_sup_stability,
                     SemigroupCheck::chapman_kolmogorov, SemigroupCheck::psi_moment_growth})
        CHECK(semigroup_check_from_string(to_string(tag)) == tag);
    CHECK_THROWS_AS(semigroup_check_from_string("A99"), std::invalid_argument);
}
