#include "doctest.h"

#include "semilab/density.hpp"
#include "semilab/density_lab.hpp"
#include "semilab/quadrature.hpp"

using namespace semilab;
using namespace semilab::density;
using namespace semilab::density_lab;

TEST_CASE("heat kernel closed form and derivatives") {
    Oracle heat = Oracle::heat(1.0);
    double t = 0.4, x = 0.3, y = -0.2;
    double expect = std::exp(-(x - y) * (x - y) / (2.0 * t)) / std::sqrt(2.0 * M_PI * t);
    CHECK(heat.value(t, x, y) == doctest::Approx(expect).epsilon(1e-14));

    CHECK(heat.deriv(t, 0, 1, x, x) == doctest::Approx(0.0));  // symmetry at y = x
    double d2 = heat.deriv(1.0, 0, 2, 0.0, 0.0);
    CHECK(d2 == doctest::Approx(-1.0 / std::sqrt(2.0 * M_PI)).epsilon(1e-12));
    // mixed derivative consistency: d_x d_y p = -d_y^2 p for convolution kernels
    CHECK(heat.deriv(t, 1, 1, x, y) == doctest::Approx(-heat.deriv(t, 0, 2, x, y)).epsilon(1e-12));

    // FD cross-check of the y-derivative
    double h = 1e-5;
    double fd = (heat.value(t, x, y + h) - heat.value(t, x, y - h)) / (2.0 * h);
    CHECK(heat.deriv(t, 0, 1, x, y) == doctest::Approx(fd).epsilon(1e-7));
}

TEST_CASE("OU kernel matches its Gaussian transition law") {
    double theta = 0.8, sigma2 = 1.3;
    Oracle ou = Oracle::ou(theta, sigma2);
    double t = 0.6, x = 1.1;
    double e = std::exp(-theta * t);
    double v = sigma2 * (1.0 - e * e) / (2.0 * theta);
    double mass = integrate_trapezoid([&](double y) { return ou.value(t, x, y); }, -12.0, 12.0, 2401);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
    double mean = integrate_trapezoid([&](double y) { return y * ou.value(t, x, y); }, -12.0, 12.0, 2401);
    CHECK(mean == doctest::Approx(e * x).epsilon(1e-9));
    double var = integrate_trapezoid(
        [&](double y) { return (y - mean) * (y - mean) * ou.value(t, x, y); }, -12.0, 12.0, 2401);
    CHECK(var == doctest::Approx(v).epsilon(1e-8));

    // x-derivative via the chain factor -e^{-theta t}
    double h = 1e-5;
    double fd = (ou.value(t, x + h, 0.5) - ou.value(t, x - h, 0.5)) / (2.0 * h);
    CHECK(ou.deriv(t, 1, 0, x, 0.5) == doctest::Approx(fd).epsilon(1e-7));
}

TEST_CASE("stable oracle by Fourier inversion") {
    Oracle st = Oracle::stable(1.5);

    SUBCASE("unit mass and symmetry") {
        double mass = integrate_trapezoid([&](double y) { return st.value(1.0, 0.0, y); }, -60.0, 60.0, 6001);
        CHECK(mass == doctest::Approx(1.0).epsilon(2e-3));  // heavy tails truncated at 60
        CHECK(st.value(1.0, 0.0, 0.7) == doctest::Approx(st.value(1.0, 0.0, -0.7)).epsilon(1e-12));
    }

    SUBCASE("peak value against the Gamma-function formula") {
        // (1/pi) Gamma(1 + 1/alpha) at t = 1
        double expect = std::tgamma(1.0 + 1.0 / 1.5) / M_PI;
        CHECK(st.value(1.0, 0.0, 0.0) == doctest::Approx(expect).epsilon(1e-9));
    }

    SUBCASE("self-similarity across time") {
        double t = 0.2, u = 0.8;
        double scale = std::pow(t, -1.0 / 1.5);
        CHECK(st.value(t, u, 0.0) == doctest::Approx(scale * st.value(1.0, scale * u, 0.0)).epsilon(1e-8));
    }

    SUBCASE("declared aliasing bound is small") {
        CHECK(st.aliasing_bound(0.05) < 1e-8);
    }
}

TEST_CASE("gaussian mixture density") {
    GaussianMixture mix;
    mix.components.push_back({0.4, -1.0, 0.8});
    mix.components.push_back({0.6, 1.5, 1.2});
    KernelDensity kd = KernelDensity::from_mixture(mix);
    Grid g = Grid::symmetric_1d(12.0, 2401);
    CHECK(kd.mass(g) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(kd.value(make_pt(0.0)) > 0.0);
}

TEST_CASE("kernel density estimation") {
    CounterRng rng(2024);

    SUBCASE("needs at least 100 samples") {
        auto tiny = std::make_shared<SampleCloud>();
        tiny->dim = 1;
        tiny->points = {0.0, 1.0, 2.0};
        CHECK_THROWS_AS(kde_estimate(tiny), std::invalid_argument);
    }

    SUBCASE("degenerate cloud trips the point-mass warning") {
        auto flat = std::make_shared<SampleCloud>();
        flat->dim = 1;
        flat->points.assign(500, 1.75);
        KernelDensity kd = kde_estimate(flat);
        CHECK(kd.point_mass_warning());
        // bump is centered at the common point
        CHECK(kd.value(make_pt(1.75)) > kd.value(make_pt(1.8)));
    }

    SUBCASE("standard normal cloud: mass and L1 accuracy") {
        auto cloud = std::make_shared<SampleCloud>();
        cloud->dim = 1;
        const size_t n = 100000;
        cloud->points.resize(n);
        for (size_t i = 0; i < n; ++i) cloud->points[i] = rng.gaussian(i, 0, 0, 0);
        KernelDensity kd = kde_estimate(cloud);

        Grid g = Grid::symmetric_1d(8.0, 1601);
        CHECK(kd.mass(g) == doctest::Approx(1.0).epsilon(1e-3));

        auto normal = [](double y) { return std::exp(-0.5 * y * y) / std::sqrt(2.0 * M_PI); };
        CHECK(l1_distance(kd, normal, g) < 0.02);

        // derivative queries need a wider bandwidth than Silverman's density
        // choice to beat the sampling noise
        KernelDensity kd_wide = kde_estimate(cloud, 0.3);
        CHECK(std::abs(kd_wide.deriv(make_pt(0.0), axis_counts(0, 1))) < 0.05);
        CHECK(kd_wide.deriv(make_pt(0.0), axis_counts(0, 2)) < 0.0);
        CHECK_THROWS_AS(kd.deriv(make_pt(0.0), axis_counts(0, 3)), std::invalid_argument);
    }

    SUBCASE("KDE L1 error shrinks with the sample count at the expected rate") {
        auto normal = [](double y) { return std::exp(-0.5 * y * y) / std::sqrt(2.0 * M_PI); };
        Grid g = Grid::symmetric_1d(8.0, 801);
        std::vector<double> ns{2000, 8000, 32000, 128000}, errs;
        for (double nd : ns) {
            size_t n = static_cast<size_t>(nd);
            auto cloud = std::make_shared<SampleCloud>();
            cloud->dim = 1;
            cloud->points.resize(n);
            for (size_t i = 0; i < n; ++i) cloud->points[i] = rng.gaussian(i, 0, 7, 0);
            errs.push_back(l1_distance(kde_estimate(cloud), normal, g));
        }
        auto fit = fit_loglog(ns, errs);
        CHECK(fit.slope == doctest::Approx(-0.4).epsilon(0.2));  // N^{-2/5} within 20%
    }
}
