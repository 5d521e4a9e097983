#include "doctest.h"

#include "semilab/weights.hpp"
#include "semilab/quadrature.hpp"

#include <cmath>

using namespace semilab;
using namespace semilab::weights;

namespace {

Grid grid1d(double radius = 6.0, int nodes = 601) { return Grid::symmetric_1d(radius, nodes); }

std::vector<SmoothFn> small_corpus() {
    std::vector<SmoothFn> fs;
    fs.push_back(SmoothFn::gaussian(1, make_pt(0.0), 1.0));
    fs.push_back(SmoothFn::gaussian(1, make_pt(1.0), 0.7, 0.8));
    fs.push_back(SmoothFn::gaussian(1, make_pt(-0.5), 1.4) * SmoothFn::sin_wave(1, make_pt(2.0), 0.3));
    fs.push_back(SmoothFn::weight_psi(1, -2.0));
    fs.push_back(SmoothFn::gaussian(1, make_pt(0.0), 2.0) * SmoothFn::polynomial_1d({1.0, 0.5, 0.25}));
    return fs;
}

}  // namespace

TEST_CASE("weight evaluation") {
    CHECK(eval_weight(make_pt(3.7), 1, 0.0) == doctest::Approx(1.0));
    CHECK(eval_weight(make_pt(0.0), 1, 1.0) == doctest::Approx(1.0));
    CHECK(eval_weight(make_pt(1.0, 1.0), 2, 2.0) == doctest::Approx(9.0));
}

TEST_CASE("psi_kappa times psi_minus_kappa is one") {
    Grid g = grid1d();
    for (size_t i = 0; i < g.size(); i += 7) {
        Pt x = g.point(i);
        CHECK(eval_weight(x, 1, 1.5) * eval_weight(x, 1, -1.5) == doctest::Approx(1.0).epsilon(1e-13));
    }
}

TEST_CASE("local seminorm on closed forms") {
    Grid g = grid1d();
    SampledField linear = SampledField::from_function(g, SmoothFn::polynomial_1d({0.0, 1.0}));
    CHECK(local_seminorm(linear, 1, make_pt(2.5)) == doctest::Approx(3.5));
    CHECK(local_seminorm(linear, 1, make_pt(-4.0)) == doctest::Approx(5.0));

    SampledField constant = SampledField::from_function(g, SmoothFn::constant(1, -3.0));
    CHECK(local_seminorm(constant, 3, make_pt(1.0)) == doctest::Approx(3.0));

    SampledField sine = SampledField::from_function(g, SmoothFn::sin_wave(1, make_pt(1.0), 0.0));
    CHECK(local_seminorm(sine, 2, make_pt(0.0)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("weighted norms against quadrature oracles") {
    Grid g = grid1d(8.0, 801);

    SampledField f1 = SampledField::from_function(g, SmoothFn::weight_psi(1, -1.0));
    CHECK(weighted_norm_value(f1, 0, 1.0, kInf) == doctest::Approx(1.0).epsilon(1e-12));

    // f(x) = exp(-x^2), i.e. Gaussian shape with 2 s^2 = 1
    SampledField f2 = SampledField::from_function(g, SmoothFn::gaussian(1, make_pt(0.0), 1.0 / std::sqrt(2.0)));
    // oracle: independent quadrature of the squared integrand
    double oracle = std::sqrt(integrate_gl_panels([](double x) { return std::exp(-2.0 * x * x); }, -8.0, 8.0, 64));
    CHECK(oracle == doctest::Approx(std::pow(M_PI / 2.0, 0.25)).epsilon(1e-10));
    double norm = weighted_norm_value(f2, 0, 0.0, 2.0);
    CHECK(norm == doctest::Approx(std::pow(M_PI / 2.0, 0.25)).epsilon(1e-6));
    CHECK(norm == doctest::Approx(oracle).epsilon(1e-6));

    SampledField f3 = SampledField::from_function(g, SmoothFn::constant(1, 1.0));
    CHECK(weighted_norm_value(f3, 0, 0.0, kInf) == doctest::Approx(1.0));
}

TEST_CASE("weighted norm flags under-truncated integrands") {
    Grid g = grid1d(6.0, 301);
    SampledField growing = SampledField::from_function(g, SmoothFn::weight_psi(1, 1.0));
    CHECK_THROWS_AS(weighted_norm(growing, 0, 0.0, 2.0), numeric_error);
}

TEST_CASE("monotonicity of psi_minus_kappa in kappa") {
    Grid g = grid1d();
    for (size_t i = 0; i < g.size(); ++i) {
        Pt x = g.point(i);
        CHECK(eval_weight(x, 1, -2.0) <= eval_weight(x, 1, -1.0) + 1e-15);
    }
}

TEST_CASE("inequality suite: single-tag verdicts") {
    Grid g = grid1d(6.0, 401);

    WeightCheckRequest peetre;
    peetre.tag = WeightInequality::peetre;
    peetre.grid = Grid::symmetric_1d(6.0, 161);
    peetre.kappa = 1.0;
    auto rp = verify_weight_inequality(peetre);
    CHECK(rp.pass);
    CHECK(rp.constant >= 1.0);  // equality is forced at x - y = 0
    CHECK(rp.constant <= std::pow(2.0, 1.0) + 1e-9);

    WeightCheckRequest n2;
    n2.tag = WeightInequality::inverse_weight_deriv;
    n2.grid = g;
    n2.kappa = 1.0;
    n2.alpha = axis_counts(0);
    auto rn2 = verify_weight_inequality(n2);
    // 1D calculus oracle: sup 2|x|/(1+x^2) = 1 at x = 1
    CHECK(rn2.pass);
    CHECK(rn2.constant == doctest::Approx(1.0).epsilon(1e-3));

    WeightCheckRequest n4;
    n4.tag = WeightInequality::weight_deriv;
    n4.grid = g;
    n4.kappa = 1.0;
    n4.alpha = axis_counts(0);
    auto rn4 = verify_weight_inequality(n4);
    CHECK(rn4.pass);
    // |d psi_1| / psi_1 = 2|x|/(1+x^2) again
    CHECK(rn4.constant == doctest::Approx(1.0).epsilon(1e-3));

    WeightCheckRequest p3c;
    p3c.tag = WeightInequality::seminorm_product;
    p3c.grid = g;
    p3c.kappa = 2.0;
    p3c.q = 1;
    p3c.field = SmoothFn::sin_wave(1, make_pt(1.0), 0.0);
    auto r3c = verify_weight_inequality(p3c);
    CHECK(r3c.pass);
    CHECK(r3c.lower_constant > 0.0);
    CHECK(r3c.constant >= r3c.lower_constant);
    CHECK(std::isfinite(r3c.constant));
}

TEST_CASE("norm equivalence and embedding over a corpus") {
    Grid g = grid1d(8.0, 401);
    for (const SmoothFn& f : small_corpus()) {
        WeightCheckRequest req;
        req.tag = WeightInequality::norm_equivalence;
        req.grid = g;
        req.kappa = 1.0;
        req.q = 1;
        req.p = 2.0;
        req.field = f;
        auto r = verify_weight_inequality(req);
        CHECK(r.pass);
        CHECK(r.lower_constant > 0.0);

        // embedding: ||f||_{q,kappa,p} <= C ||f||_{q,kappa+d,inf}
        SampledField sf = SampledField::from_function(g, f);
        double lhs = weighted_norm_value(sf, 1, 1.0, 2.0, 1e-3);
        double rhs = weighted_norm_value(sf, 1, 2.0, kInf);
        CHECK(lhs <= 25.0 * rhs);
    }
}

TEST_CASE("finite differences match analytic derivatives") {
    Grid g = grid1d(2.0, 81);
    SmoothFn cubic = SmoothFn::polynomial_1d({1.0, -2.0, 0.5, 0.25});
    SampledField analytic = SampledField::from_function(g, cubic);
    std::vector<double> vals(g.size());
    for (size_t i = 0; i < g.size(); ++i) vals[i] = cubic.value(g.point(i));

    SUBCASE("order-4 stencils are exact on cubics") {
        SampledField fd = SampledField::from_values(g, vals, 4);
        for (int i = 5; i < 76; i += 7) {
            std::array<int, kMaxDim> idx{i, 0, 0};
            for (int q = 1; q <= 3; ++q) {
                double a = analytic.deriv_at_node(idx, axis_counts(0, q));
                double b = fd.deriv_at_node(idx, axis_counts(0, q));
                CHECK(b == doctest::Approx(a).epsilon(1e-10));
            }
        }
    }

    SUBCASE("order-2 stencils converge at second order") {
        SmoothFn wave = SmoothFn::sin_wave(1, make_pt(1.5), 0.2);
        auto fd_err = [&](const Grid& gg) {
            std::vector<double> v(gg.size());
            for (size_t i = 0; i < gg.size(); ++i) v[i] = wave.value(gg.point(i));
            SampledField fd = SampledField::from_values(gg, v, 2);
            std::array<int, kMaxDim> idx{gg.nodes(0) / 2, 0, 0};
            return std::abs(fd.deriv_at_node(idx, axis_counts(0, 1)) -
                            wave.deriv(gg.point(idx), axis_counts(0, 1)));
        };
        double e1 = fd_err(Grid::symmetric_1d(2.0, 81));
        double e2 = fd_err(Grid::symmetric_1d(2.0, 161));
        CHECK(e2 < e1 / 3.0);  // ~4x for halved spacing
    }

    SUBCASE("FD queries off nodes or beyond margin are rejected") {
        SampledField fd = SampledField::from_values(g, vals, 2);
        CHECK_THROWS_AS(fd.deriv_at(make_pt(0.013), axis_counts(0)), std::invalid_argument);
        std::array<int, kMaxDim> edge{0, 0, 0};
        CHECK_THROWS_AS(fd.deriv_at_node(edge, axis_counts(0)), std::invalid_argument);
    }
}
