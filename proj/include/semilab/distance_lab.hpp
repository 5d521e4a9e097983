#pragma once

#include "semilab/density.hpp"
#include "semilab/smooth_fn.hpp"

#include <memory>

namespace semilab::dist {

struct DictionaryEntry {
    SmoothFn fn;                  // normalized member
    double norm_bound = 1.0;      // analytic upper bound of ||fn||_{k,inf} after normalization
    std::string kind;
};

// Smooth dual test functions with certified ||f||_{k,inf} <= 1, built from
// scaled/shifted Gaussians, trig waves and erf sigmoids. Normalization
// divides by the sum over orders j <= k of per-derivative sup bounds.
class TestFunctionDictionary {
public:
    static TestFunctionDictionary standard(int k);

    int order() const { return k_; }
    const std::vector<DictionaryEntry>& members() const { return members_; }

    // Grid sweep of |f|_k for every member; true when all stay below
    // 1 + margin.
    bool verify(const Grid& grid, double margin = 1e-3) const;

private:
    int k_ = 0;
    std::vector<DictionaryEntry> members_;
};

// A measure we can pair against test functions: an endpoint cloud (Monte
// Carlo average) or a density (quadrature on its grid).
class PairingMeasure {
public:
    static PairingMeasure from_cloud(std::shared_ptr<const density::SampleCloud> cloud);
    static PairingMeasure from_density(density::KernelDensity density, Grid quad_grid);

    double integrate(const SmoothFn& f) const;

private:
    std::shared_ptr<const density::SampleCloud> cloud_;
    std::optional<density::KernelDensity> density_;
    Grid grid_;
};

// Certified lower bound of the smoothness-k dual distance: the best pairing
// gap over the dictionary.
double dk_lower(const PairingMeasure& mu, const PairingMeasure& nu, const TestFunctionDictionary& dict);

// Exact total-variation distance between two absolutely continuous laws on a
// shared quadrature grid.
double dk_oracle_tv(const density::KernelDensity& p, const density::KernelDensity& q, const Grid& grid);

// Variant with per-density grids; throws on mismatched grids.
double dk_oracle_tv(const density::KernelDensity& p, const Grid& pgrid, const density::KernelDensity& q,
                    const Grid& qgrid);

}  // namespace semilab::dist
