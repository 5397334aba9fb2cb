#include <doctest.h>

#include <array>
#include <cmath>

#include "quasiflow/norms.hpp"
#include "quasiflow/wwsymbols.hpp"

using namespace qf;

TEST_CASE("principal Dirichlet-Neumann symbol") {
    const TorusGrid g = TorusGrid::make(64);

    SUBCASE("one-dimensional surfaces collapse to |xi|") {
        const RealField eta = RealField::from_function(
            g, [](double x) { return 0.3 * std::sin(x) + 0.1 * std::cos(4 * x); });
        for (double xi : {3.0, -2.0, 0.5}) {
            const std::vector<double> v = dn_principal(eta, xi);
            REQUIRE(v.size() == static_cast<size_t>(g.n_points));
            for (double val : v)
                CHECK(val == doctest::Approx(std::abs(xi)).epsilon(1e-12));
        }
    }

    SUBCASE("two-dimensional pointwise values") {
        CHECK(dn_principal({0.0, 0.0}, {3.0, 4.0}) ==
              doctest::Approx(5.0).epsilon(1e-14));
        // gradient orthogonal to the frequency stretches the symbol
        CHECK(dn_principal({1.0, 0.0}, {0.0, 1.0}) ==
              doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
        // gradient parallel to the frequency cancels the stretch
        CHECK(dn_principal({1.0, 0.0}, {1.0, 0.0}) ==
              doctest::Approx(1.0).epsilon(1e-14));
    }

    SUBCASE("zero frequency is rejected") {
        const RealField eta = RealField::zeros(g);
        CHECK_THROWS_AS((void)dn_principal(eta, 0.0), ZeroFrequency);
        CHECK_THROWS_AS((void)dn_principal({0.2, 0.1}, {0.0, 0.0}),
                        ZeroFrequency);
    }
}

TEST_CASE("capillary symbol tables") {
    const TorusGrid g = TorusGrid::make(256);

    SUBCASE("flat surface collapses the whole table") {
        const CapillarySymbols cs = capillary_symbols(RealField::zeros(g));
        for (int k : {2, 5, -7, 40}) {
            const double ak = std::abs(static_cast<double>(k));
            CHECK(std::abs(cs.q0.value(0, k) - cx(1.0, 0.0)) <= 1e-12);
            CHECK(cs.p_half.value(0, k).real() ==
                  doctest::Approx(std::sqrt(ak)).epsilon(1e-12));
            CHECK(std::abs(cs.p_mhalf.value(0, k)) <= 1e-12);
            CHECK(cs.gamma32.value(0, k).real() ==
                  doctest::Approx(std::pow(ak, 1.5)).epsilon(1e-12));
            CHECK(std::abs(cs.gamma12.value(0, k)) <= 1e-12);
            CHECK(cs.gamma.value(0, k).real() ==
                  doctest::Approx(std::pow(ak, 1.5)).epsilon(1e-12));
            CHECK(cs.l2.value(0, k).real() ==
                  doctest::Approx(ak * ak).epsilon(1e-12));
            CHECK(std::abs(cs.l1.value(0, k)) <= 1e-12);
            CHECK(cs.lambda1.value(0, k).real() ==
                  doctest::Approx(ak).epsilon(1e-12));
            CHECK(std::abs(cs.lambda0.value(0, k)) <= 1e-12);
            CHECK(cs.alpha1.value(0, k).real() ==
                  doctest::Approx(ak).epsilon(1e-12));
        }
    }

    SUBCASE("wavy surface spot values follow the closed forms") {
        const RealField eta = RealField::from_function(
            g, [](double x) { return 0.1 * std::sin(x); });
        const CapillarySymbols cs = capillary_symbols(eta);
        // node 0 has eta' = 0.1: l2 = xi^2 (1 + eta'^2)^{-3/2}
        CHECK(cs.l2.value(0, 3).real() ==
              doctest::Approx(9.0 * std::pow(1.01, -1.5)).epsilon(1e-12));
        // lambda1 stays |xi| whatever the surface
        CHECK(cs.lambda1.value(17, 9).real() ==
              doctest::Approx(9.0).epsilon(1e-12));
        // gamma32 = |xi|^{3/2} (1 + eta'^2)^{-3/4}: its ellipticity ratio
        // bottoms out exactly at the steepest point
        double min_ratio = 1e18;
        for (int j = 0; j < g.n_points; ++j)
            for (int k = 2; k <= g.max_mode(); ++k)
                min_ratio = std::min(
                    min_ratio, cs.gamma32.value(j, k).real() / std::pow(k, 1.5));
        CHECK(min_ratio ==
              doctest::Approx(std::pow(1.01, -0.75)).epsilon(1e-9));
    }

    SUBCASE("reality and evenness") {
        const RealField eta = RealField::from_function(
            g, [](double x) { return 0.1 * std::sin(x) + 0.05 * std::cos(3 * x); });
        const CapillarySymbols cs = capillary_symbols(eta);
        for (int j = 0; j < g.n_points; j += 31)
            for (int k = 2; k <= g.max_mode(); k += 17) {
                CHECK(std::abs(cs.gamma32.value(j, k).imag()) <= 1e-14);
                CHECK(cs.gamma32.value(j, k).real() > 0.0);
                CHECK(std::abs(cs.lambda1.value(j, k) - cs.lambda1.value(j, -k)) <=
                      1e-12);
                CHECK(std::abs(cs.q0.value(j, k).imag()) <= 1e-14);
                CHECK(cs.q0.value(j, k).real() > 0.0);
            }
    }
}

TEST_CASE("gravity symbol pair") {
    const TorusGrid g = TorusGrid::make(128);

    SUBCASE("unit Taylor coefficient") {
        const RealField one = RealField::from_function(g, [](double) { return 1.0; });
        const GravitySymbols gs = gravity_symbols(one);
        for (int k : {1, 4, -9}) {
            const double ak = std::abs(static_cast<double>(k));
            CHECK(gs.gamma.value(0, k).real() ==
                  doctest::Approx(std::sqrt(ak)).epsilon(1e-12));
            CHECK(gs.q.value(0, k).real() ==
                  doctest::Approx(1.0 / std::sqrt(ak)).epsilon(1e-12));
        }
        CHECK(std::abs(gs.q.value(0, 0)) == 0.0);
    }

    SUBCASE("the pair multiplies back to the coefficient") {
        const RealField a = RealField::from_function(
            g, [](double x) { return 2.0 + 0.5 * std::sin(x); });
        const GravitySymbols gs = gravity_symbols(a);
        for (int j = 0; j < g.n_points; j += 13)
            for (int k = 1; k <= g.max_mode(); k += 11)
                CHECK((gs.q.value(j, k) * gs.gamma.value(j, k)).real() ==
                      doctest::Approx(a.samples[j]).epsilon(1e-12));
        // scaling: 4x the coefficient doubles gamma
        const RealField four = RealField::from_function(g, [](double) { return 4.0; });
        const GravitySymbols g4 = gravity_symbols(four);
        CHECK(g4.gamma.value(0, 9).real() ==
              doctest::Approx(2.0 * 3.0).epsilon(1e-12));
    }

    SUBCASE("sign violations are rejected") {
        const RealField dips = RealField::from_function(
            g, [](double x) { return 0.5 + std::sin(x); });
        CHECK_THROWS_AS((void)gravity_symbols(dips), TaylorSignViolation);
        CHECK_THROWS_AS((void)gravity_symbols(RealField::zeros(g)),
                        TaylorSignViolation);
    }
}

TEST_CASE("boundary traces and the good unknown") {
    const TorusGrid g = TorusGrid::make(128);

    SUBCASE("flat surface traces") {
        const RealField psi =
            RealField::from_function(g, [](double x) { return std::cos(x); });
        const Traces t = linearized_traces(RealField::zeros(g), psi);
        const RealField wantB =
            RealField::from_function(g, [](double x) { return std::cos(x); });
        const RealField wantV =
            RealField::from_function(g, [](double x) { return -std::sin(x); });
        CHECK(sup_norm(t.B - wantB) <= 1e-12);
        CHECK(sup_norm(t.V - wantV) <= 1e-12);
    }

    SUBCASE("zero potential gives zero traces") {
        const RealField eta = RealField::from_function(
            g, [](double x) { return 0.1 * std::sin(x); });
        const Traces t = linearized_traces(eta, RealField::zeros(g));
        CHECK(sup_norm(t.B) == 0.0);
        CHECK(sup_norm(t.V) == 0.0);
    }

    SUBCASE("wavy surface traces match the literal formula") {
        const RealField eta = RealField::from_function(
            g, [](double x) { return 0.1 * std::sin(x); });
        const RealField psi =
            RealField::from_function(g, [](double x) { return std::cos(2 * x); });
        const Traces t = linearized_traces(eta, psi);
        const RealField ep = spectral_derivative(eta, 1);
        const RealField pp = spectral_derivative(psi, 1);
        const RealField Dpsi = apply_multiplier(psi, multiplier_frac_abs(1.0));
        for (int j = 0; j < g.n_points; ++j) {
            const double denom = 1.0 + ep.samples[j] * ep.samples[j];
            const double wantB =
                (ep.samples[j] * pp.samples[j] + Dpsi.samples[j]) / denom;
            CHECK(t.B.samples[j] == doctest::Approx(wantB).epsilon(1e-12));
            CHECK(t.V.samples[j] ==
                  doctest::Approx(pp.samples[j] - wantB * ep.samples[j])
                      .epsilon(1e-12));
        }
    }

    SUBCASE("good unknown reduces to psi when the coupling vanishes") {
        const RealField psi = RealField::from_function(
            g, [](double x) { return std::cos(3 * x) + 0.2 * std::sin(x); });
        CHECK(sup_norm(good_unknown(RealField::zeros(g), psi, 1.0) - psi) <=
              1e-12);
    }

    SUBCASE("capillary branch subtracts the paraproduct correction") {
        const RealField eta = RealField::from_function(
            g, [](double x) { return std::cos(8 * x); });
        const RealField psi =
            RealField::from_function(g, [](double x) { return std::cos(x); });
        const Traces t = linearized_traces(eta, psi);
        const RealField want = psi - paraproduct(t.B, eta);
        CHECK(sup_norm(good_unknown(eta, psi, 1.0) - want) <= 1e-13);
    }

    SUBCASE("gravity branch builds on the tangential trace") {
        const RealField eta = RealField::from_function(
            g, [](double x) { return 0.1 * std::sin(x) + std::cos(8 * x) * 0.02; });
        const RealField psi =
            RealField::from_function(g, [](double x) { return std::cos(2 * x); });
        const Traces t = linearized_traces(eta, psi);
        const RealField want =
            t.V + paraproduct(spectral_derivative(eta, 1), t.B);
        CHECK(sup_norm(good_unknown(eta, psi, 0.0) - want) <= 1e-13);
    }
}

TEST_CASE("symmetrizer commutation residuals") {
    const TorusGrid g = TorusGrid::make(256);
    const std::vector<int> probes = {16, 32, 64};

    SUBCASE("flat surface: primary identity is exact, literal is not") {
        const CommutationReport r = verify_commutation(RealField::zeros(g), probes);
        REQUIRE(r.modes == probes);
        for (size_t i = 0; i < probes.size(); ++i) {
            CHECK(r.residual_primary[i] <= 1e-12);
            CHECK(r.residual_literal[i] >= 1.0);
        }
        for (size_t i = 1; i < probes.size(); ++i)
            CHECK(r.residual_literal[i] > r.residual_literal[i - 1]);
    }

    SUBCASE("wavy surface: primary residual is small and non-increasing") {
        const RealField eta = RealField::from_function(
            g, [](double x) { return 0.05 * std::sin(x); });
        const CommutationReport r = verify_commutation(eta, probes);
        // frozen value at probe 16: 1.655e-4
        CHECK(r.residual_primary[0] == doctest::Approx(1.655463e-4).epsilon(0.2));
        for (size_t i = 1; i < probes.size(); ++i)
            CHECK(r.residual_primary[i] <= r.residual_primary[i - 1] * 1.0001);
        for (size_t i = 0; i < probes.size(); ++i)
            CHECK(r.residual_primary[i] <= 1e-5 * r.residual_literal[i]);
    }

    SUBCASE("residual responds quadratically to the surface amplitude") {
        const RealField e1 = RealField::from_function(
            g, [](double x) { return 0.05 * std::sin(x); });
        const RealField e2 = RealField::from_function(
            g, [](double x) { return 0.10 * std::sin(x); });
        const CommutationReport r1 = verify_commutation(e1, probes);
        const CommutationReport r2 = verify_commutation(e2, probes);
        for (size_t i = 0; i < 2; ++i) {  // probes 16, 32; ratios 4.07, 3.96
            const double ratio = r2.residual_primary[i] / r1.residual_primary[i];
            CHECK(ratio >= 3.5);
            CHECK(ratio <= 4.5);
        }
    }
}
