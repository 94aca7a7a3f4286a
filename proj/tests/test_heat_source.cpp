#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "meltsim/heat_source.hpp"
#include "support.hpp"

using namespace meltsim;

TEST_SUITE("heat_source")
{
    const HeatSourceGeometry table2{0.8e-3, 0.15e-3, 0.07e-3};
    const ProcessParameters proc{150.0, 0.1, 298.15};

    TEST_CASE("peak flux and Gaussian decay")
    {
        const double pi = std::numbers::pi;
        const double peak = 6.0 * std::sqrt(3.0) * 0.5 * 150.0 / (table2.a * table2.b * table2.c * std::pow(pi, 1.5));
        CHECK(flux(table2, proc, 0.5, {0, 0, 0}) == doctest::Approx(peak).epsilon(1e-14));
        // At one semi-axis the flux has dropped by e^-3 along each axis.
        CHECK(flux(table2, proc, 0.5, {table2.a, 0, 0}) == doctest::Approx(peak * std::exp(-3.0)));
        CHECK(flux(table2, proc, 0.5, {0, table2.b, 0}) == doctest::Approx(peak * std::exp(-3.0)));
        CHECK(flux(table2, proc, 0.5, {0, 0, -table2.c}) == doctest::Approx(peak * std::exp(-3.0)));
    }

    TEST_CASE("no flux above the surface, symmetric below it")
    {
        CHECK(flux(table2, proc, 0.5, {0, 0, 1e-6}) == 0.0);
        CHECK(flux(table2, proc, 0.5, {1e-4, 2e-5, -1e-5}) == flux(table2, proc, 0.5, {-1e-4, -2e-5, -1e-5}));
    }

    TEST_CASE("deposited power equals the absorbed laser power")
    {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> axis(1e-5, 2e-3);
        for (int i = 0; i < 4; ++i) {
            const HeatSourceGeometry g{axis(rng), axis(rng), axis(rng)};
            CHECK(total_deposited_power(g, proc, 0.4, {1e-9, 0.0, 4000}) ==
                  doctest::Approx(0.4 * proc.power).epsilon(1e-7));
        }
    }

    TEST_CASE("parameter validation")
    {
        CHECK_THROWS_AS(HeatSourceGeometry({0.0, 1e-4, 1e-4}).validate(), std::invalid_argument);
        CHECK_THROWS_AS(HeatSourceGeometry({1e-4, -1e-4, 1e-4}).validate(), std::invalid_argument);
        CHECK_NOTHROW(table2.validate());
        CHECK_THROWS_AS(ProcessParameters({-1.0, 0.1, 300.0}).validate(), std::invalid_argument);
        CHECK_THROWS_AS(ProcessParameters({1.0, 0.1, 0.0}).validate(), std::invalid_argument);
        CHECK_NOTHROW(proc.validate());
    }

    TEST_CASE("dimensionless groups")
    {
        const Material m = testing::ti64();
        const double alpha = 5e-6;
        const DimensionlessGroups g = dimensionless_groups(table2, proc, alpha, m, 0.01, 0.03);
        const double scale = 0.1 / (2.0 * std::sqrt(6.0) * alpha);
        CHECK(g.u_a == doctest::Approx(scale * table2.a));
        CHECK(g.u_b == doctest::Approx(scale * table2.b));
        CHECK(g.u_c == doctest::Approx(scale * table2.c));
        CHECK(g.tau == doctest::Approx(0.01 * 0.02 / (2.0 * alpha)));
        const double cp0 = specific_heat(m, proc.ambient);
        CHECK(g.n == doctest::Approx(0.5 * 150.0 * 0.1 /
                                     (4.0 * std::numbers::pi * alpha * alpha * m.density * cp0 * (m.t_melt - 298.15))));
        CHECK_THROWS_AS(dimensionless_groups(table2, proc, 0.0, m, 0.0, 1.0), std::domain_error);
        ProcessParameters hot = proc;
        hot.ambient = 2500.0;
        CHECK_THROWS_AS(dimensionless_groups(table2, hot, alpha, m, 0.0, 1.0), std::domain_error);
    }
}
