#include <doctest.h>

#include <random>

#include "meltsim/units.hpp"

using namespace meltsim::units;

TEST_SUITE("units")
{
    TEST_CASE("conversions have the expected scale")
    {
        CHECK(mm_to_m(1.0) == doctest::Approx(1e-3));
        CHECK(um_to_m(101.0) == doctest::Approx(101e-6));
        CHECK(mm_per_s_to_m_per_s(100.0) == doctest::Approx(0.1));
        CHECK(celsius_to_kelvin(25.0) == doctest::Approx(298.15));
        CHECK(kelvin_to_celsius(273.15) == doctest::Approx(0.0));
    }

    TEST_CASE("boundary conversions round-trip to 1e-12 relative")
    {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> mag(-6.0, 6.0);
        for (int i = 0; i < 1000; ++i) {
            const double x = std::pow(10.0, mag(rng));
            CHECK(std::abs(m_to_mm(mm_to_m(x)) - x) <= 1e-12 * x);
            CHECK(std::abs(m_to_um(um_to_m(x)) - x) <= 1e-12 * x);
            CHECK(std::abs(m_per_s_to_mm_per_s(mm_per_s_to_m_per_s(x)) - x) <= 1e-12 * x);
            const double c = x - 200.0;
            CHECK(std::abs(kelvin_to_celsius(celsius_to_kelvin(c)) - c) <= 1e-12 * std::max(1.0, std::abs(c)));
        }
    }
}
