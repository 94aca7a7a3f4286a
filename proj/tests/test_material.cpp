#include <doctest.h>

#include <random>
#include <sstream>

#include "meltsim/errors.hpp"
#include "meltsim/material.hpp"
#include "support.hpp"

using namespace meltsim;

TEST_SUITE("material")
{
    TEST_CASE("property table interpolates linearly and clamps at the ends")
    {
        const PropertyTable t({{300.0, 10.0}, {500.0, 20.0}, {700.0, 22.0}});
        CHECK(t(300.0) == doctest::Approx(10.0));
        CHECK(t(400.0) == doctest::Approx(15.0));
        CHECK(t(600.0) == doctest::Approx(21.0));
        CHECK(t(100.0) == doctest::Approx(10.0));
        CHECK(t(5000.0) == doctest::Approx(22.0));
        CHECK(t.min_value() == 10.0);
        CHECK(t.max_value() == 22.0);
    }

    TEST_CASE("property table rejects malformed input")
    {
        CHECK_THROWS_AS(PropertyTable({{300.0, 1.0}}), std::invalid_argument);
        CHECK_THROWS_AS(PropertyTable({{300.0, 1.0}, {300.0, 2.0}}), std::invalid_argument);
        CHECK_THROWS_AS(PropertyTable({{300.0, 1.0}, {400.0, -2.0}}), std::invalid_argument);
        const PropertyTable t = PropertyTable::constant(3.0);
        CHECK_THROWS_AS(t(0.0), std::domain_error);
        CHECK_THROWS_AS(t(-5.0), std::domain_error);
        CHECK_THROWS_AS(t(std::nan("")), std::domain_error);
    }

    TEST_CASE("liquid fraction and modified heat capacity")
    {
        const Material m = testing::ti64();
        CHECK(liquid_fraction(m, m.t_solidus) == 0.0);
        CHECK(liquid_fraction(m, m.t_liquidus) == 1.0);
        CHECK(liquid_fraction(m, 0.5 * (m.t_solidus + m.t_liquidus)) == doctest::Approx(0.5));
        CHECK(liquid_fraction(m, 300.0) == 0.0);
        CHECK(liquid_fraction(m, 3000.0) == 1.0);

        const double jump = m.latent_heat_fusion / (m.t_liquidus - m.t_solidus);
        const double mid = 1900.0;
        CHECK(modified_heat_capacity(m, mid) - specific_heat(m, mid) == doctest::Approx(jump));
        CHECK(modified_heat_capacity(m, 1500.0) == doctest::Approx(specific_heat(m, 1500.0)));
        CHECK(thermal_diffusivity(m, mid) ==
              doctest::Approx(conductivity(m, mid) / (m.density * modified_heat_capacity(m, mid))));
    }

    TEST_CASE("modified heat capacity never falls below the sensible one")
    {
        const Material m = testing::ti64();
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> temp(250.0, 4000.0);
        for (int i = 0; i < 1000; ++i) {
            const double T = temp(rng);
            CHECK(modified_heat_capacity(m, T) >= specific_heat(m, T));
            const double f = liquid_fraction(m, T);
            CHECK(f >= 0.0);
            CHECK(f <= 1.0);
        }
    }

    TEST_CASE("properties_at bundles consistent values")
    {
        const Material m = testing::ti64();
        const PropertyState s = properties_at(m, 1200.0);
        CHECK(s.conductivity == doctest::Approx(16.0));
        CHECK(s.heat_capacity == doctest::Approx(690.0));
        CHECK(s.diffusivity == doctest::Approx(16.0 / (4430.0 * 690.0)));
    }

    TEST_CASE("bundled Ti-6Al-4V file")
    {
        const Material m = testing::ti64();
        CHECK(m.name == "Ti-6Al-4V");
        CHECK(m.t_melt == doctest::Approx(0.5 * (m.t_solidus + m.t_liquidus)));
        CHECK(m.absorptivity == doctest::Approx(0.5));
    }

    TEST_CASE("material JSON round trip")
    {
        const Material m = testing::ti64();
        const Material back = material_from_json(material_to_json(m));
        CHECK(material_to_json(back) == material_to_json(m));
    }

    TEST_CASE("material JSON errors")
    {
        nlohmann::json doc = material_to_json(testing::ti64());
        SUBCASE("missing field")
        {
            doc.erase("density");
            CHECK_THROWS_AS(material_from_json(doc), ConfigError);
        }
        SUBCASE("wrong schema version")
        {
            doc["schema_version"] = 99;
            CHECK_THROWS_AS(material_from_json(doc), ConfigError);
        }
        SUBCASE("invariant violation")
        {
            doc["t_liquidus"] = 1000.0;
            CHECK_THROWS_AS(material_from_json(doc), ConfigError);
        }
        SUBCASE("bad table")
        {
            doc["conductivity"] = nlohmann::json::array({nlohmann::json::array({300.0, 1.0})});
            CHECK_THROWS_AS(material_from_json(doc), ConfigError);
        }
        SUBCASE("melting temperature defaults to the mushy-zone midpoint")
        {
            doc.erase("t_melt");
            const Material m = material_from_json(doc);
            CHECK(m.t_melt == doctest::Approx(0.5 * (m.t_solidus + m.t_liquidus)));
        }
    }

    TEST_CASE("missing material file is an IO error")
    {
        CHECK_THROWS_AS(load_material(testing::source_dir() / "data/materials/nope.json"), IoError);
    }
}
