#include <doctest.h>

#include <fstream>

#include "meltsim/config.hpp"
#include "meltsim/errors.hpp"
#include "support.hpp"

using namespace meltsim;
using nlohmann::json;

namespace {

json base_doc()
{
    return json::parse(R"({
      "schema_version": 1,
      "material": { "file": "data/materials/ti6al4v.json" },
      "geometry": { "a_mm": 0.8, "b_mm": 0.15, "c_mm": 0.07 },
      "process": { "power_w": 150, "speed_mm_s": 100, "ambient_c": 25, "spot_diameter_mm": 0.5 },
      "scan": { "segments": 7, "segment_length_mm": 2.0, "hatch_um": 101, "layer_thickness_um": 60 },
      "probe": { "time_s": "end" }
    })");
}

SimulationConfig parse(const json& doc) { return config_from_json(doc, testing::source_dir()); }

} // namespace

TEST_SUITE("config")
{
    TEST_CASE("presentation units are converted to SI")
    {
        const SimulationConfig c = parse(base_doc());
        const SimulationSetup s = c.to_setup();
        CHECK(s.geometry.a == doctest::Approx(0.8e-3));
        CHECK(s.geometry.c == doctest::Approx(0.07e-3));
        CHECK(s.ambient == doctest::Approx(298.15));
        CHECK(s.raster.tracks == 7);
        CHECK(s.raster.track_length == doctest::Approx(2e-3));
        CHECK(s.raster.hatch_spacing == doctest::Approx(101e-6));
        CHECK(s.raster.layer_thickness == doctest::Approx(60e-6));
        CHECK(s.raster.speed == doctest::Approx(0.1));
        CHECK(s.absorptivity == doctest::Approx(0.5));
        CHECK_FALSE(s.probe_time.has_value());
        CHECK(*c.spot_diameter_mm == 0.5);
    }

    TEST_CASE("optional fields")
    {
        json doc = base_doc();
        doc["probe"]["time_s"] = 0.05;
        doc["process"]["absorptivity"] = 0.35;
        doc["numerics"] = {{"rel_tol", 1e-5}, {"grid_samples", 48}};
        const SimulationSetup s = parse(doc).to_setup();
        CHECK(*s.probe_time == doctest::Approx(0.05));
        CHECK(s.absorptivity == doctest::Approx(0.35));
        CHECK(s.field.quadrature.rel_tol == doctest::Approx(1e-5));
        CHECK(s.extraction.samples_per_axis == 48);
    }

    TEST_CASE("invalid documents are config errors")
    {
        auto rejects = [](const std::function<void(json&)>& edit) {
            json doc = base_doc();
            edit(doc);
            CHECK_THROWS_AS(parse(doc), ConfigError);
        };
        rejects([](json& d) { d["process"]["ambient_c"] = 1700.0; });
        rejects([](json& d) { d["process"]["power_w"] = -1.0; });
        rejects([](json& d) { d["process"]["power_w"] = "lots"; });
        rejects([](json& d) { d.erase("geometry"); });
        rejects([](json& d) { d["geometry"]["b_mm"] = 0.0; });
        rejects([](json& d) { d["scan"]["segments"] = 0; });
        rejects([](json& d) { d["scan"]["segments"] = 2.5; });
        rejects([](json& d) { d["probe"]["time_s"] = "start"; });
        rejects([](json& d) { d["process"]["absorptivity"] = 1.5; });
        rejects([](json& d) { d["schema_version"] = 2; });
        rejects([](json& d) { d["numerics"] = {{"relaxation", 0.0}}; });
        rejects([](json& d) { d["output"] = {{"contour_resolution", {1, 5}}}; });
        rejects([](json& d) { d["material"]["absorptivity"] = 0.3; });
        rejects([](json& d) { d["scan"]["hatch_mm"] = 0.1; });
        rejects([](json& d) { d["laser"] = json::object(); });
    }

    TEST_CASE("missing material file is an IO error")
    {
        json doc = base_doc();
        doc["material"]["file"] = "nowhere.json";
        CHECK_THROWS_AS(parse(doc), IoError);
        CHECK_THROWS_AS(load_config("/nonexistent/config.json"), IoError);
    }

    TEST_CASE("material paths resolve against the config directory")
    {
        const SimulationConfig c = load_config(testing::source_dir() / "configs/table2_seven_tracks.json");
        CHECK(c.material.name == "Ti-6Al-4V");
        CHECK(c.segments == 7);
    }

    TEST_CASE("config hash changes exactly when the config changes")
    {
        const SimulationConfig a = parse(base_doc());
        const SimulationConfig b = parse(base_doc());
        CHECK(a.hash() == b.hash());
        CHECK(a.hash().size() == 16);

        json doc = base_doc();
        doc["process"]["power_w"] = 151;
        CHECK(parse(doc).hash() != a.hash());
        doc = base_doc();
        doc["scan"]["hatch_um"] = 100;
        CHECK(parse(doc).hash() != a.hash());

        // Same values written differently: same run, same hash.
        doc = base_doc();
        doc["process"]["power_w"] = 150.0;
        doc["scan"]["time_spacing_s"] = 0.0;
        CHECK(parse(doc).hash() == a.hash());

        // Canonical form reparses to the same configuration.
        const SimulationConfig round = config_from_json(a.to_json(), testing::source_dir());
        CHECK(round.hash() == a.hash());
    }

    TEST_CASE("sweep spec")
    {
        const json good = json::parse(
            R"({"powers_w":[150,200,300,400],"speeds_mm_s":[100],"geometries_mm":[[0.8,0.15,0.07],{"a_mm":1.0,"b_mm":0.1,"c_mm":0.07}]})");
        const SweepSpec s = sweep_spec_from_json(good);
        CHECK(s.powers_w.size() == 4);
        CHECK(s.geometries_mm.size() == 2);
        CHECK(s.geometries_mm[1][0] == 1.0);

        json empty = good;
        empty["powers_w"] = json::array();
        CHECK_THROWS_AS(sweep_spec_from_json(empty), ConfigError);
        json negative = good;
        negative["speeds_mm_s"] = {-5};
        CHECK_THROWS_AS(sweep_spec_from_json(negative), ConfigError);
        json bad_geom = good;
        bad_geom["geometries_mm"] = {{0.8, 0.15}};
        CHECK_THROWS_AS(sweep_spec_from_json(bad_geom), ConfigError);
        CHECK_NOTHROW(load_sweep_spec(testing::source_dir() / "configs/table2_sweep.json"));
    }

    TEST_CASE("bounds and resolution parsing")
    {
        const GeometryBounds b =
            bounds_from_json(json::parse(R"({"a_mm":[0.1,0.5],"b_mm":[0.05,0.2],"c_mm":[0.02,0.02]})"));
        CHECK(b.a[1] == doctest::Approx(0.5e-3));
        CHECK(b.c[0] == doctest::Approx(b.c[1]));
        CHECK_THROWS_AS(bounds_from_json(json::parse(R"({"a_mm":[0.5,0.1],"b_mm":[0.05,0.2],"c_mm":[0.02,0.03]})")),
                        ConfigError);
        CHECK_THROWS_AS(bounds_from_json(json::parse(R"({"a_mm":[0.1,0.5]})")), ConfigError);

        CHECK(parse_resolution("128x64") == std::array<int, 2>{128, 64});
        CHECK(parse_resolution(" 3X2 ") == std::array<int, 2>{3, 2});
        CHECK_THROWS_AS(parse_resolution("128"), ConfigError);
        CHECK_THROWS_AS(parse_resolution("1x5"), ConfigError);
        CHECK_THROWS_AS(parse_resolution("axb"), ConfigError);
    }

    TEST_CASE("FNV-1a reference values")
    {
        CHECK(fnv1a_hex("") == "cbf29ce484222325");
        CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
    }
}
