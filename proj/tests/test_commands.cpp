#include <doctest.h>

#include <fstream>
#include <sstream>

#include "meltsim/commands.hpp"
#include "meltsim/units.hpp"
#include "support.hpp"

using namespace meltsim;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json quick_config()
{
    json doc = json::parse(R"({
      "schema_version": 1,
      "geometry": { "a_mm": 0.2, "b_mm": 0.1, "c_mm": 0.05 },
      "process": { "power_w": 150, "speed_mm_s": 500, "ambient_c": 25 },
      "scan": { "segments": 1, "segment_length_mm": 1.0 },
      "numerics": { "rel_tol": 1e-5, "grid_samples": 32 },
      "output": { "contour_resolution": [40, 24] }
    })");
    doc["material"] = {{"file", (testing::source_dir() / "data/materials/ti6al4v.json").string()}};
    return doc;
}

fs::path write(const fs::path& path, const json& doc)
{
    std::ofstream(path) << doc.dump(2);
    return path;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct Capture {
    std::ostringstream out, err;
    CommandStreams io() { return {out, err}; }
};

std::vector<std::string> csv_rows(const std::string& text)
{
    std::vector<std::string> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#')
            rows.push_back(line);
    return rows;
}

} // namespace

TEST_SUITE("commands")
{
    TEST_CASE("simulate writes a deterministic summary")
    {
        const fs::path dir = testing::scratch_dir("simulate");
        const fs::path cfg = write(dir / "run.json", quick_config());
        Capture c1, c2;
        REQUIRE(run_simulate(cfg, std::nullopt, dir / "a", c1.io()) == exit_ok);
        REQUIRE(run_simulate(cfg, std::nullopt, dir / "b", c2.io()) == exit_ok);
        const std::string a = slurp(dir / "a/summary.json");
        CHECK(a == slurp(dir / "b/summary.json"));
        const json s = json::parse(a);
        for (const char* key : {"length_mm", "width_mm", "depth_mm", "peak_temperature_c", "properties_converged",
                                "config_hash", "melted"})
            CHECK(s.contains(key));
        CHECK(s["melted"] == true);
        CHECK(c1.out.str().find("melt pool") != std::string::npos);
    }

    TEST_CASE("simulate with a contour export")
    {
        const fs::path dir = testing::scratch_dir("simulate_contour");
        const fs::path cfg = write(dir / "run.json", quick_config());
        Capture c;
        REQUIRE(run_simulate(cfg, Plane::side, dir / "out", c.io()) == exit_ok);
        CHECK(fs::exists(dir / "out/contour_side.csv"));
        CHECK(fs::exists(dir / "out/contour_side.json"));
        const json iso = json::parse(slurp(dir / "out/contour_side_isolines.json"));
        CHECK(iso["plane"] == "side");
        CHECK(iso["polylines"].size() >= 1);
    }

    TEST_CASE("failure classes map to distinct exit codes")
    {
        const fs::path dir = testing::scratch_dir("exit_codes");
        Capture c;
        CHECK(run_simulate(dir / "missing.json", std::nullopt, std::nullopt, c.io()) == exit_io);

        json hot = quick_config();
        hot["process"]["ambient_c"] = 1700.0;
        CHECK(run_simulate(write(dir / "hot.json", hot), std::nullopt, dir / "hot", c.io()) == exit_config);
        CHECK_FALSE(fs::exists(dir / "hot"));

        std::ofstream(dir / "garbage.json") << "{ not json";
        CHECK(run_simulate(dir / "garbage.json", std::nullopt, std::nullopt, c.io()) == exit_config);

        json starved = quick_config();
        starved["numerics"]["max_panels"] = 1;
        starved["numerics"]["rel_tol"] = 1e-12;
        CHECK(run_simulate(write(dir / "starved.json", starved), std::nullopt, dir / "s", c.io()) == exit_simulation);

        const fs::path cfg = write(dir / "ok.json", quick_config());
        std::ofstream(dir / "blocker") << "x";
        CHECK(run_contour(cfg, Plane::top, std::string("8x8"), dir / "blocker/sub", c.io()) == exit_io);
        CHECK(run_contour(cfg, Plane::top, std::string("8by8"), dir / "r", c.io()) == exit_config);
        CHECK(c.err.str().find("config error") != std::string::npos);
    }

    TEST_CASE("contour exports: schema, metadata and plane consistency")
    {
        const fs::path dir = testing::scratch_dir("contour");
        const fs::path cfg = write(dir / "run.json", quick_config());
        Capture c;
        REQUIRE(run_contour(cfg, Plane::top, std::string("41x21"), dir, c.io()) == exit_ok);
        REQUIRE(run_contour(cfg, Plane::side, std::string("41x21"), dir, c.io()) == exit_ok);
        const std::string top_csv = slurp(dir / "contour_top.csv");
        CHECK(csv_rows(top_csv).front() == "x_mm,y_mm,T_c");
        CHECK(csv_rows(top_csv).size() == 1 + 41 * 21);
        CHECK(csv_rows(slurp(dir / "contour_side.csv")).front() == "x_mm,z_mm,T_c");

        const SimulationConfig config = load_config(cfg);
        const json top = json::parse(slurp(dir / "contour_top.json"));
        const json side = json::parse(slurp(dir / "contour_side.json"));
        CHECK(top["metadata"]["config_hash"] == config.hash());
        CHECK(top["metadata"]["units"]["temperature"] == "degC");

        // Side-view maximum vs the top-view maximum: the side grid's z = 0 row
        // is the top grid's y = 0 line, up to one cell of field variation.
        auto max_of = [](const json& rows) {
            double m = -1e300;
            for (const auto& r : rows)
                for (const auto& v : r)
                    m = std::max(m, v.get<double>());
            return m;
        };
        const double top_max = max_of(top["T_c"]);
        const double side_max = max_of(side["T_c"]);
        const auto& side_surface = side["T_c"].back();
        double cell_variation = 0.0;
        for (std::size_t i = 0; i + 1 < side_surface.size(); ++i)
            cell_variation = std::max(cell_variation,
                                      std::abs(side_surface[i + 1].get<double>() - side_surface[i].get<double>()));
        CHECK(side_max <= top_max + 1e-9);
        CHECK(top_max - side_max <= cell_variation + 1e-9);
    }

    TEST_CASE("sweep reproduces the table layout and is row-independent")
    {
        const fs::path dir = testing::scratch_dir("sweep");
        const fs::path cfg = write(dir / "run.json", quick_config());
        const fs::path full =
            write(dir / "full.json", json::parse(R"({"powers_w":[150,200,300,400],"speeds_mm_s":[500],
                                                      "geometries_mm":[[0.2,0.1,0.05]]})"));
        const fs::path sub = write(
            dir / "sub.json", json::parse(R"({"powers_w":[300],"speeds_mm_s":[500],"geometries_mm":[[0.2,0.1,0.05]]})"));
        Capture c1, c2;
        REQUIRE(run_sweep(cfg, full, dir / "full", c1.io()) == exit_ok);
        REQUIRE(run_sweep(cfg, sub, dir / "sub", c2.io()) == exit_ok);
        const auto rows = csv_rows(slurp(dir / "full/sweep.csv"));
        REQUIRE(rows.size() == 5);
        CHECK(rows[0] == "power_w,speed_mm_s,a_mm,b_mm,c_mm,length_mm,width_mm,depth_mm,peak_temperature_c,status");
        const auto sub_rows = csv_rows(slurp(dir / "sub/sweep.csv"));
        REQUIRE(sub_rows.size() == 2);
        CHECK(sub_rows[1] == rows[3]);
        CHECK(c1.out.str() == slurp(dir / "full/sweep.csv"));
    }

    TEST_CASE("sweep labels non-melting cells")
    {
        const fs::path dir = testing::scratch_dir("sweep_nomelt");
        const fs::path cfg = write(dir / "run.json", quick_config());
        const fs::path spec = write(
            dir / "spec.json", json::parse(R"({"powers_w":[5],"speeds_mm_s":[500],"geometries_mm":[[0.2,0.1,0.05]]})"));
        Capture c;
        REQUIRE(run_sweep(cfg, spec, dir, c.io()) == exit_ok);
        const auto rows = csv_rows(slurp(dir / "sweep.csv"));
        REQUIRE(rows.size() == 2);
        CHECK(rows[1].find("no-melt,no-melt,no-melt") != std::string::npos);
        CHECK(rows[1].substr(rows[1].size() - 7) == "no-melt");

        const fs::path empty = write(
            dir / "empty.json", json::parse(R"({"powers_w":[],"speeds_mm_s":[500],"geometries_mm":[[0.2,0.1,0.05]]})"));
        CHECK(run_sweep(cfg, empty, dir / "e", c.io()) == exit_config);
    }

    TEST_CASE("validate writes per-dimension MAPE; a missing dataset leaves no output")
    {
        const fs::path dir = testing::scratch_dir("validate");
        const fs::path cfg = write(dir / "run.json", quick_config());
        std::ofstream(dir / "data.csv") << "material,power_w,speed_mm_s,depth_um,width_um,length_um,source\n"
                                           "Ti-6Al-4V,150,500,60,180,400,a\n"
                                           "Ti-6Al-4V,150,500,62,175,390,a\n"
                                           "Ti-6Al-4V,-1,500,62,175,390,a\n";
        Capture c;
        REQUIRE(run_validate(cfg, dir / "data.csv", dir / "out", c.io()) == exit_ok);
        const json rep = json::parse(slurp(dir / "out/report.json"));
        CHECK(rep["mape_percent"].contains("length"));
        CHECK(rep["mape_percent"].contains("width"));
        CHECK(rep["mape_percent"].contains("depth"));
        CHECK(rep["records"] == 2);
        CHECK(rep["rejected_rows"].size() == 1);
        CHECK(fs::exists(dir / "out/report.txt"));

        CHECK(run_validate(cfg, dir / "absent.csv", dir / "none", c.io()) == exit_io);
        CHECK_FALSE(fs::exists(dir / "none"));
    }

    TEST_CASE("calibrate on collapsed bounds writes the report")
    {
        const fs::path dir = testing::scratch_dir("calibrate");
        json cfg_doc = quick_config();
        cfg_doc["numerics"]["grid_samples"] = 24;
        const fs::path cfg = write(dir / "run.json", cfg_doc);
        std::ofstream(dir / "data.csv") << "material,power_w,speed_mm_s,depth_um,width_um,length_um\n"
                                           "Ti-6Al-4V,150,500,60,180,400\n"
                                           "Ti-6Al-4V,200,500,70,200,450\n"
                                           "Ti-6Al-4V,150,700,50,150,350\n";
        const fs::path bounds =
            write(dir / "bounds.json", json::parse(R"({"a_mm":[0.2,0.2],"b_mm":[0.1,0.1],"c_mm":[0.05,0.05]})"));
        Capture c;
        REQUIRE(run_calibrate(cfg, dir / "data.csv", bounds, dir / "out", c.io()) == exit_ok);
        const json r = json::parse(slurp(dir / "out/calibration.json"));
        CHECK(r["geometry_mm"]["a_mm"].get<double>() == doctest::Approx(0.2));
        CHECK(r["evaluations"] == 1);
        CHECK(run_calibrate(cfg, dir / "absent.csv", bounds, dir / "none", c.io()) == exit_io);
        CHECK_FALSE(fs::exists(dir / "none"));
    }
}
