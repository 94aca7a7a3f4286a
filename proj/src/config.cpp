#include "meltsim/config.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <regex>
#include <string_view>

#include "meltsim/errors.hpp"
#include "meltsim/units.hpp"

namespace meltsim {

using nlohmann::json;

namespace {

const json& section(const json& doc, const char* name, bool required)
{
    static const json empty = json::object();
    if (!doc.contains(name)) {
        if (required)
            throw ConfigError(std::string("missing section '") + name + "'");
        return empty;
    }
    const json& s = doc.at(name);
    if (!s.is_object())
        throw ConfigError(std::string("section '") + name + "' must be an object");
    return s;
}

// A misspelt or misplaced key would otherwise be silently ignored.
void allow_only(const json& obj, const char* where, std::initializer_list<std::string_view> keys)
{
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (std::string_view k : keys)
            known = known || k == key;
        if (!known)
            throw ConfigError(std::string("unknown key '") + key + "' in " + where);
    }
}

std::string path_of(const char* sec, const char* key)
{
    return std::string(sec) + "." + key;
}

double number(const json& s, const char* sec, const char* key)
{
    if (!s.contains(key))
        throw ConfigError("missing field '" + path_of(sec, key) + "'");
    const json& v = s.at(key);
    if (!v.is_number())
        throw ConfigError("field '" + path_of(sec, key) + "' must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x))
        throw ConfigError("field '" + path_of(sec, key) + "' must be finite");
    return x;
}

double number_or(const json& s, const char* sec, const char* key, double fallback)
{
    return s.contains(key) ? number(s, sec, key) : fallback;
}

int integer_or(const json& s, const char* sec, const char* key, int fallback)
{
    if (!s.contains(key))
        return fallback;
    const json& v = s.at(key);
    if (!v.is_number_integer())
        throw ConfigError("field '" + path_of(sec, key) + "' must be an integer");
    return v.get<int>();
}

std::optional<std::array<double, 2>> range_or_empty(const json& s, const char* sec, const char* key)
{
    if (!s.contains(key))
        return std::nullopt;
    const json& v = s.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw ConfigError("field '" + path_of(sec, key) + "' must be [lo, hi]");
    std::array<double, 2> r{v[0].get<double>(), v[1].get<double>()};
    if (!(std::isfinite(r[0]) && std::isfinite(r[1]) && r[1] > r[0]))
        throw ConfigError("field '" + path_of(sec, key) + "' must satisfy lo < hi");
    return r;
}

void require(bool ok, const std::string& message)
{
    if (!ok)
        throw ConfigError(message);
}

std::vector<double> positive_list(const json& doc, const char* key)
{
    if (!doc.contains(key) || !doc.at(key).is_array())
        throw ConfigError(std::string("sweep spec needs a list '") + key + "'");
    std::vector<double> out;
    for (const auto& v : doc.at(key)) {
        if (!v.is_number() || !(v.get<double>() > 0.0) || !std::isfinite(v.get<double>()))
            throw ConfigError(std::string("sweep spec '") + key + "' entries must be positive numbers");
        out.push_back(v.get<double>());
    }
    if (out.empty())
        throw ConfigError(std::string("sweep spec '") + key + "' is empty");
    return out;
}

std::array<double, 3> geometry_triple(const json& v, const std::string& where)
{
    std::array<double, 3> g{};
    if (v.is_array() && v.size() == 3) {
        for (int i = 0; i < 3; ++i) {
            if (!v[i].is_number())
                throw ConfigError(where + " must contain numbers");
            g[i] = v[i].get<double>();
        }
    } else if (v.is_object()) {
        const char* keys[] = {"a_mm", "b_mm", "c_mm"};
        for (int i = 0; i < 3; ++i)
            g[i] = number(v, where.c_str(), keys[i]);
    } else {
        throw ConfigError(where + " must be [a, b, c] or {a_mm, b_mm, c_mm}");
    }
    for (double x : g)
        require(x > 0.0 && std::isfinite(x), where + " semi-axes must be positive");
    return g;
}

} // namespace

void SimulationConfig::validate() const
{
    try {
        material.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("material: ") + e.what());
    }
    if (absorptivity)
        require(*absorptivity > 0.0 && *absorptivity <= 1.0, "process.absorptivity must lie in (0, 1]");
    for (double x : geometry_mm)
        require(x > 0.0, "geometry semi-axes must be positive");
    require(power_w > 0.0, "process.power_w must be positive");
    require(speed_mm_s > 0.0, "process.speed_mm_s must be positive");
    const double ambient_k = units::celsius_to_kelvin(ambient_c);
    require(ambient_k > 0.0, "process.ambient_c must be above absolute zero");
    require(ambient_k < material.t_solidus,
            "process.ambient_c must be below the solidus temperature of " + material.name);
    if (spot_diameter_mm)
        require(*spot_diameter_mm > 0.0, "process.spot_diameter_mm must be positive");
    require(segments >= 1, "scan.segments must be at least 1");
    require(segment_length_mm > 0.0, "scan.segment_length_mm must be positive");
    require(segments == 1 || hatch_um > 0.0, "scan.hatch_um must be positive");
    require(hatch_um >= 0.0, "scan.hatch_um must not be negative");
    require(time_spacing_s >= 0.0, "scan.time_spacing_s must not be negative");
    require(layer_thickness_um >= 0.0, "scan.layer_thickness_um must not be negative");
    require(tracks_per_layer >= 0, "scan.tracks_per_layer must not be negative");
    if (probe_time_s)
        require(*probe_time_s > 0.0, "probe.time_s must be positive or \"end\"");
    require(rel_tol > 0.0 && rel_tol < 1.0, "numerics.rel_tol must lie in (0, 1)");
    require(abs_tol_k >= 0.0, "numerics.abs_tol_k must not be negative");
    require(max_panels >= 1, "numerics.max_panels must be at least 1");
    require(property_tolerance_k > 0.0, "numerics.property_tolerance_k must be positive");
    require(max_property_iterations >= 1, "numerics.max_property_iterations must be at least 1");
    require(relaxation > 0.0 && relaxation <= 1.0, "numerics.relaxation must lie in (0, 1]");
    require(grid_samples >= 4, "numerics.grid_samples must be at least 4");
    require(bisection_tolerance_um > 0.0, "numerics.bisection_tolerance_um must be positive");
    require(max_box_doublings >= 0, "numerics.max_box_doublings must not be negative");
    require(contour_resolution[0] >= 2 && contour_resolution[1] >= 2, "output.contour_resolution must be at least 2x2");
}

SimulationSetup SimulationConfig::to_setup() const
{
    SimulationSetup s;
    s.material = material;
    s.geometry = {units::mm_to_m(geometry_mm[0]), units::mm_to_m(geometry_mm[1]), units::mm_to_m(geometry_mm[2])};
    s.absorptivity = absorptivity.value_or(material.absorptivity);
    s.ambient = units::celsius_to_kelvin(ambient_c);
    s.raster.tracks = segments;
    s.raster.track_length = units::mm_to_m(segment_length_mm);
    s.raster.speed = units::mm_per_s_to_m_per_s(speed_mm_s);
    s.raster.power = power_w;
    s.raster.hatch_spacing = units::um_to_m(hatch_um);
    s.raster.time_spacing = time_spacing_s;
    s.raster.layer_thickness = units::um_to_m(layer_thickness_um);
    s.raster.tracks_per_layer = tracks_per_layer;
    s.probe_time = probe_time_s;
    s.field.quadrature = {rel_tol, 0.0, max_panels};
    s.field.abs_tol_kelvin = abs_tol_k;
    s.field.property_tolerance = property_tolerance_k;
    s.field.max_property_iterations = max_property_iterations;
    s.field.relaxation = relaxation;
    s.extraction.samples_per_axis = grid_samples;
    s.extraction.bisection_tolerance = units::um_to_m(bisection_tolerance_um);
    s.extraction.max_box_doublings = max_box_doublings;
    return s;
}

json SimulationConfig::to_json() const
{
    json process = {{"power_w", power_w}, {"speed_mm_s", speed_mm_s}, {"ambient_c", ambient_c}};
    if (absorptivity)
        process["absorptivity"] = *absorptivity;
    if (spot_diameter_mm)
        process["spot_diameter_mm"] = *spot_diameter_mm;
    json output = {{"dir", output_dir}, {"contour_resolution", contour_resolution}};
    if (contour_u_mm)
        output["contour_u_mm"] = *contour_u_mm;
    if (contour_v_mm)
        output["contour_v_mm"] = *contour_v_mm;
    return {
        {"schema_version", config_schema_version},
        {"material", {{"file", material_file}, {"resolved", material_to_json(material)}}},
        {"geometry", {{"a_mm", geometry_mm[0]}, {"b_mm", geometry_mm[1]}, {"c_mm", geometry_mm[2]}}},
        {"process", process},
        {"scan",
         {{"segments", segments},
          {"segment_length_mm", segment_length_mm},
          {"hatch_um", hatch_um},
          {"time_spacing_s", time_spacing_s},
          {"layer_thickness_um", layer_thickness_um},
          {"tracks_per_layer", tracks_per_layer}}},
        {"probe", {{"time_s", probe_time_s ? json(*probe_time_s) : json("end")}}},
        {"numerics",
         {{"rel_tol", rel_tol},
          {"abs_tol_k", abs_tol_k},
          {"max_panels", max_panels},
          {"property_tolerance_k", property_tolerance_k},
          {"max_property_iterations", max_property_iterations},
          {"relaxation", relaxation},
          {"grid_samples", grid_samples},
          {"bisection_tolerance_um", bisection_tolerance_um},
          {"max_box_doublings", max_box_doublings}}},
        {"output", output},
    };
}

std::string SimulationConfig::hash() const
{
    return fnv1a_hex(to_json().dump());
}

SimulationConfig config_from_json(const json& doc, const std::filesystem::path& base_dir)
{
    if (!doc.is_object())
        throw ConfigError("config must be a JSON object");
    if (doc.contains("schema_version")) {
        const json& v = doc.at("schema_version");
        if (!v.is_number_integer() || v.get<int>() != config_schema_version)
            throw ConfigError("unsupported config schema_version");
    }

    allow_only(doc, "config", {"schema_version", "material", "geometry", "process", "scan", "probe", "numerics", "output"});

    SimulationConfig c;
    const json& mat = section(doc, "material", true);
    allow_only(mat, "material", {"file", "resolved"});
    if (mat.contains("file")) {
        if (!mat.at("file").is_string())
            throw ConfigError("material.file must be a string");
        c.material_file = mat.at("file").get<std::string>();
        std::filesystem::path p(c.material_file);
        if (p.is_relative())
            p = base_dir / p;
        c.material = load_material(p);
    } else if (mat.contains("resolved")) {
        c.material = material_from_json(mat.at("resolved"));
    } else {
        throw ConfigError("material section needs 'file'");
    }

    const json& geo = section(doc, "geometry", true);
    allow_only(geo, "geometry", {"a_mm", "b_mm", "c_mm"});
    c.geometry_mm = {number(geo, "geometry", "a_mm"), number(geo, "geometry", "b_mm"), number(geo, "geometry", "c_mm")};

    const json& proc = section(doc, "process", true);
    allow_only(proc, "process", {"power_w", "speed_mm_s", "ambient_c", "absorptivity", "spot_diameter_mm"});
    c.power_w = number(proc, "process", "power_w");
    c.speed_mm_s = number(proc, "process", "speed_mm_s");
    c.ambient_c = number_or(proc, "process", "ambient_c", c.ambient_c);
    if (proc.contains("absorptivity"))
        c.absorptivity = number(proc, "process", "absorptivity");
    if (proc.contains("spot_diameter_mm"))
        c.spot_diameter_mm = number(proc, "process", "spot_diameter_mm");

    const json& scan = section(doc, "scan", false);
    allow_only(scan, "scan",
               {"segments", "segment_length_mm", "hatch_um", "time_spacing_s", "layer_thickness_um", "tracks_per_layer"});
    c.segments = integer_or(scan, "scan", "segments", c.segments);
    c.segment_length_mm = number_or(scan, "scan", "segment_length_mm", c.segment_length_mm);
    c.hatch_um = number_or(scan, "scan", "hatch_um", c.hatch_um);
    c.time_spacing_s = number_or(scan, "scan", "time_spacing_s", c.time_spacing_s);
    c.layer_thickness_um = number_or(scan, "scan", "layer_thickness_um", c.layer_thickness_um);
    c.tracks_per_layer = integer_or(scan, "scan", "tracks_per_layer", c.tracks_per_layer);

    const json& probe = section(doc, "probe", false);
    allow_only(probe, "probe", {"time_s"});
    if (probe.contains("time_s")) {
        const json& t = probe.at("time_s");
        if (t.is_string()) {
            if (t.get<std::string>() != "end")
                throw ConfigError("probe.time_s must be a number or \"end\"");
        } else {
            c.probe_time_s = number(probe, "probe", "time_s");
        }
    }

    const json& num = section(doc, "numerics", false);
    allow_only(num, "numerics",
               {"rel_tol", "abs_tol_k", "max_panels", "property_tolerance_k", "max_property_iterations", "relaxation",
                "grid_samples", "bisection_tolerance_um", "max_box_doublings"});
    c.rel_tol = number_or(num, "numerics", "rel_tol", c.rel_tol);
    c.abs_tol_k = number_or(num, "numerics", "abs_tol_k", c.abs_tol_k);
    c.max_panels = integer_or(num, "numerics", "max_panels", c.max_panels);
    c.property_tolerance_k = number_or(num, "numerics", "property_tolerance_k", c.property_tolerance_k);
    c.max_property_iterations = integer_or(num, "numerics", "max_property_iterations", c.max_property_iterations);
    c.relaxation = number_or(num, "numerics", "relaxation", c.relaxation);
    c.grid_samples = integer_or(num, "numerics", "grid_samples", c.grid_samples);
    c.bisection_tolerance_um = number_or(num, "numerics", "bisection_tolerance_um", c.bisection_tolerance_um);
    c.max_box_doublings = integer_or(num, "numerics", "max_box_doublings", c.max_box_doublings);

    const json& out = section(doc, "output", false);
    allow_only(out, "output", {"dir", "contour_resolution", "contour_u_mm", "contour_v_mm"});
    if (out.contains("dir")) {
        if (!out.at("dir").is_string())
            throw ConfigError("output.dir must be a string");
        c.output_dir = out.at("dir").get<std::string>();
    }
    if (out.contains("contour_resolution")) {
        const json& r = out.at("contour_resolution");
        if (!r.is_array() || r.size() != 2 || !r[0].is_number_integer() || !r[1].is_number_integer())
            throw ConfigError("output.contour_resolution must be [N, M]");
        c.contour_resolution = {r[0].get<int>(), r[1].get<int>()};
    }
    c.contour_u_mm = range_or_empty(out, "output", "contour_u_mm");
    c.contour_v_mm = range_or_empty(out, "output", "contour_v_mm");

    c.validate();
    return c;
}

json read_json_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

SimulationConfig load_config(const std::filesystem::path& path)
{
    const json doc = read_json_file(path);
    try {
        return config_from_json(doc, path.parent_path());
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

void SweepSpec::validate() const
{
    require(!powers_w.empty(), "sweep spec 'powers_w' is empty");
    require(!speeds_mm_s.empty(), "sweep spec 'speeds_mm_s' is empty");
    require(!geometries_mm.empty(), "sweep spec 'geometries_mm' is empty");
}

SweepSpec sweep_spec_from_json(const json& doc)
{
    if (!doc.is_object())
        throw ConfigError("sweep spec must be a JSON object");
    SweepSpec s;
    s.powers_w = positive_list(doc, "powers_w");
    s.speeds_mm_s = positive_list(doc, "speeds_mm_s");
    if (!doc.contains("geometries_mm") || !doc.at("geometries_mm").is_array())
        throw ConfigError("sweep spec needs a list 'geometries_mm'");
    for (const auto& g : doc.at("geometries_mm"))
        s.geometries_mm.push_back(geometry_triple(g, "geometries_mm entry"));
    s.validate();
    return s;
}

SweepSpec load_sweep_spec(const std::filesystem::path& path)
{
    return sweep_spec_from_json(read_json_file(path));
}

GeometryBounds bounds_from_json(const json& doc)
{
    if (!doc.is_object())
        throw ConfigError("bounds must be a JSON object");
    GeometryBounds b;
    const char* keys[] = {"a_mm", "b_mm", "c_mm"};
    std::array<double, 2>* slots[] = {&b.a, &b.b, &b.c};
    for (int i = 0; i < 3; ++i) {
        if (!doc.contains(keys[i]))
            throw ConfigError(std::string("bounds need '") + keys[i] + "'");
        const json& v = doc.at(keys[i]);
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
            throw ConfigError(std::string("bounds '") + keys[i] + "' must be [lo, hi]");
        *slots[i] = {units::mm_to_m(v[0].get<double>()), units::mm_to_m(v[1].get<double>())};
    }
    try {
        b.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return b;
}

GeometryBounds load_bounds(const std::filesystem::path& path)
{
    return bounds_from_json(read_json_file(path));
}

std::array<int, 2> parse_resolution(const std::string& text)
{
    static const std::regex pattern(R"(^\s*(\d{1,5})\s*[xX]\s*(\d{1,5})\s*$)");
    std::smatch m;
    if (!std::regex_match(text, m, pattern))
        throw ConfigError("resolution must look like NxM, got '" + text + "'");
    const std::array<int, 2> r{std::stoi(m[1]), std::stoi(m[2])};
    require(r[0] >= 2 && r[1] >= 2, "resolution must be at least 2x2");
    return r;
}

std::string fnv1a_hex(const std::string& bytes)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace meltsim
