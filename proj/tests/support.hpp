#pragma once

#include <filesystem>
#include <string>

#include "meltsim/material.hpp"
#include "meltsim/simulation.hpp"

namespace testing {

inline std::filesystem::path source_dir() { return MELTSIM_SOURCE_DIR; }

inline meltsim::Material ti64() { return meltsim::load_material(source_dir() / "data/materials/ti6al4v.json"); }

/// Ti-6Al-4V-like material with temperature-independent properties.
inline meltsim::Material constant_material(double conductivity = 15.0, double specific_heat = 650.0,
                                           double latent_heat = 0.0)
{
    meltsim::Material m;
    m.name = "constant";
    m.density = 4430.0;
    m.latent_heat_fusion = latent_heat;
    m.t_solidus = 1878.0;
    m.t_liquidus = 1928.0;
    m.t_melt = 1903.0;
    m.absorptivity = 0.5;
    m.conductivity = meltsim::PropertyTable::constant(conductivity);
    m.specific_heat = meltsim::PropertyTable::constant(specific_heat);
    return m;
}

/// A single-track setup that runs in well under a second.
inline meltsim::SimulationSetup quick_setup(const meltsim::Material& mat, meltsim::HeatSourceGeometry geom)
{
    meltsim::SimulationSetup s;
    s.material = mat;
    s.geometry = geom;
    s.absorptivity = 0.5;
    s.ambient = 298.15;
    s.raster.tracks = 1;
    s.raster.track_length = 1.0e-3;
    s.field.quadrature.rel_tol = 1e-5;
    s.extraction.samples_per_axis = 32;
    return s;
}

/// Fresh empty directory under the system temp directory.
inline std::filesystem::path scratch_dir(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / ("meltsim_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace testing
