#pragma once

// Boundary unit policy: files and the CLI speak mm, mm/s, um, degC and W;
// everything behind the boundary is SI.

namespace meltsim::units {

inline constexpr double kelvin_offset = 273.15;

constexpr double mm_to_m(double mm) { return mm * 1e-3; }
constexpr double m_to_mm(double m) { return m * 1e3; }
constexpr double um_to_m(double um) { return um * 1e-6; }
constexpr double m_to_um(double m) { return m * 1e6; }
constexpr double mm_per_s_to_m_per_s(double v) { return v * 1e-3; }
constexpr double m_per_s_to_mm_per_s(double v) { return v * 1e3; }
constexpr double celsius_to_kelvin(double c) { return c + kelvin_offset; }
constexpr double kelvin_to_celsius(double k) { return k - kelvin_offset; }

} // namespace meltsim::units
