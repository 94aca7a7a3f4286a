#pragma once

#include "meltsim/material.hpp"
#include "meltsim/quadrature.hpp"
#include "meltsim/vec3.hpp"

namespace meltsim {

/// Semi-axes of the Gaussian semi-ellipsoid (m): a along the scan
/// direction, b transverse half-width, c depth.
struct HeatSourceGeometry {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;

    void validate() const;
};

struct ProcessParameters {
    double power = 0.0;   // W
    double speed = 0.0;   // m/s
    double ambient = 0.0; // K

    void validate() const;
};

struct DimensionlessGroups {
    double u_a = 0.0;
    double u_b = 0.0;
    double u_c = 0.0;
    double n = 0.0;
    double tau = 0.0;
};

/// Volumetric flux (W/m^3) at `point`, given in the source-centred frame
/// with x along the scan, y transverse and z <= 0 into the body. Zero above
/// the surface.
double flux(const HeatSourceGeometry& geom, const ProcessParameters& proc, double absorptivity, const Vec3& point);

/// Numerical integral of `flux` over the half-space z <= 0 (W).
/// Throws QuadratureError if the nested integration fails.
double total_deposited_power(const HeatSourceGeometry& geom, const ProcessParameters& proc, double absorptivity,
                             const QuadratureOptions& opt = {1e-10, 0.0, 4000});

/// u_i = v * s_i / (2 sqrt(6) alpha), tau = v^2 (t_source - t_elapsed) / (2 alpha),
/// n = A P v / (4 pi alpha^2 rho C (T_m - T_0)) with C the modified heat
/// capacity at ambient.
DimensionlessGroups dimensionless_groups(const HeatSourceGeometry& geom, const ProcessParameters& proc, double alpha,
                                         const Material& mat, double t_elapsed, double t_source);

} // namespace meltsim
