#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "meltsim/heat_source.hpp"
#include "meltsim/material.hpp"
#include "meltsim/quadrature.hpp"
#include "meltsim/vec3.hpp"

namespace meltsim {

/// One straight pass of the laser. The source starts at `start_position`
/// (z <= 0; 0 for a surface scan) at `start_time` and moves along the
/// in-plane unit vector `direction`.
struct TrackSegment {
    double start_time = 0.0;  // s
    Vec3 start_position;      // m
    Vec3 direction{1.0, 0.0, 0.0};
    double speed = 0.0;       // m/s
    double power = 0.0;       // W
    double duration = 0.0;    // s

    void validate() const;
    double end_time() const { return start_time + duration; }
    /// Source centre at time t, clamped to the segment's time span.
    Vec3 position_at(double t) const;
};

/// Parameters of a unidirectional raster: `tracks` parallel passes along +x,
/// each offset by `hatch_spacing` in +y, separated by `time_spacing` of idle
/// time. With `tracks_per_layer` > 0, earlier layers are pushed down by
/// `layer_thickness` per completed layer relative to the final one.
struct RasterSpec {
    int tracks = 1;
    double track_length = 0.0;   // m
    double speed = 0.0;          // m/s
    double power = 0.0;          // W
    double hatch_spacing = 0.0;  // m
    double time_spacing = 0.0;   // s
    double layer_thickness = 0.0; // m
    int tracks_per_layer = 0;
};

struct ScanPattern {
    std::vector<TrackSegment> segments;
    double hatch_spacing = 0.0;
    double time_spacing = 0.0;
    double layer_thickness = 0.0;

    void validate() const;
    double end_time() const;
    /// Position of the most recently started segment's source at time t.
    Vec3 source_position(double t) const;

    static ScanPattern raster(const RasterSpec& spec);
};

struct ThermalSample {
    double temperature = 0.0; // K
    int iterations_used = 0;
    bool converged = false;
    PropertyState properties;
};

struct FieldOptions {
    QuadratureOptions quadrature{1e-6, 0.0, 4000};
    double abs_tol_kelvin = 1e-8;
    double property_tolerance = 0.1; // K
    int max_property_iterations = 50;
    double relaxation = 0.5;
    /// When set, properties are frozen at this temperature and no
    /// self-consistency iteration takes place.
    std::optional<double> frozen_temperature;
};

/// Temperature rise (K) at `field` and time t from an instantaneous release
/// of `energy` J at `source` and `source_time`, in a half-space z <= 0 with an
/// adiabatic surface (image source mirrored about z = 0).
double point_source_temperature_rise(double energy, const Vec3& source, double source_time, const Vec3& field,
                                     double t, double alpha, double rho_c);

/// Temperature rise (K) from one segment with properties frozen at
/// (alpha, rho_c). Exact superposition building block.
double segment_temperature_rise(const TrackSegment& seg, const Vec3& point, double t, const HeatSourceGeometry& geom,
                                double absorptivity, double alpha, double rho_c, const FieldOptions& opt = {});

/// Damped fixed point T <- (1 - w) T + w g(T) on the probe temperature, with
/// an undamped first step. Stops when |g(T) - T| < tolerance.
ThermalSample resolve_properties_selfconsistent(double initial_temperature,
                                                const std::function<double(const PropertyState&)>& rise_evaluator,
                                                const Material& mat, const FieldOptions& opt = {});

/// Source moving along +x from the origin from t' = 0 at proc.speed.
ThermalSample single_track_temperature(const Vec3& point, double t, const HeatSourceGeometry& geom,
                                       const ProcessParameters& proc, const Material& mat, double absorptivity,
                                       const FieldOptions& opt = {});

/// Superposition over all segments; only proc.ambient is read from `proc`.
ThermalSample multi_track_temperature(const Vec3& point, double t, const ScanPattern& pattern,
                                      const HeatSourceGeometry& geom, const ProcessParameters& proc,
                                      const Material& mat, double absorptivity, const FieldOptions& opt = {});

/// Dimensionless moving-frame form: (1/sqrt(2 pi)) * integral over [0, upper]
/// of A1 / (sqrt(tau + u_a^2) sqrt(tau + u_b^2) sqrt(tau + u_c^2)).
double dimensionless_temperature(const DimensionlessGroups& groups, double xi, double psi, double lambda,
                                 double upper_limit, const QuadratureOptions& opt = {1e-8, 0.0, 4000});

} // namespace meltsim
