#pragma once

#include "luxplace/light_field.hpp"

namespace luxplace {

struct LightingParams {
    int rays_per_source = 384;   // must be >= 64
    int max_reflections = 1;
    double brightness_scale = 1.0;  // intensity of a full-brightness source at unit distance
    double hit_epsilon = 1e-3;      // meters; sphere-tracing hit tolerance
    double max_path = 0.0;          // meters; 0 = auto (5x workspace diagonal)
    double min_distance_clamp = 0.0;  // meters; 0 = auto (spacing/2)

    LightingParams with_reflections(int n) const {
        LightingParams p = *this;
        p.max_reflections = n;
        return p;
    }
};

// Ray-cast intensity field: rays leave each emitter at uniformly spaced
// angles, advance by sphere tracing against the obstacle SDF, reflect
// specularly at surfaces (attenuated by the obstacle reflectivity) and
// deposit inverse-square intensity into every free cell they traverse.
// Deposits are averaged per (source, bounce-count) class before summing,
// which keeps cell values independent of ray density.
//
// Parallel over sources with a deterministic per-source reduction order;
// output is bit-identical to render_field_serial.
LightField render_field(const EmitterConfig& emitters, const ObstacleSet& obstacles,
                        const GridMap& grid, const LightingParams& params);

// Single-threaded reference implementation, kept for tests and benchmarks.
LightField render_field_serial(const EmitterConfig& emitters, const ObstacleSet& obstacles,
                               const GridMap& grid, const LightingParams& params);

// The robot's forward model of its own emitters; same renderer, by
// convention invoked with max_reflections = 1.
LightField render_source_field(const EmitterConfig& config, const ObstacleSet& obstacles,
                               const GridMap& grid, const LightingParams& params);

double resolved_max_path(const GridMap& grid, const LightingParams& params);
double resolved_distance_clamp(const GridMap& grid, const LightingParams& params);

}  // namespace luxplace
