#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "luxplace/lighting.hpp"

namespace luxplace {

enum class TaskLevel { A, B, C };

const char* task_level_name(TaskLevel level);
TaskLevel task_level_from_string(const std::string& s);

struct ScenarioCounts {
    int num_obstacles = 0;
    int num_unknown = 0;
    int num_target = 0;
    int num_configured = 0;
};

// Obstacle / emitter counts per task complexity level.
ScenarioCounts counts_for_level(TaskLevel level);

// Knobs for the parts of scenario generation the problem statement leaves
// open; defaults are tuned so rejection sampling converges quickly.
struct ScenarioGenParams {
    int width_cells = 13;
    int height_cells = 13;
    double spacing = 0.35;  // meters
    double obstacle_half_extent_min = 0.4;   // in units of spacing
    double obstacle_half_extent_max = 1.1;   // in units of spacing
    double reflectivity_min = 0.1;
    double reflectivity_max = 0.9;
    double target_brightness_min = 0.7;
    double target_brightness_max = 1.0;
    double unknown_brightness = 0.5;   // unknown sources run at half brightness
    double initial_brightness = 0.5;
    double min_free_fraction = 0.6;
    int max_attempts = 500;
    int max_steps = 100;
    double sim_noise_sigma = -1.0;  // < 0 = auto (0.01 * brightness_scale)
    LightingParams lighting;        // brightness scale, rays, epsilons

    ScenarioGenParams() { lighting.max_reflections = 5; }
};

struct Measurement {
    int step = 0;
    Cell cell;
    double value = 0.0;
};

// A fully specified world: deterministic function of (env_seed, start_seed,
// task_level). Immutable after generation; safe to share across threads.
struct Scenario {
    std::uint64_t env_seed = 0;
    std::uint64_t start_seed = 0;
    TaskLevel level = TaskLevel::A;
    ScenarioCounts counts;
    ScenarioGenParams gen;

    ObstacleSet obstacles;
    GridMap grid;
    EmitterConfig target_emitters;   // generated the desired field (obstacle-free render)
    EmitterConfig unknown_emitters;  // background sources hidden from the robot
    EmitterConfig initial_config;    // the robot's starting emitter placement
    LightField desired;              // intensity the robot must reproduce
    LightField unknown_truth;        // ground-truth background field (cached)
    Cell start_cell;
    int max_steps = 100;
    double sim_noise_sigma = 0.01;

    LightingParams truth_lighting() const { return gen.lighting; }
};

struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Scenario generate_scenario(std::uint64_t env_seed, std::uint64_t start_seed, TaskLevel level,
                           const ScenarioGenParams& params = {});

// Custom counts, used by tests to probe over-constrained setups.
Scenario generate_scenario_custom(std::uint64_t env_seed, std::uint64_t start_seed,
                                  TaskLevel level, const ScenarioCounts& counts,
                                  const ScenarioGenParams& params);

// Ground-truth source field for a configuration (5-reflection render).
LightField truth_source_field(const Scenario& scenario, const EmitterConfig& config);

// One noisy intensity reading: unknown field + source field + N(0, sigma^2),
// clamped at zero. Pure given its noise seed.
Measurement measure(const Scenario& scenario, const EmitterConfig& config, const Cell& cell,
                    int step, std::uint64_t noise_seed);

// Same contract, but against a pre-rendered source field (one render per
// configuration epoch instead of one per step).
Measurement measure_from_field(const Scenario& scenario, const LightField& source_field,
                               const Cell& cell, int step, std::uint64_t noise_seed);

}  // namespace luxplace
