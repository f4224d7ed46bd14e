#pragma once

#include <cstdint>

#include "luxplace/lighting.hpp"

namespace luxplace {

// Inputs of one emitter-placement optimization: match the desired field
// with the forward-modeled source field on top of the estimated unknown
// light, subject to workspace/obstacle/brightness constraints.
struct PlacementProblem {
    const LightField* desired = nullptr;
    const LightField* unknown_estimate = nullptr;  // clamped at zero before use
    const ObstacleSet* obstacles = nullptr;
    const GridMap* grid = nullptr;
    LightingParams render_params;  // the robot's 1-reflection model
    int num_emitters = 1;
    bool optimize_brightness = true;  // false: positions only, brightness fixed
    double penalty_weight = 0.0;      // 0 = auto: 1e3 * P * |free cells|
};

struct PlacementResult {
    EmitterConfig config;
    double objective = 0.0;
    int evaluations = 0;
    bool feasible_found = true;  // false: every candidate was penalized, result projected
};

// Sum of absolute intensity errors over free cells, plus penalties that
// dominate any attainable intensity error for emitters inside obstacles or
// outside the workspace. Brightness is clamped to [0,1] before rendering.
double placement_objective(const EmitterConfig& candidate, const PlacementProblem& problem);

// Nelder-Mead over emitter coordinates (and brightnesses unless fixed).
// The evaluation budget is shared between a restart from the incumbent and
// one from a seeded random feasible configuration; returns the best
// feasible configuration seen. Emitters are projected out of obstacles as a
// final safeguard. Deterministic for a fixed seed and budget.
PlacementResult optimize_placement(const PlacementProblem& problem, const EmitterConfig& init,
                                   int budget, std::uint64_t seed);

// Nearest point outside every obstacle and inside the workspace.
Vec2 project_to_free_space(const Vec2& p, const ObstacleSet& obstacles, const Aabb& workspace);

}  // namespace luxplace
