#include "luxplace/scenario.hpp"

#include "luxplace/rng.hpp"

namespace luxplace {
namespace {

Vec2 sample_point(std::mt19937_64& rng, const Aabb& box) {
    return {uniform_double(rng, box.min.x, box.max.x), uniform_double(rng, box.min.y, box.max.y)};
}

// Point uniform over the workspace but outside all obstacles.
Vec2 sample_free_point(std::mt19937_64& rng, const Aabb& ws, const ObstacleSet& obstacles,
                       int max_tries) {
    for (int i = 0; i < max_tries; ++i) {
        const Vec2 p = sample_point(rng, ws);
        if (obstacles.signed_distance(p) > 0.0) return p;
    }
    throw ScenarioError("scenario: could not sample a point outside obstacles");
}

ObstacleSet sample_obstacles(std::mt19937_64& rng, const Aabb& ws, int count,
                             const ScenarioGenParams& p) {
    std::vector<Obstacle> placed;
    placed.reserve(count);
    for (int i = 0; i < count; ++i) {
        bool ok = false;
        for (int attempt = 0; attempt < 100 && !ok; ++attempt) {
            const double hx = p.spacing * uniform_double(rng, p.obstacle_half_extent_min,
                                                         p.obstacle_half_extent_max);
            const double hy = p.spacing * uniform_double(rng, p.obstacle_half_extent_min,
                                                         p.obstacle_half_extent_max);
            const Vec2 c{uniform_double(rng, ws.min.x + hx, ws.max.x - hx),
                         uniform_double(rng, ws.min.y + hy, ws.max.y - hy)};
            const Aabb rect{{c.x - hx, c.y - hy}, {c.x + hx, c.y + hy}};
            bool overlaps = false;
            for (const auto& other : placed)
                if (rects_overlap(rect, other.rect)) overlaps = true;
            if (overlaps) continue;
            const double refl = uniform_double(rng, p.reflectivity_min, p.reflectivity_max);
            placed.push_back({rect, refl});
            ok = true;
        }
        if (!ok) throw ScenarioError("scenario: obstacle placement attempts exhausted");
    }
    return ObstacleSet(std::move(placed));
}

}  // namespace

const char* task_level_name(TaskLevel level) {
    switch (level) {
        case TaskLevel::A: return "A";
        case TaskLevel::B: return "B";
        case TaskLevel::C: return "C";
    }
    return "?";
}

TaskLevel task_level_from_string(const std::string& s) {
    if (s == "A" || s == "a") return TaskLevel::A;
    if (s == "B" || s == "b") return TaskLevel::B;
    if (s == "C" || s == "c") return TaskLevel::C;
    throw std::invalid_argument("unknown task level: " + s);
}

ScenarioCounts counts_for_level(TaskLevel level) {
    switch (level) {
        case TaskLevel::A: return {8, 40, 7, 10};
        case TaskLevel::B: return {12, 60, 9, 15};
        case TaskLevel::C: return {16, 70, 12, 20};
    }
    return {};
}

Scenario generate_scenario(std::uint64_t env_seed, std::uint64_t start_seed, TaskLevel level,
                           const ScenarioGenParams& params) {
    return generate_scenario_custom(env_seed, start_seed, level, counts_for_level(level), params);
}

Scenario generate_scenario_custom(std::uint64_t env_seed, std::uint64_t start_seed,
                                  TaskLevel level, const ScenarioCounts& counts,
                                  const ScenarioGenParams& params) {
    Scenario s;
    s.env_seed = env_seed;
    s.start_seed = start_seed;
    s.level = level;
    s.counts = counts;
    s.gen = params;
    s.max_steps = params.max_steps;
    s.sim_noise_sigma = params.sim_noise_sigma >= 0.0
                            ? params.sim_noise_sigma
                            : 0.01 * params.lighting.brightness_scale;

    const Aabb ws{{0.0, 0.0},
                  {params.width_cells * params.spacing, params.height_cells * params.spacing}};

    std::mt19937_64 env_rng(mix_seed(env_seed, 0x5c3a));

    // Obstacle layout must leave enough connected free space for the robot;
    // resample whole layouts until it does.
    bool placed = false;
    for (int attempt = 0; attempt < params.max_attempts && !placed; ++attempt) {
        try {
            s.obstacles = sample_obstacles(env_rng, ws, counts.num_obstacles, params);
        } catch (const ScenarioError&) {
            continue;
        }
        s.grid = GridMap(params.width_cells, params.height_cells, params.spacing, ws.min,
                         s.obstacles);
        const double free_fraction =
            static_cast<double>(s.grid.free_cells().size()) / s.grid.cell_count();
        if (free_fraction >= params.min_free_fraction && free_cells_connected(s.grid))
            placed = true;
    }
    if (!placed)
        throw ScenarioError("scenario: no obstacle layout satisfied the free-space constraints");

    s.target_emitters.reserve(counts.num_target);
    for (int i = 0; i < counts.num_target; ++i) {
        const double b =
            uniform_double(env_rng, params.target_brightness_min, params.target_brightness_max);
        s.target_emitters.push_back({sample_point(env_rng, ws), b});
    }

    // Unknown sources sit anywhere outside obstacles (they must be renderable
    // against the real obstacle set).
    s.unknown_emitters.reserve(counts.num_unknown);
    for (int i = 0; i < counts.num_unknown; ++i)
        s.unknown_emitters.push_back(
            {sample_free_point(env_rng, ws, s.obstacles, 10000), params.unknown_brightness});

    s.initial_config.reserve(counts.num_configured);
    for (int i = 0; i < counts.num_configured; ++i)
        s.initial_config.push_back(
            {sample_free_point(env_rng, ws, s.obstacles, 10000), params.initial_brightness});

    // Desired intensities come from the target sources in an obstacle-free
    // world; reflections are irrelevant there.
    const ObstacleSet no_obstacles;
    const GridMap open_grid(params.width_cells, params.height_cells, params.spacing, ws.min,
                            no_obstacles);
    s.desired = render_field(s.target_emitters, no_obstacles, open_grid,
                             params.lighting.with_reflections(0));

    s.unknown_truth = render_field(s.unknown_emitters, s.obstacles, s.grid, params.lighting);

    std::mt19937_64 start_rng(mix_seed(start_seed, 0x90b7));
    const auto& free = s.grid.free_cells();
    s.start_cell = free[uniform_index(start_rng, free.size())];

    return s;
}

LightField truth_source_field(const Scenario& scenario, const EmitterConfig& config) {
    return render_field(config, scenario.obstacles, scenario.grid, scenario.truth_lighting());
}

Measurement measure_from_field(const Scenario& scenario, const LightField& source_field,
                               const Cell& cell, int step, std::uint64_t noise_seed) {
    if (!scenario.grid.is_free(cell))
        throw std::invalid_argument("measure: cell is not a free grid position");
    double y = scenario.unknown_truth.at(cell) + source_field.at(cell);
    if (scenario.sim_noise_sigma > 0.0) {
        std::mt19937_64 rng(mix_seed(noise_seed, 0x3e11));
        y += gaussian(rng, 0.0, scenario.sim_noise_sigma);
    }
    return {step, cell, std::max(y, 0.0)};
}

Measurement measure(const Scenario& scenario, const EmitterConfig& config, const Cell& cell,
                    int step, std::uint64_t noise_seed) {
    return measure_from_field(scenario, truth_source_field(scenario, config), cell, step,
                              noise_seed);
}

}  // namespace luxplace
