#include "luxplace/lighting.hpp"

#include <cmath>
#include <stdexcept>

namespace luxplace {
namespace {

constexpr int kMaxMarchSteps = 10000;

struct LegEnd {
    double length = 0.0;
    bool hit = false;
    Vec2 point;
};

// Ray/box exit parameter for an origin inside the box.
double box_exit_t(const Aabb& box, const Vec2& o, const Vec2& d) {
    double t = std::numeric_limits<double>::infinity();
    if (d.x > 1e-15) t = std::min(t, (box.max.x - o.x) / d.x);
    if (d.x < -1e-15) t = std::min(t, (box.min.x - o.x) / d.x);
    if (d.y > 1e-15) t = std::min(t, (box.max.y - o.y) / d.y);
    if (d.y < -1e-15) t = std::min(t, (box.min.y - o.y) / d.y);
    return std::max(t, 0.0);
}

// Sphere tracing: advance by the SDF value until within hit_epsilon of a
// surface, the workspace boundary, or the path budget.
LegEnd march_leg(const ObstacleSet& obstacles, const Aabb& workspace, const Vec2& origin,
                 const Vec2& dir, double budget, double hit_epsilon) {
    const double t_exit = std::min(box_exit_t(workspace, origin, dir), budget);
    double t = 0.0;
    for (int i = 0; i < kMaxMarchSteps; ++i) {
        const Vec2 p = origin + dir * t;
        const double sd = obstacles.signed_distance(p);
        if (sd < hit_epsilon) return {t, true, p};
        const double to_exit = t_exit - t;
        if (to_exit <= 1e-12) return {t_exit, false, origin + dir * t_exit};
        t += std::min(sd, to_exit);
    }
    return {t, false, origin + dir * t};  // grazing stall; drop the remainder
}

struct SourceAccumulator {
    // Per cell and per ray class: running sum of deposits and the number of
    // depositing rays; averaging recovers an intensity independent of ray
    // density. A class is one coherent specular family: the ordered
    // sequence of obstacles the ray has reflected off (class 0 = direct).
    // Mixing families would average deposits with very different path
    // lengths and converge slowly.
    std::vector<double> sum;
    std::vector<std::uint32_t> count;
    std::unordered_map<std::uint64_t, int> class_of_sequence;
    int cells = 0;

    explicit SourceAccumulator(int cells_) : cells(cells_) { grow(); }

    int num_classes() const { return static_cast<int>(sum.size() / cells); }

    void grow() {
        sum.resize(sum.size() + cells, 0.0);
        count.resize(count.size() + cells, 0);
    }

    int class_for(std::uint64_t sequence_key) {
        if (sequence_key == 0) return 0;
        const auto [it, inserted] = class_of_sequence.try_emplace(sequence_key, num_classes());
        if (inserted) grow();
        return it->second;
    }
};

// Deposit one straight leg into every free cell it traverses
// (Amanatides-Woo traversal). The attenuation distance for a cell is the
// total path length from the source to the ray's closest approach to the
// cell center, clamped to this leg.
void deposit_leg(const GridMap& grid, const Vec2& start, const Vec2& dir, double leg_len,
                 double path_at_start, int ray_class, double weight, double dist_clamp,
                 SourceAccumulator& acc) {
    if (leg_len <= 0.0) return;
    const double s = grid.spacing();
    const Vec2 org = grid.origin();

    Cell cell = grid.cell_containing(start);
    const int step_col = dir.x > 0.0 ? 1 : -1;
    const int step_row = dir.y > 0.0 ? 1 : -1;

    const double inf = std::numeric_limits<double>::infinity();
    double t_max_x = inf, t_delta_x = inf;
    if (std::abs(dir.x) > 1e-15) {
        const double next_x = org.x + (cell.col + (step_col > 0 ? 1 : 0)) * s;
        t_max_x = (next_x - start.x) / dir.x;
        t_delta_x = s / std::abs(dir.x);
    }
    double t_max_y = inf, t_delta_y = inf;
    if (std::abs(dir.y) > 1e-15) {
        const double next_y = org.y + (cell.row + (step_row > 0 ? 1 : 0)) * s;
        t_max_y = (next_y - start.y) / dir.y;
        t_delta_y = s / std::abs(dir.y);
    }

    while (true) {
        if (grid.is_free(cell)) {
            const Vec2 center = grid.cell_center(cell);
            const double proj = (center - start).dot(dir);
            const double t_closest = std::clamp(proj, 0.0, leg_len);
            const double d = std::max(path_at_start + t_closest, dist_clamp);
            const std::size_t k =
                static_cast<std::size_t>(ray_class) * acc.cells + grid.index(cell);
            acc.sum[k] += weight / (d * d);
            acc.count[k] += 1;
        }
        double t_cross;
        if (t_max_x < t_max_y) {
            t_cross = t_max_x;
            cell.col += step_col;
            t_max_x += t_delta_x;
        } else {
            t_cross = t_max_y;
            cell.row += step_row;
            t_max_y += t_delta_y;
        }
        if (t_cross >= leg_len || !grid.in_bounds(cell)) break;
    }
}

void trace_source(const Emitter& emitter, const ObstacleSet& obstacles, const GridMap& grid,
                  const LightingParams& params, double max_path, double dist_clamp,
                  SourceAccumulator& acc) {
    const Aabb ws = grid.workspace();
    const double base_weight = emitter.brightness * params.brightness_scale;

    for (int k = 0; k < params.rays_per_source; ++k) {
        // half-step offset keeps rays off exact axis directions
        const double angle = 2.0 * M_PI * (k + 0.5) / params.rays_per_source;
        Vec2 origin = emitter.position;
        Vec2 dir{std::cos(angle), std::sin(angle)};
        double path = 0.0;
        double reflectivity_product = 1.0;
        std::uint64_t sequence_key = 0;  // ordered obstacle hits so far

        for (int bounce = 0; bounce <= params.max_reflections; ++bounce) {
            const double budget = max_path - path;
            if (budget <= 0.0) break;
            const LegEnd leg = march_leg(obstacles, ws, origin, dir, budget, params.hit_epsilon);
            deposit_leg(grid, origin, dir, leg.length, path, acc.class_for(sequence_key),
                        base_weight * reflectivity_product, dist_clamp, acc);
            path += leg.length;
            if (!leg.hit || bounce == params.max_reflections) break;

            const int hit_idx = obstacles.nearest_obstacle(leg.point);
            if (hit_idx < 0) break;
            reflectivity_product *= obstacles.obstacles()[hit_idx].reflectivity;
            if (reflectivity_product <= 0.0) break;
            sequence_key = sequence_key * 131 + static_cast<std::uint64_t>(hit_idx) + 1;

            const Vec2 n = obstacles.normal(leg.point, params.hit_epsilon);
            dir = dir - n * (2.0 * dir.dot(n));
            origin = leg.point + n * (2.0 * params.hit_epsilon);
            if (!ws.contains(origin)) break;
        }
    }
}

void add_source_contribution(const SourceAccumulator& acc, LightField& out) {
    const int classes = acc.classes;
    for (std::size_t c = 0; c < out.values.size(); ++c) {
        double v = 0.0;
        for (int b = 0; b < classes; ++b) {
            const std::size_t k = c * classes + b;
            if (acc.count[k] > 0) v += acc.sum[k] / acc.count[k];
        }
        out.values[c] += v;
    }
}

void validate_inputs(const EmitterConfig& emitters, const ObstacleSet& obstacles,
                     const GridMap& grid, const LightingParams& params) {
    if (params.rays_per_source < 64)
        throw std::invalid_argument("lighting: rays_per_source must be >= 64");
    const Aabb ws = grid.workspace();
    for (const auto& e : emitters) {
        if (!ws.contains(e.position))
            throw std::runtime_error("lighting: emitter outside workspace");
        if (obstacles.signed_distance(e.position) <= 0.0)
            throw std::runtime_error("lighting: emitter inside obstacle");
    }
}

}  // namespace

double resolved_max_path(const GridMap& grid, const LightingParams& params) {
    return params.max_path > 0.0 ? params.max_path : 5.0 * grid.workspace().diagonal();
}

double resolved_distance_clamp(const GridMap& grid, const LightingParams& params) {
    return params.min_distance_clamp > 0.0 ? params.min_distance_clamp : 0.5 * grid.spacing();
}

LightField render_field_serial(const EmitterConfig& emitters, const ObstacleSet& obstacles,
                               const GridMap& grid, const LightingParams& params) {
    validate_inputs(emitters, obstacles, grid, params);
    const double max_path = resolved_max_path(grid, params);
    const double clamp = resolved_distance_clamp(grid, params);

    LightField out(grid);
    SourceAccumulator acc(grid.cell_count(), params.max_reflections + 1);
    for (const auto& emitter : emitters) {
        acc.reset();
        trace_source(emitter, obstacles, grid, params, max_path, clamp, acc);
        add_source_contribution(acc, out);
    }
    return out;
}

LightField render_field(const EmitterConfig& emitters, const ObstacleSet& obstacles,
                        const GridMap& grid, const LightingParams& params) {
    validate_inputs(emitters, obstacles, grid, params);
    const double max_path = resolved_max_path(grid, params);
    const double clamp = resolved_distance_clamp(grid, params);

    const int n = static_cast<int>(emitters.size());
    std::vector<SourceAccumulator> per_source(
        static_cast<std::size_t>(n), SourceAccumulator(grid.cell_count(), params.max_reflections + 1));

#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i)
        trace_source(emitters[i], obstacles, grid, params, max_path, clamp, per_source[i]);

    // reduce in source order so the result matches the serial path bit for bit
    LightField out(grid);
    for (int i = 0; i < n; ++i) add_source_contribution(per_source[i], out);
    return out;
}

LightField render_source_field(const EmitterConfig& config, const ObstacleSet& obstacles,
                               const GridMap& grid, const LightingParams& params) {
    return render_field(config, obstacles, grid, params);
}

}  // namespace luxplace
