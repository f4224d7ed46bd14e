#include "luxplace/placement.hpp"

#include <cmath>

#include "luxplace/optim.hpp"
#include "luxplace/rng.hpp"

namespace luxplace {
namespace {

double resolved_penalty_weight(const PlacementProblem& p) {
    if (p.penalty_weight > 0.0) return p.penalty_weight;
    return 1e3 * p.render_params.brightness_scale *
           static_cast<double>(p.grid->free_cells().size());
}

bool emitter_feasible(const Vec2& pos, const PlacementProblem& p) {
    return p.grid->workspace().contains(pos) && p.obstacles->signed_distance(pos) > 0.0;
}

int coords_per_emitter(const PlacementProblem& p) { return p.optimize_brightness ? 3 : 2; }

EmitterConfig decode(const std::vector<double>& x, const PlacementProblem& p,
                     const EmitterConfig& base) {
    const int k = coords_per_emitter(p);
    EmitterConfig config(p.num_emitters);
    for (int i = 0; i < p.num_emitters; ++i) {
        config[i].position = {x[i * k], x[i * k + 1]};
        const double b = p.optimize_brightness ? x[i * k + 2] : base[i].brightness;
        config[i].brightness = std::clamp(b, 0.0, 1.0);
    }
    return config;
}

std::vector<double> encode(const EmitterConfig& config, const PlacementProblem& p) {
    const int k = coords_per_emitter(p);
    std::vector<double> x(static_cast<std::size_t>(p.num_emitters) * k);
    for (int i = 0; i < p.num_emitters; ++i) {
        x[i * k] = config[i].position.x;
        x[i * k + 1] = config[i].position.y;
        if (p.optimize_brightness) x[i * k + 2] = config[i].brightness;
    }
    return x;
}

}  // namespace

Vec2 project_to_free_space(const Vec2& p, const ObstacleSet& obstacles, const Aabb& workspace) {
    Vec2 q{std::clamp(p.x, workspace.min.x, workspace.max.x),
           std::clamp(p.y, workspace.min.y, workspace.max.y)};
    for (int i = 0; i < 16; ++i) {
        const double sd = obstacles.signed_distance(q);
        if (sd > 1e-9) return q;
        const Vec2 n = obstacles.normal(q, 1e-4);
        q = q + n * (-sd + 1e-3);
        q.x = std::clamp(q.x, workspace.min.x, workspace.max.x);
        q.y = std::clamp(q.y, workspace.min.y, workspace.max.y);
    }
    return q;
}

double placement_objective(const EmitterConfig& candidate, const PlacementProblem& problem) {
    if (static_cast<int>(candidate.size()) != problem.num_emitters)
        throw std::invalid_argument("placement_objective: emitter count mismatch");
    const double w = resolved_penalty_weight(problem);
    const Aabb ws = problem.grid->workspace();

    double penalty = 0.0;
    EmitterConfig renderable = candidate;
    for (auto& e : renderable) {
        e.brightness = std::clamp(e.brightness, 0.0, 1.0);
        penalty += w * std::max(0.0, -problem.obstacles->signed_distance(e.position));
        penalty += w * ws.exterior_distance(e.position);
        // the renderer requires feasible emitters; the penalty keeps the
        // violation visible to the optimizer
        if (!emitter_feasible(e.position, problem))
            e.position = project_to_free_space(e.position, *problem.obstacles, ws);
    }

    const LightField source =
        render_source_field(renderable, *problem.obstacles, *problem.grid, problem.render_params);
    double error = 0.0;
    for (const Cell& c : problem.grid->free_cells()) {
        const double predicted = std::max(problem.unknown_estimate->at(c), 0.0) + source.at(c);
        error += std::abs(problem.desired->at(c) - predicted);
    }
    return error + penalty;
}

PlacementResult optimize_placement(const PlacementProblem& problem, const EmitterConfig& init,
                                   int budget, std::uint64_t seed) {
    if (static_cast<int>(init.size()) != problem.num_emitters)
        throw std::invalid_argument("optimize_placement: init emitter count mismatch");
    const int k = coords_per_emitter(problem);
    const int dim = problem.num_emitters * k;
    if (budget < dim + 1)
        throw std::invalid_argument("optimize_placement: budget below dimension + 1");

    PlacementResult result;
    result.feasible_found = false;
    double best_feasible = std::numeric_limits<double>::infinity();
    int total_evals = 0;

    auto consider = [&](const EmitterConfig& config, double value) {
        for (const auto& e : config)
            if (!emitter_feasible(e.position, problem)) return;
        if (value < best_feasible) {
            best_feasible = value;
            result.config = config;
            result.objective = value;
            result.feasible_found = true;
        }
    };

    auto objective = [&](const std::vector<double>& x) {
        const EmitterConfig config = decode(x, problem, init);
        const double value = placement_objective(config, problem);
        consider(config, value);
        return value;
    };

    std::vector<double> step(static_cast<std::size_t>(dim));
    for (int i = 0; i < problem.num_emitters; ++i) {
        step[i * k] = 0.5 * problem.grid->spacing();
        step[i * k + 1] = 0.5 * problem.grid->spacing();
        if (problem.optimize_brightness) step[i * k + 2] = 0.1;
    }

    // restart from the incumbent, then from a random feasible configuration;
    // the budget is shared, half each when it allows both
    consider(init, placement_objective(init, problem));
    ++total_evals;

    NelderMeadOptions options;
    options.max_evaluations = std::min(budget - total_evals, std::max(budget / 2, dim + 1));
    std::vector<double> last_x = encode(init, problem);
    if (options.max_evaluations >= dim + 1) {
        auto run = nelder_mead(objective, last_x, step, options);
        total_evals += run.evaluations;
        last_x = run.x;
    }

    const Aabb ws = problem.grid->workspace();
    if (budget - total_evals >= dim + 1) {
        std::mt19937_64 rng(mix_seed(seed, 0x91ac));
        EmitterConfig random_start(problem.num_emitters);
        for (int i = 0; i < problem.num_emitters; ++i) {
            Vec2 p;
            do {
                p = {uniform_double(rng, ws.min.x, ws.max.x),
                     uniform_double(rng, ws.min.y, ws.max.y)};
            } while (problem.obstacles->signed_distance(p) <= 0.0);
            random_start[i].position = p;
            random_start[i].brightness = problem.optimize_brightness
                                             ? uniform_double(rng, 0.0, 1.0)
                                             : init[i].brightness;
        }
        options.max_evaluations = budget - total_evals;
        auto run = nelder_mead(objective, encode(random_start, problem), step, options);
        total_evals += run.evaluations;
        last_x = run.x;
    }

    result.evaluations = total_evals;
    if (!result.feasible_found) {
        // everything was penalized: project the last best point and report it
        EmitterConfig projected = decode(last_x, problem, init);
        for (auto& e : projected)
            e.position = project_to_free_space(e.position, *problem.obstacles, ws);
        result.config = projected;
        result.objective = placement_objective(projected, problem);
    }
    return result;
}

}  // namespace luxplace
