#include "oracles.hpp"

#include "luxplace/rng.hpp"

namespace luxplace::oracles {

DenseSolution dense_solve(const std::vector<FactorGraphBelief::Factor>& factors, int n) {
    Eigen::MatrixXd info = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd eta = Eigen::VectorXd::Zero(n);
    for (const auto& f : factors) {
        const double w = 1.0 / (f.sigma * f.sigma);
        for (int i = 0; i < f.nvars; ++i) {
            eta[f.vars[i]] += f.coeffs[i] * f.rhs * w;
            for (int j = 0; j < f.nvars; ++j)
                info(f.vars[i], f.vars[j]) += f.coeffs[i] * f.coeffs[j] * w;
        }
    }
    DenseSolution out;
    out.covariance = info.inverse();
    out.mean = out.covariance * eta;
    return out;
}

Vec2 ImageSourceOracle::mirrored_source() const {
    // mirror across the infinite plane containing the wall face nearest the
    // source; only vertical faces handled (walls used by tests are tall)
    if (source.x <= wall.min.x) return {2.0 * wall.min.x - source.x, source.y};
    return {2.0 * wall.max.x - source.x, source.y};
}

bool ImageSourceOracle::cell_sees_direct(const Vec2& cell) const {
    return !segment_intersects_rect(source, cell, wall);
}

bool ImageSourceOracle::cell_sees_reflection(const Vec2& cell) const {
    const Vec2 img = mirrored_source();
    const double face_x = source.x <= wall.min.x ? wall.min.x : wall.max.x;
    const double dx = img.x - cell.x;
    if (std::abs(dx) < 1e-12) return false;
    const double t = (face_x - cell.x) / dx;
    if (t <= 0.0 || t >= 1.0) return false;  // bounce point must lie between them
    const double y = cell.y + t * (img.y - cell.y);
    if (y < wall.min.y || y > wall.max.y) return false;  // off the physical face
    // the cell must be on the source's side of the wall
    return (source.x <= wall.min.x) == (cell.x <= wall.min.x);
}

double ImageSourceOracle::intensity(const Vec2& cell) const {
    const double d_direct = std::max((cell - source).norm(), min_clamp);
    const double d_image = std::max((cell - mirrored_source()).norm(), min_clamp);
    return brightness * scale * (1.0 / (d_direct * d_direct) + 1.0 / (d_image * d_image));
}

std::pair<double, double> gp_dense_predict(const std::vector<Vec2>& inputs,
                                           const std::vector<double>& targets,
                                           const GpHyperparams& hyper, const Vec2& query) {
    const int n = static_cast<int>(inputs.size());
    const double sf2 = hyper.signal_stddev * hyper.signal_stddev;
    auto kernel = [&](const Vec2& a, const Vec2& b) {
        return sf2 * std::exp(-(a - b).squared_norm() /
                              (2.0 * hyper.length_scale * hyper.length_scale));
    };
    if (n == 0) return {0.0, sf2};
    Eigen::MatrixXd K(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) K(i, j) = kernel(inputs[i], inputs[j]);
    K.diagonal().array() += hyper.noise_stddev * hyper.noise_stddev;
    const Eigen::MatrixXd K_inv = K.inverse();
    Eigen::VectorXd k(n);
    for (int i = 0; i < n; ++i) k[i] = kernel(query, inputs[i]);
    const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(targets.data(), n);
    const double mean = k.dot(K_inv * y);
    const double var = sf2 - k.dot(K_inv * k);
    return {mean, var};
}

ExhaustiveBest exhaustive_single_emitter(const PlacementProblem& problem,
                                         int brightness_levels) {
    ExhaustiveBest best;
    best.objective = std::numeric_limits<double>::infinity();
    for (const Cell& c : problem.grid->free_cells()) {
        const Vec2 p = problem.grid->cell_center(c);
        for (int k = 0; k < brightness_levels; ++k) {
            const double b = static_cast<double>(k) / (brightness_levels - 1);
            const double obj = placement_objective({{p, b}}, problem);
            if (obj < best.objective) best = {p, b, obj};
        }
    }
    return best;
}

BeliefCase make_random_belief_case(std::uint64_t seed, int max_side) {
    std::mt19937_64 rng(mix_seed(seed, 0xbe11));
    BeliefCase out;
    const int w = 2 + static_cast<int>(uniform_index(rng, max_side - 1));
    const int h = 2 + static_cast<int>(uniform_index(rng, max_side - 1));
    const double spacing = 0.35;

    // sometimes drop an obstacle inside to knock out cells and links
    std::vector<Obstacle> obstacles;
    if (uniform_double(rng, 0.0, 1.0) < 0.6 && w >= 3 && h >= 3) {
        const double cx = uniform_double(rng, 1.0, w - 1.0) * spacing;
        const double cy = uniform_double(rng, 1.0, h - 1.0) * spacing;
        const double hx = uniform_double(rng, 0.2, 0.6) * spacing;
        const double hy = uniform_double(rng, 0.2, 0.6) * spacing;
        obstacles.push_back({{{cx - hx, cy - hy}, {cx + hx, cy + hy}}, 0.5});
    }
    out.obstacles = ObstacleSet(obstacles);
    out.grid = GridMap(w, h, spacing, {0.0, 0.0}, out.obstacles);

    out.analytic = LightField(out.grid);
    for (const Cell& c : out.grid.free_cells())
        out.analytic.at(c) = uniform_double(rng, 0.0, 2.0);

    out.noise.sigma_analytic = uniform_double(rng, 0.05, 0.3);
    out.noise.sigma_meas = uniform_double(rng, 0.01, 0.1);
    out.noise.sigma_link_base = uniform_double(rng, 0.02, 0.2);
    out.noise.sigma_weak = uniform_double(rng, 2.0, 20.0);

    const auto& free = out.grid.free_cells();
    const int measurements = 1 + static_cast<int>(uniform_index(rng, free.size()));
    for (int i = 0; i < measurements; ++i) {
        const Cell c = free[uniform_index(rng, free.size())];
        out.measurements.push_back({i, c, uniform_double(rng, 0.0, 3.0)});
    }
    return out;
}

}  // namespace luxplace::oracles
