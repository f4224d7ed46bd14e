#include <doctest.h>

#include <nlohmann/json.hpp>

#include "luxplace/belief.hpp"
#include "oracles.hpp"

using namespace luxplace;

namespace {

GridMap tiny_grid(int w, int h, const ObstacleSet& obstacles = ObstacleSet{}) {
    return GridMap(w, h, 0.35, {0.0, 0.0}, obstacles);
}

LightField constant_field(const GridMap& grid, double v) {
    LightField f(grid);
    for (const Cell& c : grid.free_cells()) f.at(c) = v;
    return f;
}

}  // namespace

TEST_CASE("priors alone reproduce the analytic field on a link-free graph") {
    const GridMap grid = tiny_grid(1, 1);
    FactorGraphBelief belief(grid, {}, BeliefNoise{});
    belief.rebuild_priors(constant_field(grid, 1.37));
    const BeliefField field = belief.solve();
    CHECK(field.mu_s[0] == doctest::Approx(1.37).epsilon(1e-12));
    CHECK(field.mu_u[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(field.sigma_s[0] == doctest::Approx(0.1).epsilon(1e-9));
    CHECK(field.sigma_u[0] == doctest::Approx(10.0).epsilon(1e-9));
}

TEST_CASE("a strong link pulls neighboring priors together (closed form)") {
    const GridMap grid = tiny_grid(2, 1);
    BeliefNoise noise;
    noise.sigma_analytic = 0.2;
    noise.sigma_link_base = 0.05;
    FactorGraphBelief belief(grid, {}, noise);
    LightField analytic(grid);
    analytic.at({0, 0}) = 1.0;
    analytic.at({0, 1}) = 3.0;
    belief.rebuild_priors(analytic);
    const BeliefField field = belief.solve();

    // two-variable weighted average: the gap shrinks by 1/(1 + 2 sa^2/sl^2)
    const double gap = (1.0 - 3.0) / (1.0 + 2.0 * 0.2 * 0.2 / (0.05 * 0.05));
    const double mid = 2.0;
    CHECK(field.mu_s[field.index({0, 0})] == doctest::Approx(mid + gap / 2).epsilon(1e-9));
    CHECK(field.mu_s[field.index({0, 1})] == doctest::Approx(mid - gap / 2).epsilon(1e-9));
    CHECK(std::abs(field.mu_s[0] - field.mu_s[1]) < 2.0);
}

TEST_CASE("equal unary priors on a two-cell chain stay symmetric") {
    const GridMap grid = tiny_grid(2, 1);
    BeliefNoise noise;
    noise.sigma_analytic = 1.0;
    FactorGraphBelief belief(grid, {}, noise);
    LightField analytic(grid);
    analytic.at({0, 0}) = 0.0;
    analytic.at({0, 1}) = 2.0;
    belief.rebuild_priors(analytic);
    const BeliefField field = belief.solve();
    const double s0 = field.mu_s[0];
    const double s1 = field.mu_s[1];
    CHECK(s0 + s1 == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(s0 > 0.0);
    CHECK(s0 < 1.0);
    CHECK(s1 == doctest::Approx(2.0 - s0).epsilon(1e-9));
}

TEST_CASE("single measurement matches the hand-written normal equations") {
    const GridMap grid = tiny_grid(1, 1);
    BeliefNoise noise{0.1, 0.02, 0.05, 10.0};
    FactorGraphBelief belief(grid, {}, noise);
    const double a = 0.8, y = 1.5;
    belief.rebuild_priors(constant_field(grid, a));
    belief.add_measurement({0, {0, 0}, y});
    const BeliefField field = belief.solve();

    // 2x2 normal equations for z = (s, u)
    const double wa = 1.0 / (noise.sigma_analytic * noise.sigma_analytic);
    const double ww = 1.0 / (noise.sigma_weak * noise.sigma_weak);
    const double wm = 1.0 / (noise.sigma_meas * noise.sigma_meas);
    const double info[2][2] = {{wa + wm, wm}, {wm, ww + wm}};
    const double eta[2] = {a * wa + y * wm, y * wm};
    const double det = info[0][0] * info[1][1] - info[0][1] * info[1][0];
    const double s = (eta[0] * info[1][1] - eta[1] * info[0][1]) / det;
    const double u = (info[0][0] * eta[1] - info[1][0] * eta[0]) / det;

    CHECK(field.mu_s[0] == doctest::Approx(s).epsilon(1e-9));
    CHECK(field.mu_u[0] == doctest::Approx(u).epsilon(1e-9));
    CHECK(field.sigma_s[0] == doctest::Approx(std::sqrt(info[1][1] / det)).epsilon(1e-9));
    CHECK(field.sigma_u[0] == doctest::Approx(std::sqrt(info[0][0] / det)).epsilon(1e-9));
    // measured sum sits between prior and reading, far closer to the reading
    CHECK(field.mu_total[0] > a);
    CHECK(field.mu_total[0] < y + 1e-9);
}

TEST_CASE("a measurement agreeing with the prior leaves the unknown at zero") {
    const GridMap grid = tiny_grid(1, 1);
    FactorGraphBelief belief(grid, {}, BeliefNoise{});
    belief.rebuild_priors(constant_field(grid, 0.8));
    belief.add_measurement({0, {0, 0}, 0.8});
    const BeliefField field = belief.solve();
    CHECK(field.mu_s[0] == doctest::Approx(0.8).epsilon(1e-9));
    CHECK(field.mu_u[0] == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("an uninformative measurement reduces to the prior") {
    const GridMap grid = tiny_grid(1, 1);
    BeliefNoise noise;
    noise.sigma_meas = 1e9;
    FactorGraphBelief belief(grid, {}, noise);
    belief.rebuild_priors(constant_field(grid, 0.8));
    belief.add_measurement({0, {0, 0}, 5.0});
    const BeliefField field = belief.solve();
    CHECK(field.mu_s[0] == doctest::Approx(0.8).epsilon(1e-8));
    CHECK(field.mu_u[0] == doctest::Approx(0.0).epsilon(1e-8));
    CHECK(field.sigma_s[0] == doctest::Approx(noise.sigma_analytic).epsilon(1e-6));
}

TEST_CASE("latest measurement wins within an epoch") {
    const GridMap grid = tiny_grid(2, 2);
    FactorGraphBelief belief(grid, {}, BeliefNoise{});
    belief.rebuild_priors(constant_field(grid, 1.0));
    belief.add_measurement({0, {0, 0}, 2.0});
    belief.add_measurement({1, {0, 0}, 3.0});
    CHECK(belief.replaced_measurement_count() == 1);
    const BeliefField twice = belief.solve();

    FactorGraphBelief fresh(grid, {}, BeliefNoise{});
    fresh.rebuild_priors(constant_field(grid, 1.0));
    fresh.add_measurement({1, {0, 0}, 3.0});
    const BeliefField once = fresh.solve();
    for (std::size_t i = 0; i < twice.mu_total.size(); ++i)
        CHECK(twice.mu_total[i] == doctest::Approx(once.mu_total[i]).epsilon(1e-12));
}

TEST_CASE("measurements strictly shrink the measured cell's uncertainty") {
    const auto scene = oracles::make_random_belief_case(17);
    FactorGraphBelief belief(scene.grid, scene.obstacles, scene.noise);
    belief.rebuild_priors(scene.analytic);
    const BeliefField before = belief.solve();
    const Cell target = scene.grid.free_cells().front();
    belief.add_measurement({0, target, 1.0});
    const BeliefField after = belief.solve();
    CHECK(after.stddev(target) < before.stddev(target));
}

TEST_CASE("sparse solve matches the dense oracle on random graphs") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto scene = oracles::make_random_belief_case(seed);
        FactorGraphBelief belief(scene.grid, scene.obstacles, scene.noise);
        belief.rebuild_priors(scene.analytic);
        for (const auto& m : scene.measurements) belief.add_measurement(m);
        const BeliefField field = belief.solve();

        const auto dense = oracles::dense_solve(belief.factors(), belief.variable_count());
        for (const Cell& c : scene.grid.free_cells()) {
            const int vs = belief.var_source(c);
            const int vu = belief.var_unknown(c);
            const std::size_t i = field.index(c);
            CHECK(field.mu_s[i] == doctest::Approx(dense.mean[vs]).epsilon(1e-6));
            CHECK(field.mu_u[i] == doctest::Approx(dense.mean[vu]).epsilon(1e-6));
            CHECK(field.sigma_s[i] ==
                  doctest::Approx(std::sqrt(dense.covariance(vs, vs))).epsilon(1e-6));
            CHECK(field.sigma_u[i] ==
                  doctest::Approx(std::sqrt(dense.covariance(vu, vu))).epsilon(1e-6));
            const double total_var = dense.covariance(vs, vs) + dense.covariance(vu, vu) +
                                     2.0 * dense.covariance(vs, vu);
            CHECK(field.sigma_total[i] == doctest::Approx(std::sqrt(total_var)).epsilon(1e-6));
        }
    }
}

TEST_CASE("reconfiguring before any solve is an error") {
    const GridMap grid = tiny_grid(2, 2);
    FactorGraphBelief belief(grid, {}, BeliefNoise{});
    belief.rebuild_priors(constant_field(grid, 1.0));
    CHECK_THROWS_AS(belief.on_reconfigure(constant_field(grid, 1.0)), SolveError);
    belief.add_measurement({0, {0, 0}, 2.0});
    belief.solve();
    belief.add_measurement({1, {0, 1}, 2.0});  // solution now stale
    CHECK_THROWS_AS(belief.on_reconfigure(constant_field(grid, 1.0)), SolveError);
}

TEST_CASE("same-configuration reconfiguration preserves measured unknowns") {
    for (std::uint64_t seed = 100; seed < 110; ++seed) {
        const auto scene = oracles::make_random_belief_case(seed);
        FactorGraphBelief belief(scene.grid, scene.obstacles, scene.noise);
        belief.rebuild_priors(scene.analytic);
        std::vector<bool> measured(scene.grid.cell_count(), false);
        for (const auto& m : scene.measurements) {
            belief.add_measurement(m);
            measured[scene.grid.index(m.cell)] = true;
        }
        const BeliefField before = belief.solve();
        belief.on_reconfigure(scene.analytic);
        const BeliefField after = belief.solve();

        for (const Cell& c : scene.grid.free_cells()) {
            const std::size_t i = before.index(c);
            if (measured[scene.grid.index(c)]) {
                CHECK(after.mu_u[i] == doctest::Approx(before.mu_u[i]).epsilon(1e-9));
                CHECK(after.sigma_u[i] == doctest::Approx(before.sigma_u[i]).epsilon(1e-9));
            } else {
                // no history: reverts to the weak zero prior
                CHECK(std::abs(after.mu_u[i]) < 1e-9);
            }
        }
    }
}

TEST_CASE("a measured surplus survives reconfiguration (two-epoch oracle)") {
    const GridMap grid = tiny_grid(2, 2);
    BeliefNoise noise{0.1, 0.02, 0.05, 10.0};
    const double a = 1.0, surplus = 0.9;
    const Cell measured{0, 0};

    FactorGraphBelief belief(grid, {}, noise);
    belief.rebuild_priors(constant_field(grid, a));
    belief.add_measurement({0, measured, a + surplus});
    belief.solve();
    belief.on_reconfigure(constant_field(grid, a));
    const BeliefField after = belief.solve();
    const double ours = after.mu_u[after.index(measured)];

    // joint two-epoch problem: epoch-1 sources, epoch-2 sources, shared
    // unknowns, solved densely in one batch
    using Factor = FactorGraphBelief::Factor;
    using Type = Factor::Type;
    const int n_cells = 4;
    auto vs1 = [&](int i) { return i; };
    auto vu = [&](int i) { return n_cells + i; };
    auto vs2 = [&](int i) { return 2 * n_cells + i; };
    std::vector<Factor> joint;
    for (int i = 0; i < n_cells; ++i) {
        joint.push_back({Type::AnalyticPrior, 1, {vs1(i), -1}, {1.0, 0.0}, a,
                         noise.sigma_analytic});
        joint.push_back({Type::AnalyticPrior, 1, {vs2(i), -1}, {1.0, 0.0}, a,
                         noise.sigma_analytic});
        joint.push_back({Type::WeakPrior, 1, {vu(i), -1}, {1.0, 0.0}, 0.0, noise.sigma_weak});
    }
    // 2x2 grid link topology: (0,1), (2,3), (0,2), (1,3) in row-major order
    const int pairs[4][2] = {{0, 1}, {2, 3}, {0, 2}, {1, 3}};
    for (const auto& [pa, pb] : pairs) {
        for (int base : {0, n_cells, 2 * n_cells})
            joint.push_back({Type::Link, 2, {base + pa, base + pb}, {1.0, -1.0}, 0.0,
                             noise.sigma_link_base});
    }
    const int mi = static_cast<int>(grid.index(measured));
    joint.push_back({Type::Measurement, 2, {vs1(mi), vu(mi)}, {1.0, 1.0}, a + surplus,
                     noise.sigma_meas});
    const auto dense = oracles::dense_solve(joint, 3 * n_cells);
    const double oracle = dense.mean[vu(mi)];

    CHECK(ours > 0.5 * surplus);                       // the surplus is retained
    CHECK(ours == doctest::Approx(oracle).epsilon(0.15));  // and tracks the joint solution
}

TEST_CASE("a full wall decouples the belief") {
    // wall across the middle column, floor to ceiling
    const double h = 7 * 0.35;
    const ObstacleSet wall({{{{3 * 0.35, 0.0}, {4 * 0.35, h}}, 0.0}});
    const GridMap grid(7, 7, 0.35, {0.0, 0.0}, wall);
    REQUIRE_FALSE(free_cells_connected(grid));

    BeliefNoise noise;
    FactorGraphBelief with(grid, wall, noise);
    FactorGraphBelief without(grid, wall, noise);
    const LightField analytic = constant_field(grid, 1.0);
    with.rebuild_priors(analytic);
    without.rebuild_priors(analytic);
    with.add_measurement({0, {3, 1}, 2.5});
    const BeliefField fa = with.solve();
    const BeliefField fb = without.solve();

    for (const Cell& c : grid.free_cells()) {
        if (grid.cell_center(c).x < 4 * 0.35) continue;  // far side only
        const std::size_t i = fa.index(c);
        CHECK(std::abs(fa.mu_total[i] - fb.mu_total[i]) < 1e-12);
        CHECK(std::abs(fa.sigma_total[i] - fb.sigma_total[i]) < 1e-12);
    }
}

TEST_CASE("log-likelihood closed forms") {
    BeliefField belief(1, 1);
    belief.mu_total[0] = 0.0;
    belief.sigma_total[0] = 1.0;
    const GridMap grid = tiny_grid(1, 1);
    LightField target(grid);

    target.at({0, 0}) = 0.0;
    CHECK(field_log_likelihood(belief, target, grid) == doctest::Approx(-0.9189).epsilon(1e-4));

    // mode is the maximum; moving the target strictly decreases it
    const double at_mode = field_log_likelihood(belief, target, grid);
    target.at({0, 0}) = 0.3;
    const double off1 = field_log_likelihood(belief, target, grid);
    target.at({0, 0}) = 0.7;
    const double off2 = field_log_likelihood(belief, target, grid);
    CHECK(at_mode > off1);
    CHECK(off1 > off2);

    belief.sigma_total[0] = 0.0;
    CHECK_THROWS_AS(field_log_likelihood(belief, target, grid), SolveError);
}

TEST_CASE("log-likelihood at the posterior mean sums the entropy terms") {
    const auto scene = oracles::make_random_belief_case(3);
    FactorGraphBelief belief(scene.grid, scene.obstacles, scene.noise);
    belief.rebuild_priors(scene.analytic);
    for (const auto& m : scene.measurements) belief.add_measurement(m);
    const BeliefField field = belief.solve();

    LightField at_mean(scene.grid);
    double expected = 0.0;
    for (const Cell& c : scene.grid.free_cells()) {
        at_mean.at(c) = field.mean(c);
        expected += -std::log(field.stddev(c) * std::sqrt(2.0 * M_PI));
    }
    CHECK(belief.log_likelihood_of(at_mean) == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("graph dump enumerates the factor types") {
    const auto scene = oracles::make_random_belief_case(11);
    FactorGraphBelief belief(scene.grid, scene.obstacles, scene.noise);
    belief.rebuild_priors(scene.analytic);
    belief.add_measurement(scene.measurements.front());
    const nlohmann::json j = belief.dump_graph();
    CHECK(j.at("num_variables").get<int>() == belief.variable_count());
    int analytic = 0, weak = 0, meas = 0;
    for (const auto& f : j.at("factors")) {
        const std::string type = f.at("type").get<std::string>();
        if (type == "analytic_prior") ++analytic;
        if (type == "weak_prior") ++weak;
        if (type == "measurement") ++meas;
    }
    CHECK(analytic == belief.variable_count() / 2);
    CHECK(weak == belief.variable_count() / 2);
    CHECK(meas == 1);
}
