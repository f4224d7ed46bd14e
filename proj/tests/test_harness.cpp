#include <doctest.h>

#include <nlohmann/json.hpp>

#include <filesystem>

#include "luxplace/harness.hpp"
#include "luxplace/io.hpp"

using namespace luxplace;

namespace {

// small, fast episode setup shared by the closed-loop tests
ScenarioGenParams quick_gen() {
    ScenarioGenParams gen;
    gen.lighting.rays_per_source = 128;
    gen.max_steps = 8;
    return gen;
}

EpisodeConfig quick_config() {
    EpisodeConfig cfg;
    cfg.max_steps = 8;
    cfg.planner.num_rollouts = 10;
    cfg.placement_budget_factor = 40;
    return cfg;
}

}  // namespace

TEST_CASE("rmse closed forms") {
    const ObstacleSet none;
    const GridMap grid(2, 1, 0.35, {0.0, 0.0}, none);
    LightField a(grid), b(grid);

    CHECK(rmse(a, b, grid) == 0.0);

    a.at({0, 0}) = 1.3;
    a.at({0, 1}) = 2.6;
    b.at({0, 0}) = 1.3 + 0.25;
    b.at({0, 1}) = 2.6 + 0.25;
    CHECK(rmse(a, b, grid) == doctest::Approx(0.25).epsilon(1e-12));

    b.at({0, 0}) = a.at({0, 0}) + 3.0;
    b.at({0, 1}) = a.at({0, 1}) + 4.0;
    CHECK(rmse(a, b, grid) == doctest::Approx(std::sqrt(12.5)).epsilon(1e-9));

    const GridMap other(3, 1, 0.35, {0.0, 0.0}, none);
    CHECK_THROWS_AS(rmse(a, b, other), std::invalid_argument);
}

TEST_CASE("first-step trigger freezes the error curve after step zero") {
    ScenarioGenParams gen = quick_gen();
    gen.sim_noise_sigma = 0.0;
    const Scenario scenario = generate_scenario(1, 0, TaskLevel::A, gen);
    EpisodeConfig cfg = quick_config();
    cfg.trigger.kind = TriggerKind::FirstStep;
    const RunLog log = run_episode(scenario, cfg);

    REQUIRE_FALSE(log.error.has_value());
    CHECK(log.trigger_count == 1);  // the single step-0 placement
    REQUIRE(log.rmse_curve.size() == static_cast<std::size_t>(cfg.max_steps) + 1);
    for (double r : log.rmse_curve) CHECK(r == log.rmse_curve.front());
}

TEST_CASE("episodes are deterministic end to end") {
    const Scenario scenario = generate_scenario(2, 1, TaskLevel::A, quick_gen());
    EpisodeConfig cfg = quick_config();
    cfg.trigger = {TriggerKind::EveryN, 4, 1.07, false};
    const RunLog a = run_episode(scenario, cfg);
    const RunLog b = run_episode(scenario, cfg);
    auto ja = runlog_to_json(a);
    auto jb = runlog_to_json(b);
    ja["metrics"].erase("wall_seconds");
    jb["metrics"].erase("wall_seconds");
    CHECK(ja.dump() == jb.dump());
}

TEST_CASE("step records are contiguous and the log is self-consistent") {
    const Scenario scenario = generate_scenario(3, 0, TaskLevel::A, quick_gen());
    EpisodeConfig cfg = quick_config();
    cfg.trigger = {TriggerKind::Logprob, 10, 1.02, false};
    const RunLog log = run_episode(scenario, cfg);
    REQUIRE_FALSE(log.error.has_value());

    REQUIRE(log.steps.size() == static_cast<std::size_t>(cfg.max_steps) + 1);
    for (int t = 0; t <= cfg.max_steps; ++t) CHECK(log.steps[t].t == t);
    CHECK(log.steps.front().cell == scenario.start_cell);

    // consecutive cells are 4-neighbors on free cells
    for (std::size_t t = 1; t < log.steps.size(); ++t) {
        const Cell a = log.steps[t - 1].cell;
        const Cell b = log.steps[t].cell;
        CHECK(std::abs(a.row - b.row) + std::abs(a.col - b.col) == 1);
        CHECK(scenario.grid.is_free(b));
    }

    int fired = 0;
    for (const auto& s : log.steps)
        if (s.triggered) ++fired;
    CHECK(fired == log.trigger_count);
    CHECK(log.configs.size() == static_cast<std::size_t>(log.trigger_count) + 1);
    CHECK(log.final_rmse == log.rmse_curve.back());
}

TEST_CASE("run log JSON round-trips and metrics recompute from the log alone") {
    const Scenario scenario = generate_scenario(4, 1, TaskLevel::A, quick_gen());
    EpisodeConfig cfg = quick_config();
    cfg.model = ModelKind::ResidualGp;
    cfg.trigger = {TriggerKind::EveryN, 3, 1.0, false};
    const RunLog log = run_episode(scenario, cfg);
    REQUIRE_FALSE(log.error.has_value());

    const std::string once = runlog_to_json(log).dump();
    const RunLog restored = runlog_from_json(nlohmann::json::parse(once));
    CHECK(runlog_to_json(restored).dump() == once);

    // final RMSE from the embedded fields and free-cell list
    double sum = 0.0;
    for (int idx : restored.free_cell_indices) {
        const double e = restored.achieved_final.values[idx] - restored.desired.values[idx];
        sum += e * e;
    }
    const double recomputed = std::sqrt(sum / restored.free_cell_indices.size());
    CHECK(recomputed == doctest::Approx(restored.final_rmse).epsilon(1e-12));

    // curve entries equal the rmse of the configuration active at each step
    std::size_t config_idx = 0;
    for (std::size_t t = 0; t < restored.steps.size(); ++t) {
        while (config_idx + 1 < restored.configs.size() &&
               restored.configs[config_idx + 1].t <= static_cast<int>(t))
            ++config_idx;
        CHECK(restored.rmse_curve[t] ==
              doctest::Approx(restored.configs[config_idx].achieved_rmse).epsilon(1e-12));
    }
}

TEST_CASE("episode errors are contained in the log") {
    const Scenario scenario = generate_scenario(5, 0, TaskLevel::A, quick_gen());
    EpisodeConfig cfg = quick_config();
    cfg.trigger = {TriggerKind::Logprob, 10, 0.5, false};  // invalid alpha
    const RunLog log = run_episode(scenario, cfg);
    CHECK(log.error.has_value());
}

TEST_CASE("a degenerate study reduces to its single trial") {
    StudyOptions options;
    options.env_count = 1;
    options.seed_count = 1;
    options.scenario = quick_gen();
    options.base = quick_config();
    options.parallel = false;
    const StudySummary summary = run_study(StudyKind::ModelComparison, options);

    REQUIRE(summary.trials.size() == 2);  // one per model arm
    REQUIRE(summary.arms.size() == 2);
    for (const auto& arm : summary.arms) {
        CHECK(arm.trials == 1);
        double trial_rmse = -1.0;
        for (const auto& t : summary.trials)
            if (t.arm == arm.arm) trial_rmse = t.final_rmse;
        CHECK(arm.median_rmse == trial_rmse);
        CHECK(arm.q25_rmse == trial_rmse);
        CHECK(arm.q75_rmse == trial_rmse);
    }
    REQUIRE(summary.improvements.size() == 1);
    CHECK(summary.improvements.front().percent_improvements.size() == 1);
}

TEST_CASE("study tables are recomputable from the emitted run logs") {
    const auto dir = std::filesystem::temp_directory_path() / "luxplace_study_audit";
    std::filesystem::remove_all(dir);

    StudyOptions options;
    options.env_count = 2;
    options.seed_count = 1;
    options.scenario = quick_gen();
    options.base = quick_config();
    options.out_dir = dir.string();
    const StudySummary summary = run_study(StudyKind::ModelComparison, options);

    for (const auto& arm : summary.arms) {
        std::vector<double> rmses;
        for (int e = 0; e < options.env_count; ++e) {
            const auto path = dir / "runlogs" / (arm.arm + "_env" + std::to_string(e) +
                                                 "_seed0.json");
            const RunLog log = runlog_from_json(nlohmann::json::parse(read_text_file(path)));
            rmses.push_back(log.final_rmse);
        }
        CHECK(median(rmses) == doctest::Approx(arm.median_rmse).epsilon(1e-12));
    }
    CHECK(std::filesystem::exists(dir / "trials.csv"));
    CHECK(std::filesystem::exists(dir / "summary.csv"));
    CHECK(std::filesystem::exists(dir / "improvement.csv"));
    std::filesystem::remove_all(dir);
}

TEST_CASE("statistics helpers") {
    CHECK(median({3.0, 1.0, 2.0}) == 2.0);
    CHECK(median({1.0, 2.0, 3.0, 4.0}) == 2.5);
    CHECK(quantile({1.0, 2.0, 3.0, 4.0, 5.0}, 0.25) == 2.0);

    // all seven positive: p = 1/128
    CHECK(sign_test_p_value({1, 1, 1, 1, 1, 1, 1}) == doctest::Approx(1.0 / 128).epsilon(1e-9));
    // 6 of 7 positive: p = 8/128
    CHECK(sign_test_p_value({1, 1, 1, 1, 1, 1, -1}) == doctest::Approx(8.0 / 128).epsilon(1e-9));
    CHECK(sign_test_p_value({-1, -1, -1}) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(sign_test_p_value({}) == 1.0);
}
