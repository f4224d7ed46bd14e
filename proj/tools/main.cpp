// Command-line front end: single episodes, multi-trial studies and
// field rendering for a generated scenario.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <iostream>

#include "luxplace/harness.hpp"
#include "luxplace/io.hpp"

namespace {

using namespace luxplace;

struct CommonArgs {
    std::uint64_t env_seed = 0;
    std::uint64_t start_seed = 0;
    std::string level = "A";
    std::string model = "factor_graph";
    std::string trigger = "logprob";
    double alpha = 1.07;
    int every_n = 10;
    int steps = 100;
    int rollouts = 50;
    std::string out_dir = "out";
    std::string config_path;
    bool strict_trigger = false;
};

TriggerSpec parse_trigger(const CommonArgs& args) {
    TriggerSpec spec;
    if (args.trigger == "first_step") spec.kind = TriggerKind::FirstStep;
    else if (args.trigger == "last_step") spec.kind = TriggerKind::LastStep;
    else if (args.trigger == "every_n") spec.kind = TriggerKind::EveryN;
    else if (args.trigger == "logprob") spec.kind = TriggerKind::Logprob;
    else throw CLI::ValidationError("--trigger", "unknown trigger: " + args.trigger);
    spec.every_n = args.every_n;
    spec.alpha = args.alpha;
    spec.strict = args.strict_trigger;
    return spec;
}

// JSON config file overrides; every key optional.
void apply_config_file(const std::string& path, EpisodeConfig& episode,
                       ScenarioGenParams& scenario) {
    const nlohmann::json j = nlohmann::json::parse(read_text_file(path));
    if (j.contains("lighting")) {
        const auto& l = j["lighting"];
        auto& p = scenario.lighting;
        if (l.contains("rays_per_source")) p.rays_per_source = l["rays_per_source"].get<int>();
        if (l.contains("max_reflections")) p.max_reflections = l["max_reflections"].get<int>();
        if (l.contains("brightness_scale"))
            p.brightness_scale = l["brightness_scale"].get<double>();
        if (l.contains("hit_epsilon")) p.hit_epsilon = l["hit_epsilon"].get<double>();
        if (l.contains("max_path")) p.max_path = l["max_path"].get<double>();
        if (l.contains("min_distance_clamp"))
            p.min_distance_clamp = l["min_distance_clamp"].get<double>();
    }
    if (j.contains("scenario")) {
        const auto& s = j["scenario"];
        if (s.contains("width_cells")) scenario.width_cells = s["width_cells"].get<int>();
        if (s.contains("height_cells")) scenario.height_cells = s["height_cells"].get<int>();
        if (s.contains("spacing")) scenario.spacing = s["spacing"].get<double>();
        if (s.contains("sim_noise_sigma"))
            scenario.sim_noise_sigma = s["sim_noise_sigma"].get<double>();
        if (s.contains("unknown_brightness"))
            scenario.unknown_brightness = s["unknown_brightness"].get<double>();
    }
    if (j.contains("belief")) {
        const auto& b = j["belief"];
        episode.noise_overridden = true;
        episode.noise = BeliefNoise::defaults_for(scenario.lighting.brightness_scale);
        if (b.contains("sigma_analytic")) episode.noise.sigma_analytic = b["sigma_analytic"];
        if (b.contains("sigma_meas")) episode.noise.sigma_meas = b["sigma_meas"];
        if (b.contains("sigma_link_base")) episode.noise.sigma_link_base = b["sigma_link_base"];
        if (b.contains("sigma_weak")) episode.noise.sigma_weak = b["sigma_weak"];
    }
    if (j.contains("planner")) {
        const auto& p = j["planner"];
        if (p.contains("num_rollouts")) episode.planner.num_rollouts = p["num_rollouts"];
        if (p.contains("max_depth")) episode.planner.max_depth = p["max_depth"];
        if (p.contains("discount")) episode.planner.discount = p["discount"];
        if (p.contains("exploration_c")) episode.planner.exploration_c = p["exploration_c"];
        if (p.contains("t_test_alpha")) episode.planner.t_test_alpha = p["t_test_alpha"];
    }
    if (j.contains("placement")) {
        const auto& p = j["placement"];
        if (p.contains("budget_factor")) episode.placement_budget_factor = p["budget_factor"];
        if (p.contains("optimize_brightness"))
            episode.optimize_brightness = p["optimize_brightness"];
    }
}

int cmd_run(const CommonArgs& args) {
    ScenarioGenParams gen;
    gen.max_steps = args.steps;
    EpisodeConfig cfg;
    if (!args.config_path.empty()) apply_config_file(args.config_path, cfg, gen);
    cfg.model = model_kind_from_string(args.model);
    cfg.trigger = parse_trigger(args);
    cfg.max_steps = args.steps;
    cfg.planner.num_rollouts = args.rollouts;

    const Scenario scenario =
        generate_scenario(args.env_seed, args.start_seed, task_level_from_string(args.level), gen);
    const RunLog log = run_episode(scenario, cfg);

    const std::filesystem::path out(args.out_dir);
    write_text_file(out / "runlog.json", runlog_to_json(log).dump(2) + "\n");
    write_text_file(out / "scenario.json", scenario_to_json(scenario).dump() + "\n");

    std::ostringstream metrics;
    metrics.precision(17);
    metrics << "metric,value\n";
    metrics << "final_rmse," << log.final_rmse << "\n";
    metrics << "trigger_count," << log.trigger_count << "\n";
    metrics << "steps," << log.max_steps << "\n";
    metrics << "wall_seconds," << log.wall_seconds << "\n";
    write_text_file(out / "metrics.csv", metrics.str());

    std::ostringstream curve;
    curve.precision(17);
    curve << "step,rmse\n";
    for (std::size_t t = 0; t < log.rmse_curve.size(); ++t)
        curve << t << ',' << log.rmse_curve[t] << '\n';
    write_text_file(out / "rmse_curve.csv", curve.str());

    std::ostringstream cumulative;
    cumulative << "step,cumulative_triggers\n";
    int count = 0;
    for (const auto& s : log.steps) {
        if (s.triggered) ++count;
        cumulative << s.t << ',' << count << '\n';
    }
    write_text_file(out / "triggers_cumulative.csv", cumulative.str());

    write_field_csv(out / "desired.csv", log.desired, scenario.grid);
    write_field_pgm(out / "desired.pgm", log.desired, scenario.grid);
    write_field_csv(out / "achieved.csv", log.achieved_final, scenario.grid);
    write_field_pgm(out / "achieved.pgm", log.achieved_final, scenario.grid);

    if (log.error.has_value()) {
        nlohmann::json err{{"error", *log.error}, {"phase", "episode"}};
        std::cerr << err.dump() << std::endl;
        return 2;
    }
    std::cout << "final_rmse=" << log.final_rmse << " triggers=" << log.trigger_count
              << " out=" << args.out_dir << std::endl;
    return 0;
}

int cmd_study(const CommonArgs& args, const std::string& study, int envs, int seeds) {
    StudyOptions options;
    options.env_count = envs;
    options.seed_count = seeds;
    options.level = task_level_from_string(args.level);
    options.out_dir = args.out_dir;
    options.scenario.max_steps = args.steps;
    if (!args.config_path.empty())
        apply_config_file(args.config_path, options.base, options.scenario);
    options.base.max_steps = args.steps;
    options.base.planner.num_rollouts = args.rollouts;
    options.base.trigger.strict = args.strict_trigger;

    const StudySummary summary = run_study(study_kind_from_string(study), options);
    for (const auto& arm : summary.arms)
        std::cout << arm.arm << ": median_rmse=" << arm.median_rmse << " (" << arm.trials
                  << " trials, " << arm.failures << " failures)" << std::endl;
    for (const auto& imp : summary.improvements)
        std::cout << imp.label << ": median improvement " << imp.median_percent << "% over "
                  << imp.percent_improvements.size() << " pairs" << std::endl;
    return 0;
}

int cmd_render(const CommonArgs& args, const std::string& field_name) {
    ScenarioGenParams gen;
    EpisodeConfig cfg_unused;
    if (!args.config_path.empty()) apply_config_file(args.config_path, cfg_unused, gen);
    const Scenario scenario =
        generate_scenario(args.env_seed, args.start_seed, task_level_from_string(args.level), gen);

    LightField field;
    if (field_name == "desired") {
        field = scenario.desired;
    } else if (field_name == "unknown") {
        field = scenario.unknown_truth;
    } else if (field_name == "initial") {
        field = truth_source_field(scenario, scenario.initial_config);
    } else if (field_name == "total") {
        field = truth_source_field(scenario, scenario.initial_config);
        for (std::size_t i = 0; i < field.values.size(); ++i)
            field.values[i] += scenario.unknown_truth.values[i];
    } else {
        throw CLI::ValidationError("--field", "unknown field: " + field_name);
    }

    const std::filesystem::path out(args.out_dir);
    write_field_csv(out / (field_name + ".csv"), field, scenario.grid);
    write_field_pgm(out / (field_name + ".pgm"), field, scenario.grid);
    write_text_file(out / "scenario.json", scenario_to_json(scenario).dump() + "\n");
    std::cout << "wrote " << field_name << " field to " << args.out_dir << std::endl;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Grid-world light-emitter placement simulator"};
    app.require_subcommand(1);

    CommonArgs args;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--env-seed", args.env_seed, "environment seed");
        cmd->add_option("--start-seed", args.start_seed, "robot start seed");
        cmd->add_option("--level", args.level, "task level A/B/C");
        cmd->add_option("--steps", args.steps, "environment steps");
        cmd->add_option("--rollouts", args.rollouts, "planner rollouts");
        cmd->add_option("--out-dir", args.out_dir, "output directory");
        cmd->add_option("--config", args.config_path, "JSON config file");
        cmd->add_flag("--strict-trigger", args.strict_trigger,
                      "raw scaled-max threshold for nonnegative log-likelihood maxima");
    };

    CLI::App* run = app.add_subcommand("run", "run one closed-loop episode");
    add_common(run);
    run->add_option("--model", args.model, "factor_graph or residual_gp");
    run->add_option("--trigger", args.trigger, "first_step/last_step/every_n/logprob");
    run->add_option("--alpha", args.alpha, "logprob scaling constant");
    run->add_option("--n", args.every_n, "every_n period");

    std::string study_name = "system_levels";
    int envs = 5, seeds = 5;
    CLI::App* study = app.add_subcommand("study", "run a named study");
    add_common(study);
    study->add_option("name", study_name, "model_comparison, trigger_sweep or system_levels");
    study->add_option("--envs", envs, "number of environment seeds");
    study->add_option("--seeds", seeds, "start seeds per environment");

    std::string field_name = "desired";
    CLI::App* render = app.add_subcommand("render", "render a scenario field to CSV + PGM");
    add_common(render);
    render->add_option("--field", field_name, "desired, unknown, initial or total");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(args);
        if (study->parsed()) return cmd_study(args, study_name, envs, seeds);
        if (render->parsed()) return cmd_render(args, field_name);
    } catch (const std::exception& e) {
        nlohmann::json err{{"error", e.what()}};
        std::cerr << err.dump() << std::endl;
        return 1;
    }
    return 0;
}
