#include "luxplace/harness.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <deque>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "luxplace/io.hpp"
#include "luxplace/rng.hpp"

namespace luxplace {
namespace {

// substream tags for deriving per-step seeds from the start seed
constexpr std::uint64_t kNoiseStream = 0x10000;
constexpr std::uint64_t kPlanStream = 0x20000;
constexpr std::uint64_t kPlacementStream = 0x30000;

LightField add_fields(const LightField& a, const LightField& b) {
    require_same_shape(a, b, "add_fields");
    LightField out = a;
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += b.values[i];
    return out;
}

std::unique_ptr<IntensityEstimator> make_estimator(const Scenario& scenario,
                                                   const EpisodeConfig& cfg) {
    const double scale = scenario.gen.lighting.brightness_scale;
    const BeliefNoise noise = cfg.resolved_noise(scale);
    if (cfg.model == ModelKind::FactorGraph)
        return std::make_unique<FactorGraphBelief>(scenario.grid, scenario.obstacles, noise);
    return std::make_unique<ResidualGpEstimator>(
        scenario.grid,
        GpHyperparams::defaults_for(scenario.grid.spacing(), scale, noise.sigma_meas));
}

}  // namespace

const char* model_kind_name(ModelKind kind) {
    return kind == ModelKind::FactorGraph ? "factor_graph" : "residual_gp";
}

ModelKind model_kind_from_string(const std::string& s) {
    if (s == "factor_graph" || s == "fg") return ModelKind::FactorGraph;
    if (s == "residual_gp" || s == "gp") return ModelKind::ResidualGp;
    throw std::invalid_argument("unknown model: " + s);
}

double rmse(const LightField& achieved, const LightField& desired, const GridMap& grid) {
    require_same_shape(achieved, desired, "rmse");
    if (achieved.width != grid.width() || achieved.height != grid.height())
        throw std::invalid_argument("rmse: grid mismatch");
    double sum = 0.0;
    for (const Cell& c : grid.free_cells()) {
        const double e = achieved.at(c) - desired.at(c);
        sum += e * e;
    }
    return std::sqrt(sum / static_cast<double>(grid.free_cells().size()));
}

RunLog run_episode(const Scenario& scenario, const EpisodeConfig& cfg) {
    const auto t_start = std::chrono::steady_clock::now();
    const GridMap& grid = scenario.grid;

    RunLog log;
    log.env_seed = scenario.env_seed;
    log.start_seed = scenario.start_seed;
    log.level = scenario.level;
    log.model = model_kind_name(cfg.model);
    log.trigger = cfg.trigger.label();
    log.max_steps = cfg.max_steps > 0 ? cfg.max_steps : scenario.max_steps;
    log.desired = scenario.desired;
    for (const Cell& c : grid.free_cells())
        log.free_cell_indices.push_back(static_cast<int>(grid.index(c)));

    const LightingParams robot_params =
        scenario.gen.lighting.with_reflections(cfg.robot_reflections);

    EmitterConfig current = scenario.initial_config;
    LightField truth_source = truth_source_field(scenario, current);

    auto record_config = [&](int t, double objective, int evals) {
        const LightField achieved = add_fields(truth_source, scenario.unknown_truth);
        log.configs.push_back({t, current, rmse(achieved, scenario.desired, grid), objective,
                               evals});
    };
    record_config(0, 0.0, 0);

    try {
        auto model = make_estimator(scenario, cfg);
        model->reset(render_source_field(current, scenario.obstacles, grid, robot_params));
        ReconfigTrigger trigger(cfg.trigger, log.max_steps);

        Cell cell = scenario.start_cell;
        std::deque<Action> pending;
        BeliefField belief;

        for (int t = 0; t <= log.max_steps; ++t) {
            StepRecord rec;
            rec.t = t;
            if (t > 0) {
                if (pending.empty()) {
                    const PlanResult pr = plan(grid, belief, cell, cfg.planner,
                                               mix_seed(scenario.start_seed, kPlanStream + t));
                    const int k = actions_to_execute(pr, cfg.planner);
                    pending.assign(pr.actions.begin(), pr.actions.begin() + k);
                    rec.replanned = true;
                    rec.plan_length = static_cast<int>(pr.actions.size());
                    rec.plan_executed = k;
                }
                const Action a = pending.front();
                pending.pop_front();
                const Cell next = apply_action(cell, a);
                if (!grid.is_free(next)) throw PlanError("run_episode: illegal planned action");
                cell = next;
            }
            rec.cell = cell;

            const Measurement m = measure_from_field(
                scenario, truth_source, cell, t, mix_seed(scenario.start_seed, kNoiseStream + t));
            model->add_measurement(m);
            belief = model->update();
            const double log_lik = field_log_likelihood(belief, scenario.desired, grid);
            rec.measurement = m.value;
            rec.log_lik = log_lik;
            rec.trigger_threshold = trigger.current_threshold();

            rec.triggered = trigger.should_reconfigure(t, log_lik);
            if (rec.triggered) {
                const LightField unknown_mu = belief.unknown_estimate();
                PlacementProblem problem;
                problem.desired = &scenario.desired;
                problem.unknown_estimate = &unknown_mu;
                problem.obstacles = &scenario.obstacles;
                problem.grid = &grid;
                problem.render_params = robot_params;
                problem.num_emitters = static_cast<int>(current.size());
                problem.optimize_brightness = cfg.optimize_brightness;

                const int budget = cfg.placement_budget_factor * problem.num_emitters;
                const PlacementResult placed = optimize_placement(
                    problem, current, budget, mix_seed(scenario.start_seed, kPlacementStream + t));

                current = placed.config;
                truth_source = truth_source_field(scenario, current);
                model->on_reconfigure(
                    render_source_field(current, scenario.obstacles, grid, robot_params));
                record_config(t, placed.objective, placed.evaluations);
            }
            log.steps.push_back(rec);
            log.rmse_curve.push_back(log.configs.back().achieved_rmse);
        }
    } catch (const std::exception& e) {
        log.error = e.what();
    }

    log.achieved_final = add_fields(truth_source, scenario.unknown_truth);
    log.final_rmse = rmse(log.achieved_final, scenario.desired, grid);
    log.trigger_count = static_cast<int>(log.configs.size()) - 1;
    log.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return log;
}

nlohmann::json runlog_to_json(const RunLog& log) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["env_seed"] = log.env_seed;
    j["start_seed"] = log.start_seed;
    j["level"] = task_level_name(log.level);
    j["model"] = log.model;
    j["trigger"] = log.trigger;
    j["max_steps"] = log.max_steps;

    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : log.steps)
        steps.push_back({{"t", s.t},
                         {"row", s.cell.row},
                         {"col", s.cell.col},
                         {"y", s.measurement},
                         {"log_lik", s.log_lik},
                         {"triggered", s.triggered},
                         {"threshold", s.trigger_threshold},
                         {"replanned", s.replanned},
                         {"plan_length", s.plan_length},
                         {"plan_executed", s.plan_executed}});
    j["steps"] = std::move(steps);

    nlohmann::json configs = nlohmann::json::array();
    for (const auto& c : log.configs) {
        nlohmann::json emitters = nlohmann::json::array();
        for (const auto& e : c.config)
            emitters.push_back({{"x", e.position.x}, {"y", e.position.y}, {"b", e.brightness}});
        configs.push_back({{"t", c.t},
                           {"emitters", std::move(emitters)},
                           {"achieved_rmse", c.achieved_rmse},
                           {"objective", c.objective},
                           {"evaluations", c.evaluations}});
    }
    j["configs"] = std::move(configs);

    j["free_cells"] = log.free_cell_indices;
    j["desired"] = {{"width", log.desired.width},
                    {"height", log.desired.height},
                    {"values", log.desired.values}};
    j["achieved_final"] = {{"width", log.achieved_final.width},
                           {"height", log.achieved_final.height},
                           {"values", log.achieved_final.values}};
    j["metrics"] = {{"final_rmse", log.final_rmse},
                    {"rmse_curve", log.rmse_curve},
                    {"trigger_count", log.trigger_count},
                    {"wall_seconds", log.wall_seconds}};
    if (log.error.has_value()) j["error"] = *log.error;
    return j;
}

RunLog runlog_from_json(const nlohmann::json& j) {
    RunLog log;
    log.env_seed = j.at("env_seed").get<std::uint64_t>();
    log.start_seed = j.at("start_seed").get<std::uint64_t>();
    log.level = task_level_from_string(j.at("level").get<std::string>());
    log.model = j.at("model").get<std::string>();
    log.trigger = j.at("trigger").get<std::string>();
    log.max_steps = j.at("max_steps").get<int>();
    for (const auto& s : j.at("steps")) {
        StepRecord rec;
        rec.t = s.at("t").get<int>();
        rec.cell = {s.at("row").get<int>(), s.at("col").get<int>()};
        rec.measurement = s.at("y").get<double>();
        rec.log_lik = s.at("log_lik").get<double>();
        rec.triggered = s.at("triggered").get<bool>();
        rec.trigger_threshold = s.at("threshold").get<double>();
        rec.replanned = s.at("replanned").get<bool>();
        rec.plan_length = s.at("plan_length").get<int>();
        rec.plan_executed = s.at("plan_executed").get<int>();
        log.steps.push_back(rec);
    }
    for (const auto& c : j.at("configs")) {
        ConfigRecord rec;
        rec.t = c.at("t").get<int>();
        for (const auto& e : c.at("emitters"))
            rec.config.push_back({{e.at("x").get<double>(), e.at("y").get<double>()},
                                  e.at("b").get<double>()});
        rec.achieved_rmse = c.at("achieved_rmse").get<double>();
        rec.objective = c.at("objective").get<double>();
        rec.evaluations = c.at("evaluations").get<int>();
        log.configs.push_back(rec);
    }
    log.free_cell_indices = j.at("free_cells").get<std::vector<int>>();
    auto field_from = [](const nlohmann::json& f) {
        LightField out(f.at("width").get<int>(), f.at("height").get<int>());
        out.values = f.at("values").get<std::vector<double>>();
        return out;
    };
    log.desired = field_from(j.at("desired"));
    log.achieved_final = field_from(j.at("achieved_final"));
    log.final_rmse = j.at("metrics").at("final_rmse").get<double>();
    log.rmse_curve = j.at("metrics").at("rmse_curve").get<std::vector<double>>();
    log.trigger_count = j.at("metrics").at("trigger_count").get<int>();
    log.wall_seconds = j.at("metrics").at("wall_seconds").get<double>();
    if (j.contains("error")) log.error = j.at("error").get<std::string>();
    return log;
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

double quantile(std::vector<double> values, double q) {
    if (values.empty()) return std::nan("");
    std::sort(values.begin(), values.end());
    const double pos = q * (static_cast<double>(values.size()) - 1.0);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = static_cast<std::size_t>(std::ceil(pos));
    const double frac = pos - static_cast<double>(lo);
    return values[lo] * (1.0 - frac) + values[hi] * frac;
}

double sign_test_p_value(const std::vector<double>& differences) {
    int n = 0, positives = 0;
    for (double d : differences) {
        if (d == 0.0) continue;
        ++n;
        if (d > 0.0) ++positives;
    }
    if (n == 0) return 1.0;
    // P(X >= positives), X ~ Binomial(n, 1/2)
    double p = 0.0;
    for (int k = positives; k <= n; ++k) {
        const double log_c = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                             std::lgamma(static_cast<double>(n - k) + 1.0);
        p += std::exp(log_c - n * std::log(2.0));
    }
    return std::min(p, 1.0);
}

StudyKind study_kind_from_string(const std::string& s) {
    if (s == "model_comparison") return StudyKind::ModelComparison;
    if (s == "trigger_sweep") return StudyKind::TriggerSweep;
    if (s == "system_levels") return StudyKind::SystemLevels;
    throw std::invalid_argument("unknown study: " + s);
}

namespace {

struct StudyArm {
    std::string name;
    EpisodeConfig cfg;
    TaskLevel level;
};

std::vector<StudyArm> build_arms(StudyKind kind, const StudyOptions& options) {
    std::vector<StudyArm> arms;
    auto with = [&](ModelKind model, TriggerSpec trigger, TaskLevel level, std::string name) {
        EpisodeConfig cfg = options.base;
        cfg.model = model;
        cfg.trigger = trigger;
        arms.push_back({std::move(name), cfg, level});
    };
    const TriggerSpec every10{TriggerKind::EveryN, 10, 1.07, false};
    const TriggerSpec logprob107{TriggerKind::Logprob, 10, 1.07, false};

    switch (kind) {
        case StudyKind::ModelComparison:
            with(ModelKind::FactorGraph, every10, options.level, "factor_graph");
            with(ModelKind::ResidualGp, every10, options.level, "residual_gp");
            break;
        case StudyKind::TriggerSweep: {
            with(ModelKind::FactorGraph, {TriggerKind::FirstStep, 10, 1.0, false}, options.level,
                 "first_step");
            with(ModelKind::FactorGraph, {TriggerKind::LastStep, 10, 1.0, false}, options.level,
                 "last_step");
            for (int n : {5, 10, 20})
                with(ModelKind::FactorGraph, {TriggerKind::EveryN, n, 1.0, false}, options.level,
                     "every_" + std::to_string(n));
            for (double alpha : {1.0, 1.07, 1.2}) {
                std::ostringstream name;
                name << "logprob_" << alpha;
                with(ModelKind::FactorGraph, {TriggerKind::Logprob, 10, alpha, false},
                     options.level, name.str());
            }
            break;
        }
        case StudyKind::SystemLevels:
            for (TaskLevel level : {TaskLevel::A, TaskLevel::B, TaskLevel::C}) {
                const std::string suffix = std::string("_") + task_level_name(level);
                with(ModelKind::FactorGraph, logprob107, level, "proposed" + suffix);
                with(ModelKind::ResidualGp, every10, level, "baseline" + suffix);
            }
            break;
    }
    return arms;
}

void write_study_csvs(const StudySummary& summary, const std::string& out_dir) {
    std::ostringstream trials;
    trials << "arm,level,env_seed,start_seed,final_rmse,trigger_count,wall_seconds,failed,error\n";
    trials.precision(17);
    for (const auto& t : summary.trials)
        trials << t.arm << ',' << task_level_name(t.level) << ',' << t.env_seed << ','
               << t.start_seed << ',' << t.final_rmse << ',' << t.trigger_count << ','
               << t.wall_seconds << ',' << (t.failed ? 1 : 0) << ',' << t.error << '\n';
    write_text_file(std::filesystem::path(out_dir) / "trials.csv", trials.str());

    std::ostringstream arms;
    arms << "arm,trials,failures,median_rmse,q25_rmse,q75_rmse\n";
    arms.precision(17);
    for (const auto& a : summary.arms)
        arms << a.arm << ',' << a.trials << ',' << a.failures << ',' << a.median_rmse << ','
             << a.q25_rmse << ',' << a.q75_rmse << '\n';
    write_text_file(std::filesystem::path(out_dir) / "summary.csv", arms.str());

    if (!summary.improvements.empty()) {
        std::ostringstream imp;
        imp << "label,median_percent_improvement,pairs\n";
        imp.precision(17);
        for (const auto& i : summary.improvements)
            imp << i.label << ',' << i.median_percent << ',' << i.percent_improvements.size()
                << '\n';
        write_text_file(std::filesystem::path(out_dir) / "improvement.csv", imp.str());
    }
}

}  // namespace

StudySummary run_study(StudyKind kind, const StudyOptions& options) {
    const std::vector<StudyArm> arms = build_arms(kind, options);

    struct Trial {
        int arm_index;
        std::uint64_t env_seed;
        std::uint64_t start_seed;
    };
    std::vector<Trial> trials;
    for (int a = 0; a < static_cast<int>(arms.size()); ++a)
        for (int e = 0; e < options.env_count; ++e)
            for (int s = 0; s < options.seed_count; ++s)
                trials.push_back({a, static_cast<std::uint64_t>(e), static_cast<std::uint64_t>(s)});

    StudySummary summary;
    summary.kind = kind;
    summary.trials.resize(trials.size());
    std::vector<RunLog> logs(trials.size());

    const int n = static_cast<int>(trials.size());
#pragma omp parallel for schedule(dynamic) if (options.parallel)
    for (int i = 0; i < n; ++i) {
        const Trial& trial = trials[i];
        const StudyArm& arm = arms[trial.arm_index];
        TrialResult result;
        result.arm = arm.name;
        result.env_seed = trial.env_seed;
        result.start_seed = trial.start_seed;
        result.level = arm.level;
        try {
            ScenarioGenParams gen = options.scenario;
            const Scenario scenario =
                generate_scenario(trial.env_seed, trial.start_seed, arm.level, gen);
            RunLog log = run_episode(scenario, arm.cfg);
            if (log.error.has_value()) {
                result.failed = true;
                result.error = *log.error;
            }
            result.final_rmse = log.final_rmse;
            result.trigger_count = log.trigger_count;
            result.wall_seconds = log.wall_seconds;
            logs[i] = std::move(log);
        } catch (const std::exception& e) {
            result.failed = true;
            result.error = e.what();
        }
        summary.trials[i] = result;
    }

    for (std::size_t a = 0; a < arms.size(); ++a) {
        ArmSummary arm_summary;
        arm_summary.arm = arms[a].name;
        std::vector<double> rmses;
        for (std::size_t i = 0; i < trials.size(); ++i) {
            if (trials[i].arm_index != static_cast<int>(a)) continue;
            ++arm_summary.trials;
            if (summary.trials[i].failed) {
                ++arm_summary.failures;
                continue;
            }
            rmses.push_back(summary.trials[i].final_rmse);
        }
        arm_summary.median_rmse = median(rmses);
        arm_summary.q25_rmse = quantile(rmses, 0.25);
        arm_summary.q75_rmse = quantile(rmses, 0.75);
        summary.arms.push_back(arm_summary);
    }

    // paired percent improvement, (baseline - proposed) / baseline
    auto paired = [&](const std::string& proposed_arm, const std::string& baseline_arm,
                      const std::string& label) {
        PairedImprovement imp;
        imp.label = label;
        for (int e = 0; e < options.env_count; ++e) {
            for (int s = 0; s < options.seed_count; ++s) {
                double proposed = std::nan(""), baseline = std::nan("");
                for (std::size_t i = 0; i < trials.size(); ++i) {
                    const auto& t = summary.trials[i];
                    if (t.failed || t.env_seed != static_cast<std::uint64_t>(e) ||
                        t.start_seed != static_cast<std::uint64_t>(s))
                        continue;
                    if (t.arm == proposed_arm) proposed = t.final_rmse;
                    if (t.arm == baseline_arm) baseline = t.final_rmse;
                }
                if (std::isnan(proposed) || std::isnan(baseline) || baseline == 0.0) continue;
                imp.percent_improvements.push_back(100.0 * (baseline - proposed) / baseline);
            }
        }
        imp.median_percent = median(imp.percent_improvements);
        summary.improvements.push_back(std::move(imp));
    };
    if (kind == StudyKind::ModelComparison)
        paired("factor_graph", "residual_gp", "factor_graph_vs_residual_gp");
    if (kind == StudyKind::SystemLevels)
        for (TaskLevel level : {TaskLevel::A, TaskLevel::B, TaskLevel::C}) {
            const std::string suffix = std::string("_") + task_level_name(level);
            paired("proposed" + suffix, "baseline" + suffix, std::string("level") + suffix);
        }

    if (!options.out_dir.empty()) {
        write_study_csvs(summary, options.out_dir);
        const std::filesystem::path dir = std::filesystem::path(options.out_dir) / "runlogs";
        for (std::size_t i = 0; i < trials.size(); ++i) {
            if (summary.trials[i].failed && logs[i].steps.empty()) continue;
            std::ostringstream name;
            name << arms[trials[i].arm_index].name << "_env" << trials[i].env_seed << "_seed"
                 << trials[i].start_seed << ".json";
            write_text_file(dir / name.str(), runlog_to_json(logs[i]).dump() + "\n");
        }
    }
    return summary;
}

}  // namespace luxplace
