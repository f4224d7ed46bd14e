#pragma once

#include <optional>

#include <nlohmann/json_fwd.hpp>

#include "luxplace/belief.hpp"
#include "luxplace/gp_baseline.hpp"
#include "luxplace/placement.hpp"
#include "luxplace/planner.hpp"
#include "luxplace/trigger.hpp"

namespace luxplace {

enum class ModelKind { FactorGraph, ResidualGp };

const char* model_kind_name(ModelKind kind);
ModelKind model_kind_from_string(const std::string& s);

struct EpisodeConfig {
    ModelKind model = ModelKind::FactorGraph;
    TriggerSpec trigger;
    int max_steps = 100;
    PlannerParams planner;
    int robot_reflections = 1;  // reflections assumed by the robot's forward model
    BeliefNoise noise;          // derived from brightness scale unless overridden
    bool noise_overridden = false;
    int placement_budget_factor = 150;  // evaluations per restart = factor * num emitters
    bool optimize_brightness = true;
    bool debug_plan_traces = false;

    BeliefNoise resolved_noise(double brightness_scale) const {
        return noise_overridden ? noise : BeliefNoise::defaults_for(brightness_scale);
    }
};

struct StepRecord {
    int t = 0;
    Cell cell;
    double measurement = 0.0;
    double log_lik = 0.0;
    bool triggered = false;
    double trigger_threshold = 0.0;
    bool replanned = false;
    int plan_length = 0;
    int plan_executed = 0;
};

struct ConfigRecord {
    int t = 0;
    EmitterConfig config;
    double achieved_rmse = 0.0;  // against the desired field, ground-truth render
    double objective = 0.0;      // placement objective (0 for the initial config)
    int evaluations = 0;
};

struct RunLog {
    std::uint64_t env_seed = 0;
    std::uint64_t start_seed = 0;
    TaskLevel level = TaskLevel::A;
    std::string model;
    std::string trigger;
    int max_steps = 0;
    std::vector<StepRecord> steps;
    std::vector<ConfigRecord> configs;  // [0] is the initial configuration
    std::vector<int> free_cell_indices;  // row-major; makes metrics recomputable
    LightField desired;
    LightField achieved_final;
    double final_rmse = 0.0;
    std::vector<double> rmse_curve;  // per step, under the then-active configuration
    int trigger_count = 0;           // reconfigurations after t = 0's initial placement
    double wall_seconds = 0.0;
    std::optional<std::string> error;
};

double rmse(const LightField& achieved, const LightField& desired, const GridMap& grid);

RunLog run_episode(const Scenario& scenario, const EpisodeConfig& config);

nlohmann::json runlog_to_json(const RunLog& log);
RunLog runlog_from_json(const nlohmann::json& j);

enum class StudyKind { ModelComparison, TriggerSweep, SystemLevels };

StudyKind study_kind_from_string(const std::string& s);

struct TrialResult {
    std::string arm;
    std::uint64_t env_seed = 0;
    std::uint64_t start_seed = 0;
    TaskLevel level = TaskLevel::A;
    double final_rmse = 0.0;
    int trigger_count = 0;
    double wall_seconds = 0.0;
    bool failed = false;
    std::string error;
};

struct ArmSummary {
    std::string arm;
    double median_rmse = 0.0;
    double q25_rmse = 0.0;
    double q75_rmse = 0.0;
    int trials = 0;
    int failures = 0;
};

struct PairedImprovement {
    std::string label;  // e.g. level or model pairing
    std::vector<double> percent_improvements;
    double median_percent = 0.0;
};

struct StudySummary {
    StudyKind kind;
    std::vector<TrialResult> trials;
    std::vector<ArmSummary> arms;
    std::vector<PairedImprovement> improvements;
};

struct StudyOptions {
    int env_count = 5;
    int seed_count = 5;
    TaskLevel level = TaskLevel::A;  // component studies; SystemLevels runs A..C
    EpisodeConfig base;
    ScenarioGenParams scenario;
    std::string out_dir;  // empty: nothing written
    bool parallel = true;
};

// Runs every arm of the named study over env_count x seed_count scenarios
// (trials run in parallel; each is independently seeded and deterministic).
// Writes trials.csv, summary.csv, improvement.csv and per-trial run logs
// when out_dir is set.
StudySummary run_study(StudyKind kind, const StudyOptions& options);

double median(std::vector<double> values);
double quantile(std::vector<double> values, double q);

// One-sided exact binomial sign test: P(#positives >= observed | p = 1/2),
// zero differences excluded.
double sign_test_p_value(const std::vector<double>& differences);

}  // namespace luxplace
