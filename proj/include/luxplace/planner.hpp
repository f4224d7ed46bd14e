#pragma once

#include <memory>
#include <optional>

#include "luxplace/belief_field.hpp"

namespace luxplace {

struct PlannerParams {
    int num_rollouts = 50;
    int max_depth = 10;
    double discount = 0.95;
    std::optional<double> exploration_c;  // unset = half the entropy-reward spread at plan start
    double t_test_alpha = 0.05;
    bool collect_trace = false;
};

// Differential entropy of the cell's Gaussian belief, from the snapshot
// taken when planning started.
double entropy_reward(const BeliefField& belief, const Cell& cell);

struct PlanNode {
    Cell cell;
    int depth = 0;
    int visits = 0;
    double value_sum = 0.0;
    std::vector<double> returns;  // backed-up discounted returns, for the t-test
    std::array<std::unique_ptr<PlanNode>, 4> children;  // indexed by Action

    double mean_value() const { return visits > 0 ? value_sum / visits : 0.0; }
};

struct PlanResult {
    std::vector<Action> actions;  // greedy (max visit count) path from the root
    std::unique_ptr<PlanNode> root;
    int iterations = 0;
    double exploration_c = 0.0;
    std::string trace_json;  // populated when collect_trace is set
};

struct PlanError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Rollout tree search maximizing discounted entropy along the path. The
// belief is a read-only snapshot: measurement values cannot change the
// posterior variances of a linear-Gaussian model, so the search is a
// deterministic information-gathering problem. Cells revisited within one
// rollout path yield no reward.
PlanResult plan(const GridMap& grid, const BeliefField& belief, const Cell& start,
                const PlannerParams& params, std::uint64_t seed);

// Number of leading actions worth executing from the plan: walks the greedy
// path and keeps steps while Welch's t-test separates the best child's
// return samples from the runner-up's. Always at least 1.
int actions_to_execute(const PlanResult& result, const PlannerParams& params);

// Two-sided Welch's t-test p-value for equal means.
double welch_p_value(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace luxplace
