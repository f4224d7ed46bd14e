#pragma once

#include <array>
#include <optional>

#include <nlohmann/json_fwd.hpp>

#include "luxplace/belief_field.hpp"

namespace luxplace {

struct BeliefNoise {
    double sigma_analytic = 0.1;   // distrust of the analytical model (f_a)
    double sigma_meas = 0.02;      // sensor noise assumed by the model (f_m)
    double sigma_link_base = 0.05; // smoothness between adjacent cells (f_l)
    double sigma_weak = 10.0;      // wide prior keeping unknowns well-posed (f_w)

    static BeliefNoise defaults_for(double brightness_scale) {
        return {0.1 * brightness_scale, 0.02 * brightness_scale, 0.05 * brightness_scale,
                10.0 * brightness_scale};
    }
};

struct SolveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Factor-graph belief over per-cell source and unknown intensities.
//
// Two variables per free cell: v_s (intensity from the robot's emitters)
// and v_u (unknown background intensity). Factors:
//   - analytic prior on each v_s, mean from the forward lighting model;
//   - weak zero prior on each v_u without reconfiguration history;
//   - link factors between adjacent free cells with a clear line between
//     them, independently on the v_s and v_u lattices;
//   - additive measurement factors tying v_s + v_u to a sensor reading;
//   - previous-configuration priors carrying a v_u posterior across emitter
//     reconfigurations.
//
// All factors are linear-Gaussian, so the MAP is one sparse weighted
// least-squares solve and marginals come from back-substitution on the
// factorization.
class FactorGraphBelief final : public IntensityEstimator {
  public:
    FactorGraphBelief(const GridMap& grid, const ObstacleSet& obstacles, BeliefNoise noise);

    // Installs analytic priors for the current configuration; weak priors
    // cover unknowns that carry no reconfiguration history.
    void rebuild_priors(const LightField& analytic);

    // Latest measurement wins if a cell is measured twice in one epoch.
    void add_measurement(const Measurement& m) override;

    // Summarizes every measured unknown variable into a unary prior at its
    // current posterior marginal, drops the epoch's measurement factors and
    // re-derives analytic priors from the new configuration's field.
    // Requires a solve() after the last mutation.
    void on_reconfigure(const LightField& new_analytic) override;

    BeliefField solve();

    // Eq. of the joint observation likelihood under cell independence;
    // requires a current solution.
    double log_likelihood_of(const LightField& target) const;

    // IntensityEstimator surface
    void reset(const LightField& analytic) override { rebuild_priors(analytic); }
    BeliefField update() override { return solve(); }
    std::string name() const override { return "factor_graph"; }

    struct Factor {
        enum class Type { AnalyticPrior, WeakPrior, PrevConfigPrior, Link, Measurement };
        Type type;
        int nvars = 1;
        std::array<int, 2> vars{-1, -1};
        std::array<double, 2> coeffs{1.0, 0.0};
        double rhs = 0.0;
        double sigma = 1.0;
    };
    // Current factor list; feeds the solver, the JSON dump and the dense
    // test oracle.
    std::vector<Factor> factors() const;

    nlohmann::json dump_graph() const;

    int variable_count() const { return 2 * num_free_; }
    int var_source(const Cell& c) const { return free_index_.at(grid_.index(c)); }
    int var_unknown(const Cell& c) const { return num_free_ + free_index_.at(grid_.index(c)); }
    const GridMap& grid() const { return grid_; }
    int replaced_measurement_count() const { return replaced_measurements_; }
    bool has_solution() const { return last_.has_value(); }

  private:
    GridMap grid_;
    BeliefNoise noise_;
    int num_free_ = 0;
    std::vector<int> free_index_;              // grid index -> dense variable index, -1 blocked
    std::vector<std::array<int, 2>> links_;    // free-index pairs with clear line between cells
    LightField analytic_;
    std::vector<std::optional<double>> epoch_measurements_;  // by free index
    std::vector<std::optional<std::pair<double, double>>> prev_config_;  // (mean, variance)
    std::optional<BeliefField> last_;
    bool solution_current_ = false;
    int replaced_measurements_ = 0;
};

}  // namespace luxplace
