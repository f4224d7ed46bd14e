#pragma once

#include "luxplace/belief_field.hpp"

namespace luxplace {

struct GpHyperparams {
    double length_scale = 0.7;      // meters
    double signal_stddev = 0.2;
    double noise_stddev = 0.02;

    static GpHyperparams defaults_for(double spacing, double brightness_scale,
                                      double sigma_meas) {
        return {2.0 * spacing, 0.2 * brightness_scale, sigma_meas};
    }
};

// Exact Gaussian-process regression on the residual between the analytical
// lighting model and the measurements, squared-exponential kernel, fixed
// hyperparameters. The kernel sees only Euclidean distance, so the model is
// obstacle-blind; that is the point of the comparison.
class ResidualGp {
  public:
    ResidualGp() = default;
    explicit ResidualGp(GpHyperparams hyper) : hyper_(hyper) {}

    void fit(const std::vector<Vec2>& inputs, const std::vector<double>& residuals);

    // Latent predictive mean/variance of the residual at p.
    std::pair<double, double> predict(const Vec2& p) const;

    const GpHyperparams& hyperparams() const { return hyper_; }
    std::size_t training_size() const { return inputs_.size(); }

  private:
    GpHyperparams hyper_;
    std::vector<Vec2> inputs_;
    std::vector<double> alpha_;            // (K + sigma_n^2 I)^-1 y
    std::vector<double> chol_;             // lower Cholesky factor, row-major
};

ResidualGp gp_fit(const std::vector<Vec2>& inputs, const std::vector<double>& residuals,
                  GpHyperparams hyper);

// Belief over the full field: analytic prediction plus residual mean, with
// the GP predictive spread as the uncertainty.
BeliefField gp_predict(const ResidualGp& gp, const LightField& analytic, const GridMap& grid);

// Estimator adapter: residual targets are frozen against the analytic field
// current at measurement time; reconfiguration only swaps the base field.
class ResidualGpEstimator final : public IntensityEstimator {
  public:
    ResidualGpEstimator(const GridMap& grid, GpHyperparams hyper)
        : grid_(grid), hyper_(hyper), analytic_(grid) {}

    void reset(const LightField& analytic) override { analytic_ = analytic; }
    void add_measurement(const Measurement& m) override {
        inputs_.push_back(grid_.cell_center(m.cell));
        residuals_.push_back(m.value - analytic_.at(m.cell));
    }
    BeliefField update() override {
        return gp_predict(gp_fit(inputs_, residuals_, hyper_), analytic_, grid_);
    }
    void on_reconfigure(const LightField& new_analytic) override { analytic_ = new_analytic; }
    std::string name() const override { return "residual_gp"; }

  private:
    GridMap grid_;
    GpHyperparams hyper_;
    LightField analytic_;
    std::vector<Vec2> inputs_;
    std::vector<double> residuals_;
};

}  // namespace luxplace
