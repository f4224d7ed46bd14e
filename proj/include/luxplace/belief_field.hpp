#pragma once

#include <memory>
#include <string>

#include "luxplace/light_field.hpp"
#include "luxplace/scenario.hpp"

namespace luxplace {

// Per-cell Gaussian belief over the source intensity (v_s), the unknown
// background intensity (v_u) and their sum. Means are stored raw (the
// linear-Gaussian model may go negative); accessors clamp for consumers.
struct BeliefField {
    int width = 0;
    int height = 0;
    std::vector<double> mu_s, sigma_s;
    std::vector<double> mu_u, sigma_u;
    std::vector<double> mu_total, sigma_total;

    BeliefField() = default;
    BeliefField(int w, int h)
        : width(w),
          height(h),
          mu_s(static_cast<std::size_t>(w) * h, 0.0),
          sigma_s(static_cast<std::size_t>(w) * h, 0.0),
          mu_u(static_cast<std::size_t>(w) * h, 0.0),
          sigma_u(static_cast<std::size_t>(w) * h, 0.0),
          mu_total(static_cast<std::size_t>(w) * h, 0.0),
          sigma_total(static_cast<std::size_t>(w) * h, 0.0) {}

    std::size_t index(const Cell& c) const {
        return static_cast<std::size_t>(c.row) * width + c.col;
    }
    double mean(const Cell& c) const { return std::max(mu_total[index(c)], 0.0); }
    double stddev(const Cell& c) const { return sigma_total[index(c)]; }
    double mean_unknown(const Cell& c) const { return std::max(mu_u[index(c)], 0.0); }
    double stddev_unknown(const Cell& c) const { return sigma_u[index(c)]; }

    // Unknown-intensity estimate clamped at zero, as used by placement.
    LightField unknown_estimate() const {
        LightField f(width, height);
        for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] = std::max(mu_u[i], 0.0);
        return f;
    }
};

// Joint log-likelihood of observing `target` under the belief, assuming
// independence across grid positions.
double field_log_likelihood(const BeliefField& belief, const LightField& target,
                            const GridMap& grid);

// Common surface for the factor-graph model and the residual-GP baseline.
class IntensityEstimator {
  public:
    virtual ~IntensityEstimator() = default;
    virtual void reset(const LightField& analytic) = 0;
    virtual void add_measurement(const Measurement& m) = 0;
    virtual BeliefField update() = 0;
    virtual void on_reconfigure(const LightField& new_analytic) = 0;
    virtual std::string name() const = 0;
};

}  // namespace luxplace
