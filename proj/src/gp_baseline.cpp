#include "luxplace/gp_baseline.hpp"

#include <Eigen/Dense>

namespace luxplace {
namespace {

double se_kernel(const Vec2& a, const Vec2& b, const GpHyperparams& h) {
    const double d2 = (a - b).squared_norm();
    return h.signal_stddev * h.signal_stddev * std::exp(-d2 / (2.0 * h.length_scale * h.length_scale));
}

}  // namespace

void ResidualGp::fit(const std::vector<Vec2>& inputs, const std::vector<double>& residuals) {
    if (inputs.size() != residuals.size())
        throw std::invalid_argument("gp_fit: inputs/residuals size mismatch");
    inputs_ = inputs;
    const int n = static_cast<int>(inputs.size());
    alpha_.assign(n, 0.0);
    chol_.assign(static_cast<std::size_t>(n) * n, 0.0);
    if (n == 0) return;

    Eigen::MatrixXd K(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) K(i, j) = se_kernel(inputs[i], inputs[j], hyper_);
    K.diagonal().array() += hyper_.noise_stddev * hyper_.noise_stddev;

    const Eigen::LLT<Eigen::MatrixXd> llt(K);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("gp_fit: kernel matrix is not positive definite");

    const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(residuals.data(), n);
    const Eigen::VectorXd a = llt.solve(y);
    for (int i = 0; i < n; ++i) alpha_[i] = a[i];
    const Eigen::MatrixXd L = llt.matrixL();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) chol_[static_cast<std::size_t>(i) * n + j] = L(i, j);
}

std::pair<double, double> ResidualGp::predict(const Vec2& p) const {
    const int n = static_cast<int>(inputs_.size());
    const double prior_var = hyper_.signal_stddev * hyper_.signal_stddev;
    if (n == 0) return {0.0, prior_var};

    Eigen::VectorXd k(n);
    for (int i = 0; i < n; ++i) k[i] = se_kernel(p, inputs_[i], hyper_);

    double mean = 0.0;
    for (int i = 0; i < n; ++i) mean += k[i] * alpha_[i];

    // v = L^-1 k by forward substitution; predictive var = k** - v'v
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) {
        double s = k[i];
        for (int j = 0; j < i; ++j) s -= chol_[static_cast<std::size_t>(i) * n + j] * v[j];
        v[i] = s / chol_[static_cast<std::size_t>(i) * n + i];
    }
    const double var = std::max(prior_var - v.squaredNorm(), 1e-12);
    return {mean, var};
}

ResidualGp gp_fit(const std::vector<Vec2>& inputs, const std::vector<double>& residuals,
                  GpHyperparams hyper) {
    ResidualGp gp(hyper);
    gp.fit(inputs, residuals);
    return gp;
}

BeliefField gp_predict(const ResidualGp& gp, const LightField& analytic, const GridMap& grid) {
    BeliefField field(grid.width(), grid.height());
    const double noise_floor = gp.hyperparams().noise_stddev;
    for (const Cell& c : grid.free_cells()) {
        const auto [res_mean, res_var] = gp.predict(grid.cell_center(c));
        const std::size_t i = field.index(c);
        field.mu_s[i] = analytic.at(c);
        field.sigma_s[i] = noise_floor;  // nominal; the GP models one combined uncertainty
        field.mu_u[i] = res_mean;
        field.sigma_u[i] = std::sqrt(res_var);
        field.mu_total[i] = analytic.at(c) + res_mean;
        field.sigma_total[i] = std::sqrt(res_var);
    }
    return field;
}

}  // namespace luxplace
