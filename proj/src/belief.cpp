#include "luxplace/belief.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <nlohmann/json.hpp>

#include <cmath>

namespace luxplace {

namespace {
constexpr double kLogSqrt2Pi = 0.9189385332046727;  // ln(sqrt(2*pi))
}

double field_log_likelihood(const BeliefField& belief, const LightField& target,
                            const GridMap& grid) {
    if (belief.width != target.width || belief.height != target.height)
        throw std::invalid_argument("field_log_likelihood: grid mismatch");
    double total = 0.0;
    for (const Cell& c : grid.free_cells()) {
        const double sigma = belief.stddev(c);
        if (!(sigma > 0.0)) throw SolveError("field_log_likelihood: nonpositive sigma");
        const double z = (target.at(c) - belief.mean(c)) / sigma;
        total += -std::log(sigma) - kLogSqrt2Pi - 0.5 * z * z;
    }
    return total;
}

FactorGraphBelief::FactorGraphBelief(const GridMap& grid, const ObstacleSet& obstacles,
                                     BeliefNoise noise)
    : grid_(grid), noise_(noise), analytic_(grid) {
    free_index_.assign(static_cast<std::size_t>(grid_.cell_count()), -1);
    for (const Cell& c : grid_.free_cells()) free_index_[grid_.index(c)] = num_free_++;
    epoch_measurements_.assign(num_free_, std::nullopt);
    prev_config_.assign(num_free_, std::nullopt);

    // Link lattice: 4-neighbor free pairs with no obstacle crossing the
    // segment between cell centers; shared by both variable lattices.
    for (const Cell& c : grid_.free_cells()) {
        for (const Cell& n : {Cell{c.row, c.col + 1}, Cell{c.row + 1, c.col}}) {
            if (!grid_.is_free(n)) continue;
            if (obstacles.segment_blocked(grid_.cell_center(c), grid_.cell_center(n))) continue;
            links_.push_back({free_index_[grid_.index(c)], free_index_[grid_.index(n)]});
        }
    }
}

void FactorGraphBelief::rebuild_priors(const LightField& analytic) {
    require_same_shape(analytic, LightField(grid_), "rebuild_priors");
    analytic_ = analytic;
    solution_current_ = false;
}

void FactorGraphBelief::add_measurement(const Measurement& m) {
    if (!grid_.is_free(m.cell))
        throw std::invalid_argument("add_measurement: cell is not a free grid position");
    auto& slot = epoch_measurements_[free_index_[grid_.index(m.cell)]];
    if (slot.has_value()) ++replaced_measurements_;  // latest wins
    slot = m.value;
    solution_current_ = false;
}

void FactorGraphBelief::on_reconfigure(const LightField& new_analytic) {
    if (!last_.has_value() || !solution_current_)
        throw SolveError("on_reconfigure: requires a solve after the last mutation");
    const BeliefField& post = *last_;
    for (const Cell& c : grid_.free_cells()) {
        const int fi = free_index_[grid_.index(c)];
        if (!epoch_measurements_[fi].has_value() && !prev_config_[fi].has_value()) continue;
        const double mu = post.mu_u[post.index(c)];
        const double sd = post.sigma_u[post.index(c)];
        prev_config_[fi] = std::make_pair(mu, sd * sd);  // replaces any older prior
    }
    std::fill(epoch_measurements_.begin(), epoch_measurements_.end(), std::nullopt);
    rebuild_priors(new_analytic);
}

std::vector<FactorGraphBelief::Factor> FactorGraphBelief::factors() const {
    using Type = Factor::Type;
    std::vector<Factor> out;
    out.reserve(static_cast<std::size_t>(3) * num_free_ + 2 * links_.size());

    for (const Cell& c : grid_.free_cells()) {
        const int fi = free_index_[grid_.index(c)];
        const int vs = fi;
        const int vu = num_free_ + fi;

        out.push_back({Type::AnalyticPrior, 1, {vs, -1}, {1.0, 0.0}, analytic_.at(c),
                       noise_.sigma_analytic});

        if (prev_config_[fi].has_value()) {
            const auto [mean, var] = *prev_config_[fi];
            out.push_back({Type::PrevConfigPrior, 1, {vu, -1}, {1.0, 0.0}, mean, std::sqrt(var)});
        } else {
            out.push_back({Type::WeakPrior, 1, {vu, -1}, {1.0, 0.0}, 0.0, noise_.sigma_weak});
        }

        if (epoch_measurements_[fi].has_value()) {
            out.push_back({Type::Measurement, 2, {vs, vu}, {1.0, 1.0}, *epoch_measurements_[fi],
                           noise_.sigma_meas});
        }
    }

    for (const auto& [a, b] : links_) {
        out.push_back(
            {Type::Link, 2, {a, b}, {1.0, -1.0}, 0.0, noise_.sigma_link_base});
        // A summarized unknown variable already encodes its neighbors'
        // information; keeping its links would count that twice.
        if (!prev_config_[a].has_value() && !prev_config_[b].has_value())
            out.push_back({Type::Link, 2, {num_free_ + a, num_free_ + b}, {1.0, -1.0}, 0.0,
                           noise_.sigma_link_base});
    }
    return out;
}

BeliefField FactorGraphBelief::solve() {
    if (num_free_ == 0) throw SolveError("solve: graph is empty");
    const int n = variable_count();
    const auto factor_list = factors();

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(factor_list.size() * 4);
    Eigen::VectorXd eta = Eigen::VectorXd::Zero(n);
    for (const auto& f : factor_list) {
        const double w = 1.0 / (f.sigma * f.sigma);
        for (int i = 0; i < f.nvars; ++i) {
            eta[f.vars[i]] += f.coeffs[i] * f.rhs * w;
            for (int j = 0; j < f.nvars; ++j)
                triplets.emplace_back(f.vars[i], f.vars[j], f.coeffs[i] * f.coeffs[j] * w);
        }
    }
    Eigen::SparseMatrix<double> info(n, n);
    info.setFromTriplets(triplets.begin(), triplets.end());

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(info);
    if (solver.info() != Eigen::Success)
        throw SolveError("solve: information matrix is not positive definite");
    const Eigen::VectorXd map = solver.solve(eta);

    BeliefField field(grid_.width(), grid_.height());
    Eigen::MatrixXd rhs(n, 2);
    for (const Cell& c : grid_.free_cells()) {
        const int vs = var_source(c);
        const int vu = var_unknown(c);
        rhs.setZero();
        rhs(vs, 0) = 1.0;
        rhs(vu, 1) = 1.0;
        const Eigen::MatrixXd cols = solver.solve(rhs);
        const double var_s = cols(vs, 0);
        const double var_u = cols(vu, 1);
        const double cov_su = cols(vu, 0);
        if (!(var_s > 0.0) || !(var_u > 0.0))
            throw SolveError("solve: nonpositive marginal variance");

        const std::size_t i = field.index(c);
        field.mu_s[i] = map[vs];
        field.sigma_s[i] = std::sqrt(var_s);
        field.mu_u[i] = map[vu];
        field.sigma_u[i] = std::sqrt(var_u);
        field.mu_total[i] = map[vs] + map[vu];
        const double var_total = var_s + var_u + 2.0 * cov_su;
        if (!(var_total > 0.0)) throw SolveError("solve: nonpositive total variance");
        field.sigma_total[i] = std::sqrt(var_total);
    }

    last_ = field;
    solution_current_ = true;
    return field;
}

double FactorGraphBelief::log_likelihood_of(const LightField& target) const {
    if (!last_.has_value()) throw SolveError("log_likelihood_of: no solution yet");
    return field_log_likelihood(*last_, target, grid_);
}

nlohmann::json FactorGraphBelief::dump_graph() const {
    nlohmann::json j;
    j["num_variables"] = variable_count();
    j["num_free_cells"] = num_free_;
    j["noise"] = {{"sigma_analytic", noise_.sigma_analytic},
                  {"sigma_meas", noise_.sigma_meas},
                  {"sigma_link_base", noise_.sigma_link_base},
                  {"sigma_weak", noise_.sigma_weak}};
    auto type_name = [](Factor::Type t) {
        switch (t) {
            case Factor::Type::AnalyticPrior: return "analytic_prior";
            case Factor::Type::WeakPrior: return "weak_prior";
            case Factor::Type::PrevConfigPrior: return "prev_config_prior";
            case Factor::Type::Link: return "link";
            case Factor::Type::Measurement: return "measurement";
        }
        return "?";
    };
    nlohmann::json fs = nlohmann::json::array();
    for (const auto& f : factors()) {
        nlohmann::json e;
        e["type"] = type_name(f.type);
        e["vars"] = std::vector<int>(f.vars.begin(), f.vars.begin() + f.nvars);
        e["coeffs"] = std::vector<double>(f.coeffs.begin(), f.coeffs.begin() + f.nvars);
        e["rhs"] = f.rhs;
        e["sigma"] = f.sigma;
        fs.push_back(std::move(e));
    }
    j["factors"] = std::move(fs);
    return j;
}

}  // namespace luxplace
