#include "luxplace/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace luxplace {

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                             const std::vector<double>& x0, const std::vector<double>& init_step,
                             const NelderMeadOptions& options) {
    const int dim = static_cast<int>(x0.size());
    if (dim == 0) throw std::invalid_argument("nelder_mead: empty start point");
    if (init_step.size() != x0.size())
        throw std::invalid_argument("nelder_mead: init_step dimension mismatch");
    if (options.max_evaluations < dim + 1)
        throw std::invalid_argument("nelder_mead: budget below dimension + 1");

    int evals = 0;
    auto eval = [&](const std::vector<double>& x) {
        ++evals;
        return objective(x);
    };

    std::vector<std::vector<double>> simplex(dim + 1, x0);
    for (int i = 0; i < dim; ++i) simplex[i + 1][i] += init_step[i];
    std::vector<double> values(dim + 1);
    for (int i = 0; i <= dim && evals < options.max_evaluations; ++i)
        values[i] = eval(simplex[i]);

    std::vector<int> order(dim + 1);
    auto sort_simplex = [&] {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return values[a] < values[b]; });
    };

    auto simplex_size = [&] {
        double sz = 0.0;
        const auto& best = simplex[order[0]];
        for (int i = 1; i <= dim; ++i)
            for (int d = 0; d < dim; ++d)
                sz = std::max(sz, std::abs(simplex[order[i]][d] - best[d]));
        return sz;
    };

    sort_simplex();
    while (evals < options.max_evaluations && simplex_size() > options.simplex_tolerance) {
        const int worst = order[dim];
        const int best = order[0];
        const int second_worst = order[dim - 1];

        std::vector<double> centroid(dim, 0.0);
        for (int i = 0; i <= dim; ++i) {
            if (i == worst) continue;
            for (int d = 0; d < dim; ++d) centroid[d] += simplex[i][d];
        }
        for (double& v : centroid) v /= dim;

        auto along = [&](double coeff) {
            std::vector<double> x(dim);
            for (int d = 0; d < dim; ++d)
                x[d] = centroid[d] + coeff * (simplex[worst][d] - centroid[d]);
            return x;
        };

        const auto reflected = along(-options.reflection);
        const double fr = eval(reflected);

        if (fr < values[best]) {
            const auto expanded = along(-options.reflection * options.expansion);
            if (evals < options.max_evaluations) {
                const double fe = eval(expanded);
                if (fe < fr) {
                    simplex[worst] = expanded;
                    values[worst] = fe;
                } else {
                    simplex[worst] = reflected;
                    values[worst] = fr;
                }
            } else {
                simplex[worst] = reflected;
                values[worst] = fr;
            }
        } else if (fr < values[second_worst]) {
            simplex[worst] = reflected;
            values[worst] = fr;
        } else {
            const bool outside = fr < values[worst];
            const auto contracted =
                along(outside ? -options.reflection * options.contraction : options.contraction);
            if (evals >= options.max_evaluations) break;
            const double fc = eval(contracted);
            if (fc < std::min(fr, values[worst])) {
                simplex[worst] = contracted;
                values[worst] = fc;
            } else {
                // shrink toward the best vertex
                for (int i = 0; i <= dim; ++i) {
                    if (i == best) continue;
                    for (int d = 0; d < dim; ++d)
                        simplex[i][d] = simplex[best][d] +
                                        options.shrink * (simplex[i][d] - simplex[best][d]);
                    if (evals >= options.max_evaluations) break;
                    values[i] = eval(simplex[i]);
                }
            }
        }
        sort_simplex();
    }

    sort_simplex();
    NelderMeadResult result;
    result.x = simplex[order[0]];
    result.value = values[order[0]];
    result.evaluations = evals;
    return result;
}

}  // namespace luxplace
