#pragma once

#include <functional>
#include <vector>

namespace luxplace {

struct NelderMeadOptions {
    int max_evaluations = 200;
    double simplex_tolerance = 1e-4;  // stop when vertices collapse to this size
    // standard downhill-simplex coefficients
    double reflection = 1.0;
    double expansion = 2.0;
    double contraction = 0.5;
    double shrink = 0.5;
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int evaluations = 0;
};

// Derivative-free downhill simplex. The initial simplex is x0 plus one
// vertex per coordinate offset by init_step[i]. Deterministic.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                             const std::vector<double>& x0, const std::vector<double>& init_step,
                             const NelderMeadOptions& options);

}  // namespace luxplace
