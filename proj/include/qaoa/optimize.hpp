#ifndef QAOA_OPTIMIZE_HPP
#define QAOA_OPTIMIZE_HPP

#include <functional>
#include <utility>
#include <vector>

#include "qaoa/qaoa.hpp"
#include "qaoa/rng.hpp"

namespace qaoa {

struct BoxBounds {
    std::vector<double> lo;
    std::vector<double> hi;
};

struct MinimizeOptions {
    double f_tol = 1e-8;        // stop when the objective improves by less
    double grad_tol = 1e-6;     // or projected-gradient infinity norm falls below
    int max_iterations = 500;
    double fd_step = 1e-6;      // central-difference step
    int history = 10;           // L-BFGS memory
};

struct MinimizeResult {
    std::vector<double> x;
    double f = 0.0;
    long long n_evals = 0;  // every objective call, finite-difference probes included
    bool converged = false;
};

// Box-constrained quasi-Newton minimization: L-BFGS directions, backtracking
// line search along the projected path, gradients by central finite
// differences. Deterministic given x0. Finite-difference probes may step just
// outside the box, so the objective must be evaluable in a small
// neighbourhood of it. Returns the best accepted iterate (never a point
// outside the box).
MinimizeResult bounded_minimize(const std::function<double(const std::vector<double>&)>& objective,
                                std::vector<double> x0, const BoxBounds& bounds,
                                const MinimizeOptions& opts = {});

struct OptimizeResult {
    ParameterSet best_params;
    double best_value = 0.0;     // F_QAOA at best_params (maximization)
    long long n_evals = 0;
    bool converged = false;
};

// [0, gamma_max] x [0, beta_max] per layer; layout (gamma_1..gamma_p, beta_1..beta_p).
BoxBounds qaoa_box(int depth);

// Maximizes F_QAOA from init by minimizing its negation over the parameter
// box. Every statevector evaluation goes through the counter.
OptimizeResult optimize_qaoa(const MaxCutQaoa& problem, const ParameterSet& init,
                             EvalCounter& counter);

// Sample Pearson correlation coefficient.
double pearson(const std::vector<double>& xs, const std::vector<double>& ys);

// Least-squares line beta = slope * gamma + intercept through depth-1 optima,
// plus points on the line used to seed depth-1 optimization.
struct RecommendedList {
    double slope = 0.0;
    double intercept = 0.0;
    std::vector<std::pair<double, double>> points;  // (gamma, beta)
};

// OLS fit of beta on gamma; emits n_points points evenly spaced in gamma over
// the observed range, clipped to the parameter box.
RecommendedList fit_depth1_regression(const std::vector<std::pair<double, double>>& optima,
                                      int n_points = 10);

// Evaluates F_QAOA at every recommended point, then optimizes from the best
// one. n_evals = list size + optimizer evaluations.
OptimizeResult depth1_solve(const MaxCutQaoa& problem, const RecommendedList& rec,
                            EvalCounter& counter);

// Quasi-optimal parameter sets for depths 1..max_depth of one graph.
struct DepthLabels {
    std::vector<ParameterSet> params;  // [d-1] holds depth d
    std::vector<double> values;
};

// Depth-progressive multi-start labelling: depth 1 from the recommended list
// (when given) plus random restarts; each higher depth starts from the
// previous optimum with a (0, 0) layer appended, an annealing-schedule start,
// and restarts/2 random starts. Values are non-decreasing in depth by
// construction.
DepthLabels generate_labels(const MaxCutQaoa& problem, int max_depth, int restarts,
                            EvalCounter& counter, Rng& rng,
                            const RecommendedList* rec = nullptr);

}  // namespace qaoa

#endif  // QAOA_OPTIMIZE_HPP
