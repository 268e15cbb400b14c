#ifndef QAOA_STRATEGIES_HPP
#define QAOA_STRATEGIES_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qaoa/optimize.hpp"
#include "qaoa/ppn.hpp"
#include "qaoa/qaoa.hpp"

namespace qaoa {

struct StrategyOutcome {
    ParameterSet final_params;
    double final_value = 0.0;
    double approx_ratio = 0.0;
    std::map<std::string, long long> calls_by_stage;  // "depth1", "extra", "final_opt"
    int chosen_depth = 0;
    // depth-search diagnostics: every evaluated expected value (depth 1 first)
    // and the number of while-loop iterations
    std::vector<double> visited_values;
    long long loop_iterations = 0;

    long long total_calls() const;
};

// Depth-1 solve from the recommended list, compose the network out to
// target_depth, then one bounded optimization from the prediction. Network
// inference costs zero expected-value calls.
StrategyOutcome strategy_ppn1(const MaxCutQaoa& problem, const PpnModel& model, int target_depth,
                              const RecommendedList& rec, EvalCounter& counter);

// Depth search: evaluate the depth-1 optimum once, then keep predicting the
// next depth and evaluating while the expected value strictly increases.
// Returns the parameters before the first decrease. Extra calls = loop
// iterations + 1 (the initial depth-1 evaluation).
StrategyOutcome strategy_ppn2(const MaxCutQaoa& problem, const PpnModel& model,
                              const RecommendedList& rec, EvalCounter& counter);

// Annealing-schedule initialization: gamma_i = (i / p) * dt,
// beta_i = (1 - i / p) * dt for i = 1..p.
ParameterSet tqa_params(int target_depth, double delta_t);

// Uniform draws over the parameter box; deterministic per seed.
ParameterSet random_params(int depth, std::uint64_t seed);

// Single bounded optimization from init; all calls recorded under "extra".
StrategyOutcome run_baseline(const MaxCutQaoa& problem, const ParameterSet& init,
                             EvalCounter& counter);

}  // namespace qaoa

#endif  // QAOA_STRATEGIES_HPP
