#include "qaoa/strategies.hpp"

#include <stdexcept>

namespace qaoa {

namespace {

constexpr int kDepthSearchCap = 50;

}  // namespace

long long StrategyOutcome::total_calls() const {
    long long total = 0;
    for (const auto& [stage, calls] : calls_by_stage) total += calls;
    return total;
}

StrategyOutcome strategy_ppn1(const MaxCutQaoa& problem, const PpnModel& model, int target_depth,
                              const RecommendedList& rec, EvalCounter& counter) {
    if (target_depth < 2) throw std::invalid_argument("strategy_ppn1: target_depth must be >= 2");

    const long long before = counter.count;
    const OptimizeResult depth1 = depth1_solve(problem, rec, counter);
    const long long depth1_calls = counter.count - before;

    Tensor3 predicted = ppn_compose(model, normalize(depth1.best_params), target_depth - 1);
    const OptimizeResult final =
        optimize_qaoa(problem, denormalize(predicted), counter);

    StrategyOutcome outcome;
    outcome.final_params = final.best_params;
    outcome.final_value = final.best_value;
    outcome.approx_ratio = final.best_value / problem.optimum();
    outcome.calls_by_stage["depth1"] = depth1_calls;
    outcome.calls_by_stage["final_opt"] = final.n_evals;
    outcome.chosen_depth = target_depth;
    return outcome;
}

StrategyOutcome strategy_ppn2(const MaxCutQaoa& problem, const PpnModel& model,
                              const RecommendedList& rec, EvalCounter& counter) {
    const long long before = counter.count;
    const OptimizeResult depth1 = depth1_solve(problem, rec, counter);
    const long long depth1_calls = counter.count - before;

    StrategyOutcome outcome;
    outcome.calls_by_stage["depth1"] = depth1_calls;

    double best_output = 0.0;
    ParameterSet best_params = depth1.best_params;
    ParameterSet current_params = depth1.best_params;
    Tensor3 current = normalize(depth1.best_params);
    double temp_output = problem.expected_value(current_params, counter);
    outcome.visited_values.push_back(temp_output);
    long long extra_calls = 1;

    while (temp_output > best_output) {
        best_output = temp_output;
        best_params = current_params;
        if (best_params.depth() >= kDepthSearchCap)
            throw std::runtime_error("strategy_ppn2: depth cap reached without a decrease");
        current = ppn_forward(model, current);
        current_params = denormalize(current);
        temp_output = problem.expected_value(current_params, counter);
        outcome.visited_values.push_back(temp_output);
        ++extra_calls;
        ++outcome.loop_iterations;
    }

    outcome.final_params = best_params;
    outcome.final_value = best_output;
    outcome.approx_ratio = best_output / problem.optimum();
    outcome.calls_by_stage["extra"] = extra_calls;
    outcome.chosen_depth = best_params.depth();
    return outcome;
}

ParameterSet tqa_params(int target_depth, double delta_t) {
    if (target_depth < 1) throw std::invalid_argument("tqa_params: target_depth must be >= 1");
    if (!(delta_t > 0.0)) throw std::invalid_argument("tqa_params: delta_t must be positive");
    ParameterSet p;
    p.gammas.resize(target_depth);
    p.betas.resize(target_depth);
    for (int i = 1; i <= target_depth; ++i) {
        const double frac = static_cast<double>(i) / target_depth;
        p.gammas[i - 1] = frac * delta_t;
        p.betas[i - 1] = (1.0 - frac) * delta_t;
    }
    if (!params_in_box(p))
        throw std::invalid_argument("tqa_params: schedule leaves the parameter box");
    return p;
}

ParameterSet random_params(int depth, std::uint64_t seed) {
    if (depth < 1) throw std::invalid_argument("random_params: depth must be >= 1");
    Rng rng(seed);
    ParameterSet p;
    p.gammas.resize(depth);
    p.betas.resize(depth);
    for (int i = 0; i < depth; ++i) p.gammas[i] = rng.uniform() * gamma_max();
    for (int i = 0; i < depth; ++i) p.betas[i] = rng.uniform() * beta_max();
    return p;
}

StrategyOutcome run_baseline(const MaxCutQaoa& problem, const ParameterSet& init,
                             EvalCounter& counter) {
    const OptimizeResult r = optimize_qaoa(problem, init, counter);
    StrategyOutcome outcome;
    outcome.final_params = r.best_params;
    outcome.final_value = r.best_value;
    outcome.approx_ratio = r.best_value / problem.optimum();
    outcome.calls_by_stage["extra"] = r.n_evals;
    outcome.chosen_depth = r.best_params.depth();
    return outcome;
}

}  // namespace qaoa
