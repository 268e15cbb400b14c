#ifndef QAOA_BENCH_HPP
#define QAOA_BENCH_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qaoa/dataset.hpp"
#include "qaoa/strategies.hpp"

namespace qaoa {

struct LabelRun {
    std::vector<LabeledInstance> labels;
    RecommendedList regression;
};

// Depth-progressive labelling over the train split. First pass finds the
// depth-1 optima by multi-start, then the recommended list is fitted and the
// final labels regenerated through it. Parallel over graphs, deterministic
// for any thread count.
LabelRun label_dataset(const std::vector<DatasetEntry>& dataset, int max_depth, int restarts,
                       std::uint64_t seed, int n_threads);

struct GraphRecord {
    int graph_id = 0;
    std::string strategy;
    int target_depth = 0;
    StrategyOutcome outcome;
};

struct StrategyRow {
    double mean_approx_ratio = 0.0;
    std::map<std::string, double> mean_calls_by_stage;
    double mean_extra_calls = 0.0;  // mean of (total - depth1)
    double mean_total_calls = 0.0;
    int n_graphs = 0;
};

struct BenchmarkReport {
    std::map<std::string, StrategyRow> rows;
    std::vector<GraphRecord> records;
    std::uint64_t seed = 0;
    int target_depth = 0;
    int n_test_graphs = 0;
    std::string dataset_hash;
    std::string model_hash;
    std::string labels_hash;
    std::string timestamp;
};

struct BenchConfig {
    std::vector<std::string> strategies;  // subset of {ppn1, ppn2, tqa, random}
    int target_depth = 10;
    double tqa_delta_t = 0.625;
    std::uint64_t seed = 1;
    int n_threads = 1;
};

// Runs every requested strategy over the test split. model/rec may be null
// only when no PPN strategy is requested.
BenchmarkReport run_benchmark(const std::vector<DatasetEntry>& dataset, const PpnModel* model,
                              const RecommendedList* rec, const BenchConfig& config);

std::string report_json(const BenchmarkReport& report);
std::string report_csv(const BenchmarkReport& report);

// Per-depth predicted vs freshly-optimized curves for one graph (the data
// behind a predicted-ratio / prediction-error plot).
struct DepthCurvePoint {
    int depth = 0;
    double predicted_ratio = 0.0;
    double optimal_ratio = 0.0;
    double prediction_error = 0.0;  // squared distance on normalized tensors
};

std::vector<DepthCurvePoint> depth_prediction_curve(const MaxCutQaoa& problem,
                                                    const PpnModel& model,
                                                    const RecommendedList& rec, int max_depth,
                                                    std::uint64_t seed);

std::string depth_curve_csv(const std::vector<DepthCurvePoint>& curve);

}  // namespace qaoa

#endif  // QAOA_BENCH_HPP
