#include "qaoa/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "qaoa/parallel.hpp"

namespace qaoa {

using nlohmann::json;

namespace {

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buffer[32];
    std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buffer;
}

}  // namespace

LabelRun label_dataset(const std::vector<DatasetEntry>& dataset, int max_depth, int restarts,
                       std::uint64_t seed, int n_threads) {
    std::vector<const DatasetEntry*> train;
    for (const DatasetEntry& entry : dataset)
        if (entry.split == "train") train.push_back(&entry);
    if (train.size() < 2) throw std::invalid_argument("label_dataset: need >= 2 train graphs");

    const int n = static_cast<int>(train.size());

    // pass 1: depth-1 optima by plain multi-start, enough to fit the line
    std::vector<std::pair<double, double>> optima(n);
    parallel_for(n, n_threads, [&](int i) {
        MaxCutQaoa problem(train[i]->graph);
        EvalCounter counter;
        Rng rng(derive_seed(seed, 0x1000 + train[i]->id));
        const DepthLabels d1 = generate_labels(problem, 1, restarts, counter, rng);
        optima[i] = {d1.params[0].gammas[0], d1.params[0].betas[0]};
    });

    LabelRun run;
    run.regression = fit_depth1_regression(optima);

    // pass 2: full labels seeded through the recommended list
    run.labels.resize(n);
    parallel_for(n, n_threads, [&](int i) {
        MaxCutQaoa problem(train[i]->graph);
        EvalCounter counter;
        Rng rng(derive_seed(seed, 0x2000 + train[i]->id));
        const DepthLabels labels =
            generate_labels(problem, max_depth, restarts, counter, rng, &run.regression);
        LabeledInstance inst;
        inst.graph_id = train[i]->id;
        inst.graph = train[i]->graph;
        for (int d = 1; d <= max_depth; ++d) {
            inst.params_by_depth[d] = labels.params[d - 1];
            inst.values_by_depth[d] = labels.values[d - 1];
        }
        run.labels[i] = std::move(inst);
    });
    return run;
}

BenchmarkReport run_benchmark(const std::vector<DatasetEntry>& dataset, const PpnModel* model,
                              const RecommendedList* rec, const BenchConfig& config) {
    if (config.strategies.empty())
        throw std::invalid_argument("run_benchmark: no strategies requested");
    for (const std::string& s : config.strategies) {
        if (s != "ppn1" && s != "ppn2" && s != "tqa" && s != "random")
            throw std::invalid_argument("run_benchmark: unknown strategy " + s);
        if ((s == "ppn1" || s == "ppn2") && (model == nullptr || rec == nullptr))
            throw std::invalid_argument("run_benchmark: " + s +
                                        " needs a model and a recommended list");
    }

    std::vector<const DatasetEntry*> test;
    for (const DatasetEntry& entry : dataset)
        if (entry.split == "test") test.push_back(&entry);
    if (test.empty()) throw std::invalid_argument("run_benchmark: empty test split");

    const int n = static_cast<int>(test.size());
    BenchmarkReport report;
    report.seed = config.seed;
    report.target_depth = config.target_depth;
    report.n_test_graphs = n;
    report.timestamp = utc_timestamp();

    for (const std::string& strategy : config.strategies) {
        std::vector<GraphRecord> records(n);
        parallel_for(n, config.n_threads, [&](int i) {
            const DatasetEntry& entry = *test[i];
            MaxCutQaoa problem(entry.graph);
            EvalCounter counter;
            StrategyOutcome outcome;
            if (strategy == "ppn1") {
                outcome = strategy_ppn1(problem, *model, config.target_depth, *rec, counter);
            } else if (strategy == "ppn2") {
                outcome = strategy_ppn2(problem, *model, *rec, counter);
            } else if (strategy == "tqa") {
                outcome = run_baseline(
                    problem, tqa_params(config.target_depth, config.tqa_delta_t), counter);
            } else {
                outcome = run_baseline(
                    problem,
                    random_params(config.target_depth, derive_seed(config.seed, 0x3000 + entry.id)),
                    counter);
            }
            if (outcome.total_calls() != counter.count)
                throw std::logic_error("run_benchmark: stage accounting does not match counter");
            GraphRecord record;
            record.graph_id = entry.id;
            record.strategy = strategy;
            record.target_depth = config.target_depth;
            record.outcome = std::move(outcome);
            records[i] = std::move(record);
        });

        StrategyRow row;
        row.n_graphs = n;
        for (const GraphRecord& record : records) {
            row.mean_approx_ratio += record.outcome.approx_ratio;
            for (const auto& [stage, calls] : record.outcome.calls_by_stage)
                row.mean_calls_by_stage[stage] += static_cast<double>(calls);
            const long long total = record.outcome.total_calls();
            long long depth1 = 0;
            const auto found = record.outcome.calls_by_stage.find("depth1");
            if (found != record.outcome.calls_by_stage.end()) depth1 = found->second;
            row.mean_extra_calls += static_cast<double>(total - depth1);
            row.mean_total_calls += static_cast<double>(total);
        }
        row.mean_approx_ratio /= n;
        for (auto& [stage, sum] : row.mean_calls_by_stage) sum /= n;
        row.mean_extra_calls /= n;
        row.mean_total_calls /= n;
        report.rows[strategy] = std::move(row);
        report.records.insert(report.records.end(), std::make_move_iterator(records.begin()),
                              std::make_move_iterator(records.end()));
    }
    return report;
}

namespace {

json params_to_json(const ParameterSet& p) {
    return json{{"p", p.depth()}, {"gamma", p.gammas}, {"beta", p.betas}};
}

}  // namespace

std::string report_json(const BenchmarkReport& report) {
    json rows = json::object();
    for (const auto& [strategy, row] : report.rows) {
        json stages = json::object();
        for (const auto& [stage, mean] : row.mean_calls_by_stage) stages[stage] = mean;
        rows[strategy] = json{{"mean_approx_ratio", row.mean_approx_ratio},
                              {"mean_calls_by_stage", std::move(stages)},
                              {"mean_extra_calls", row.mean_extra_calls},
                              {"mean_total_calls", row.mean_total_calls},
                              {"n_graphs", row.n_graphs}};
    }

    json per_graph = json::array();
    for (const GraphRecord& record : report.records) {
        json stages = json::object();
        for (const auto& [stage, calls] : record.outcome.calls_by_stage) stages[stage] = calls;
        json item{{"graph_id", record.graph_id},
                  {"strategy", record.strategy},
                  {"target_depth", record.target_depth},
                  {"chosen_depth", record.outcome.chosen_depth},
                  {"approx_ratio", record.outcome.approx_ratio},
                  {"final_value", record.outcome.final_value},
                  {"calls_by_stage", std::move(stages)},
                  {"total_calls", record.outcome.total_calls()},
                  {"params", params_to_json(record.outcome.final_params)}};
        if (!record.outcome.visited_values.empty()) {
            item["visited_values"] = record.outcome.visited_values;
            item["loop_iterations"] = record.outcome.loop_iterations;
        }
        per_graph.push_back(std::move(item));
    }

    const json j{{"metadata",
                  {{"seed", report.seed},
                   {"target_depth", report.target_depth},
                   {"n_test_graphs", report.n_test_graphs},
                   {"dataset_hash", report.dataset_hash},
                   {"model_hash", report.model_hash},
                   {"labels_hash", report.labels_hash},
                   {"timestamp", report.timestamp}}},
                 {"rows", std::move(rows)},
                 {"per_graph", std::move(per_graph)}};
    return j.dump(2) + "\n";
}

std::string report_csv(const BenchmarkReport& report) {
    std::ostringstream out;
    out << "strategy,mean_approx_ratio,mean_depth1_calls,mean_extra_calls,mean_total_calls\n";
    char line[256];
    for (const auto& [strategy, row] : report.rows) {
        double depth1 = 0.0;
        const auto found = row.mean_calls_by_stage.find("depth1");
        if (found != row.mean_calls_by_stage.end()) depth1 = found->second;
        std::snprintf(line, sizeof(line), "%s,%.6f,%.4f,%.4f,%.4f\n", strategy.c_str(),
                      row.mean_approx_ratio, depth1, row.mean_extra_calls, row.mean_total_calls);
        out << line;
    }
    return out.str();
}

std::vector<DepthCurvePoint> depth_prediction_curve(const MaxCutQaoa& problem,
                                                    const PpnModel& model,
                                                    const RecommendedList& rec, int max_depth,
                                                    std::uint64_t seed) {
    if (max_depth < 1) throw std::invalid_argument("depth_prediction_curve: max_depth >= 1");
    EvalCounter counter;  // scratch; the curve is diagnostic output
    Rng rng(derive_seed(seed, 0x4000));
    const DepthLabels optimized = generate_labels(problem, max_depth, 10, counter, rng, &rec);

    // the composition chain starts from the depth-1 optimum
    Tensor3 predicted = normalize(optimized.params[0]);

    std::vector<DepthCurvePoint> curve;
    curve.reserve(max_depth);
    for (int depth = 1; depth <= max_depth; ++depth) {
        if (depth > 1) predicted = ppn_forward(model, predicted);
        DepthCurvePoint point;
        point.depth = depth;
        point.predicted_ratio =
            problem.expected_value(denormalize(predicted), counter) / problem.optimum();
        point.optimal_ratio = optimized.values[depth - 1] / problem.optimum();
        point.prediction_error =
            prediction_error(predicted, normalize(optimized.params[depth - 1]));
        curve.push_back(point);
    }
    return curve;
}

std::string depth_curve_csv(const std::vector<DepthCurvePoint>& curve) {
    std::ostringstream out;
    out << "depth,predicted_ratio,optimal_ratio,prediction_error\n";
    char line[128];
    for (const DepthCurvePoint& point : curve) {
        std::snprintf(line, sizeof(line), "%d,%.8f,%.8f,%.8f\n", point.depth,
                      point.predicted_ratio, point.optimal_ratio, point.prediction_error);
        out << line;
    }
    return out.str();
}

}  // namespace qaoa
