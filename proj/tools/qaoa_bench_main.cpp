// Command-line harness: dataset generation, labelling, training, prediction
// and benchmarking for the Max-Cut QAOA parameter-prediction pipeline.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qaoa/bench.hpp"
#include "qaoa/dataset.hpp"
#include "qaoa/parallel.hpp"
#include "qaoa/ppn.hpp"

namespace {

void write_text_file(const std::string& text, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Max-Cut QAOA parameter-prediction pipeline"};
    app.require_subcommand(1);
    app.fallthrough();  // global --seed/--threads may follow the subcommand

    std::uint64_t seed = 1;
    int threads = qaoa::hardware_threads();
    app.add_option("--seed", seed, "global RNG seed")->capture_default_str();
    app.add_option("--threads", threads, "worker threads")->capture_default_str();

    // gen-graphs
    auto* gen = app.add_subcommand("gen-graphs", "generate a seeded Erdos-Renyi dataset");
    int gen_count = 330, gen_nodes = 8, gen_train = 66;
    double gen_prob = 0.5;
    std::string gen_out = "graphs.json";
    gen->add_option("--count", gen_count, "number of graphs")->capture_default_str();
    gen->add_option("--nodes", gen_nodes, "nodes per graph")->capture_default_str();
    gen->add_option("--prob", gen_prob, "edge probability")->capture_default_str();
    gen->add_option("--train-count", gen_train, "graphs tagged train")->capture_default_str();
    gen->add_option("--out", gen_out, "output dataset file")->capture_default_str();

    // label
    auto* label = app.add_subcommand("label", "generate per-depth optimal parameters");
    std::string label_dataset_path, label_out = "labels.json";
    int label_max_depth = 5, label_restarts = 10;
    label->add_option("--dataset", label_dataset_path, "dataset file")->required();
    label->add_option("--max-depth", label_max_depth, "label depths 1..max")
        ->capture_default_str();
    label->add_option("--restarts", label_restarts, "depth-1 restarts")->capture_default_str();
    label->add_option("--out", label_out, "output labels file")->capture_default_str();

    // train
    auto* train = app.add_subcommand("train", "train the parameter-prediction network");
    std::string train_dataset_path, train_labels_path, train_out = "model.bin";
    std::string train_loss_out = "loss.csv";
    qaoa::TrainConfig cfg;
    int train_blocks = 4;
    train->add_option("--dataset", train_dataset_path, "dataset file")->required();
    train->add_option("--labels", train_labels_path, "labels file")->required();
    train->add_option("--out", train_out, "output model file")->capture_default_str();
    train->add_option("--loss-out", train_loss_out, "per-epoch loss CSV")->capture_default_str();
    train->add_option("--blocks", train_blocks, "residual blocks")->capture_default_str();
    train->add_option("--epochs1", cfg.epochs_phase1, "phase-1 epochs")->capture_default_str();
    train->add_option("--epochs2", cfg.epochs_phase2, "phase-2 epochs")->capture_default_str();
    train->add_option("--lr1", cfg.lr_phase1, "phase-1 learning rate")->capture_default_str();
    train->add_option("--lr2", cfg.lr_phase2, "phase-2 learning rate")->capture_default_str();
    train->add_option("--batch1", cfg.batch_phase1, "phase-1 batch size")->capture_default_str();
    train->add_option("--batch2", cfg.batch_phase2, "phase-2 batch size")->capture_default_str();
    int train_start_depth = 1;
    train->add_option("--start-depth", train_start_depth, "composition start depth s")
        ->capture_default_str();
    train->add_option("--horizon", cfg.horizon, "composition horizon T")->capture_default_str();

    // predict
    auto* predict = app.add_subcommand("predict", "apply the network to a parameter set");
    std::string predict_model, predict_params, predict_out;
    int predict_steps = 1;
    predict->add_option("--model", predict_model, "model file")->required();
    predict->add_option("--params", predict_params, "input parameter JSON")->required();
    predict->add_option("--steps", predict_steps, "composition steps")->capture_default_str();
    predict->add_option("--out", predict_out, "output parameter JSON (stdout when omitted)");

    // bench
    auto* bench = app.add_subcommand("bench", "run strategies over the test split");
    std::string bench_dataset_path, bench_model_path, bench_labels_path;
    std::string bench_out = "report.json", bench_csv_out, bench_figure_out;
    std::string bench_strategies = "ppn1,ppn2,tqa,random";
    int bench_target_depth = 10, bench_figure_graph = -1;
    double bench_delta_t = 0.625;
    bench->add_option("--dataset", bench_dataset_path, "dataset file")->required();
    bench->add_option("--model", bench_model_path, "model file (needed for ppn strategies)");
    bench->add_option("--labels", bench_labels_path,
                      "labels file (recommended list source for ppn strategies)");
    bench->add_option("--strategies", bench_strategies, "comma-separated list")
        ->capture_default_str();
    bench->add_option("--target-depth", bench_target_depth, "depth for ppn1/tqa/random")
        ->capture_default_str();
    bench->add_option("--delta-t", bench_delta_t, "TQA schedule total time")
        ->capture_default_str();
    bench->add_option("--out", bench_out, "report JSON")->capture_default_str();
    bench->add_option("--csv", bench_csv_out, "aggregate CSV");
    bench->add_option("--figure-out", bench_figure_out, "per-depth prediction-curve CSV");
    bench->add_option("--figure-graph", bench_figure_graph,
                      "graph id for the curve (first test graph when omitted)");

    try {
        app.parse(argc, argv);

        if (*gen) {
            const auto dataset =
                qaoa::make_dataset(gen_count, gen_nodes, gen_prob, gen_train, seed);
            qaoa::save_dataset(dataset, gen_out);
            std::cout << "wrote " << dataset.size() << " graphs (" << gen_train << " train) to "
                      << gen_out << "\n";
        } else if (*label) {
            const auto dataset = qaoa::load_dataset(label_dataset_path);
            const qaoa::LabelRun run =
                qaoa::label_dataset(dataset, label_max_depth, label_restarts, seed, threads);
            qaoa::save_labels(run.labels, label_out);
            std::cout << "labelled " << run.labels.size() << " graphs to depth "
                      << label_max_depth << "; regression beta = " << run.regression.slope
                      << " * gamma + " << run.regression.intercept << "\n";
        } else if (*train) {
            const auto dataset = qaoa::load_dataset(train_dataset_path);
            const auto labels = qaoa::load_labels(train_labels_path, dataset);
            const auto examples =
                qaoa::to_training_examples(labels, train_start_depth, cfg.horizon);
            cfg.seed = seed;
            cfg.n_threads = threads;
            qaoa::Rng init_rng(qaoa::derive_seed(seed, 0x11));
            qaoa::PpnModel model = qaoa::PpnModel::randomized(train_blocks, init_rng);
            const auto history = qaoa::train_ppn(model, examples, cfg);
            qaoa::save_model(model, train_out);
            std::ostringstream loss_csv;
            loss_csv << "epoch,loss\n";
            for (std::size_t i = 0; i < history.size(); ++i)
                loss_csv << (i + 1) << "," << history[i] << "\n";
            write_text_file(loss_csv.str(), train_loss_out);
            std::cout << "trained " << history.size() << " epochs";
            if (!history.empty())
                std::cout << "; first loss " << history.front() << ", last loss "
                          << history.back();
            std::cout << "; model written to " << train_out << "\n";
        } else if (*predict) {
            const qaoa::PpnModel model = qaoa::load_model(predict_model);
            const qaoa::ParameterSet input = qaoa::load_params(predict_params);
            const qaoa::Tensor3 out =
                qaoa::ppn_compose(model, qaoa::normalize(input), predict_steps);
            const qaoa::ParameterSet result = qaoa::denormalize(out);
            if (predict_out.empty()) {
                std::cout << "{\"p\": " << result.depth() << ", \"gamma\": [";
                for (int i = 0; i < result.depth(); ++i)
                    std::cout << (i ? ", " : "") << result.gammas[i];
                std::cout << "], \"beta\": [";
                for (int i = 0; i < result.depth(); ++i)
                    std::cout << (i ? ", " : "") << result.betas[i];
                std::cout << "]}\n";
            } else {
                qaoa::save_params(result, predict_out);
                std::cout << "wrote depth-" << result.depth() << " prediction to " << predict_out
                          << "\n";
            }
        } else if (*bench) {
            const auto dataset = qaoa::load_dataset(bench_dataset_path);

            qaoa::BenchConfig config;
            std::stringstream names(bench_strategies);
            std::string name;
            while (std::getline(names, name, ','))
                if (!name.empty()) config.strategies.push_back(name);
            config.target_depth = bench_target_depth;
            config.tqa_delta_t = bench_delta_t;
            config.seed = seed;
            config.n_threads = threads;

            const bool needs_model =
                std::count(config.strategies.begin(), config.strategies.end(), "ppn1") ||
                std::count(config.strategies.begin(), config.strategies.end(), "ppn2");
            qaoa::PpnModel model;
            qaoa::RecommendedList rec;
            if (needs_model) {
                if (bench_model_path.empty() || bench_labels_path.empty())
                    throw std::runtime_error("ppn strategies need --model and --labels");
                model = qaoa::load_model(bench_model_path);
                rec = qaoa::regression_from_labels(
                    qaoa::load_labels(bench_labels_path, dataset));
            }

            qaoa::BenchmarkReport report =
                qaoa::run_benchmark(dataset, needs_model ? &model : nullptr,
                                    needs_model ? &rec : nullptr, config);
            report.dataset_hash = qaoa::file_hash_hex(bench_dataset_path);
            if (!bench_model_path.empty()) report.model_hash = qaoa::file_hash_hex(bench_model_path);
            if (!bench_labels_path.empty())
                report.labels_hash = qaoa::file_hash_hex(bench_labels_path);

            write_text_file(qaoa::report_json(report), bench_out);
            if (!bench_csv_out.empty()) write_text_file(qaoa::report_csv(report), bench_csv_out);

            if (!bench_figure_out.empty()) {
                if (!needs_model)
                    throw std::runtime_error("--figure-out needs the ppn model and labels");
                const qaoa::DatasetEntry* figure_entry = nullptr;
                for (const auto& entry : dataset) {
                    if (bench_figure_graph >= 0 ? entry.id == bench_figure_graph
                                                : entry.split == "test") {
                        figure_entry = &entry;
                        break;
                    }
                }
                if (!figure_entry) throw std::runtime_error("figure graph not found in dataset");
                qaoa::MaxCutQaoa problem(figure_entry->graph);
                const auto curve = qaoa::depth_prediction_curve(
                    problem, model, rec, std::max(bench_target_depth, 2), seed);
                write_text_file(qaoa::depth_curve_csv(curve), bench_figure_out);
            }

            for (const auto& [strategy, row] : report.rows) {
                std::printf("%-7s ratio %.4f  calls %.2f\n", strategy.c_str(),
                            row.mean_approx_ratio, row.mean_total_calls);
            }
        }
        return 0;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
