#ifndef QAOA_DATASET_HPP
#define QAOA_DATASET_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qaoa/graph.hpp"
#include "qaoa/optimize.hpp"
#include "qaoa/ppn.hpp"
#include "qaoa/qaoa.hpp"

namespace qaoa {

struct DatasetEntry {
    int id = 0;
    std::string split;  // "train" | "test"
    Graph graph;
};

// n_graphs seeded Erdos-Renyi graphs; the first train_count are tagged
// "train", the rest "test".
std::vector<DatasetEntry> make_dataset(int n_graphs, int n_nodes, double edge_prob,
                                       int train_count, std::uint64_t seed);

void save_dataset(const std::vector<DatasetEntry>& dataset, const std::string& path);
std::vector<DatasetEntry> load_dataset(const std::string& path);

// A graph with quasi-optimal parameter sets (and their values) per depth.
struct LabeledInstance {
    int graph_id = 0;
    Graph graph;
    std::map<int, ParameterSet> params_by_depth;
    std::map<int, double> values_by_depth;
};

void save_labels(const std::vector<LabeledInstance>& labels, const std::string& path);
// Graphs are joined back in from the dataset by graph_id.
std::vector<LabeledInstance> load_labels(const std::string& path,
                                         const std::vector<DatasetEntry>& dataset);

// Least-squares recommended list refit from the stored depth-1 optima.
RecommendedList regression_from_labels(const std::vector<LabeledInstance>& labels,
                                       int n_points = 10);

// Normalized (start, targets) pairs covering depths start_depth..start_depth+horizon.
std::vector<TrainingExample> to_training_examples(const std::vector<LabeledInstance>& labels,
                                                  int start_depth, int horizon);

void save_params(const ParameterSet& params, const std::string& path);
ParameterSet load_params(const std::string& path);

// FNV-1a 64-bit content hash, hex-encoded; used for report provenance.
std::string file_hash_hex(const std::string& path);

}  // namespace qaoa

#endif  // QAOA_DATASET_HPP
