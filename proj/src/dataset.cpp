#include "qaoa/dataset.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace qaoa {

using nlohmann::json;

namespace {

json graph_to_json(const Graph& g) {
    json edges = json::array();
    for (const auto& [u, v] : g.edges) edges.push_back({u, v});
    return json{{"n", g.n_nodes}, {"edges", std::move(edges)}};
}

Graph graph_from_json(const json& j) {
    Graph g;
    g.n_nodes = j.at("n").get<int>();
    for (const auto& e : j.at("edges")) {
        if (!e.is_array() || e.size() != 2) throw std::runtime_error("bad edge entry");
        g.edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    g.validate();
    return g;
}

json params_to_json(const ParameterSet& p) {
    return json{{"p", p.depth()}, {"gamma", p.gammas}, {"beta", p.betas}};
}

ParameterSet params_from_json(const json& j) {
    ParameterSet p;
    p.gammas = j.at("gamma").get<std::vector<double>>();
    p.betas = j.at("beta").get<std::vector<double>>();
    p.validate();
    if (j.at("p").get<int>() != p.depth())
        throw std::runtime_error("parameter file: depth field disagrees with angle counts");
    return p;
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    in >> j;
    return j;
}

void write_json_file(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace

std::vector<DatasetEntry> make_dataset(int n_graphs, int n_nodes, double edge_prob,
                                       int train_count, std::uint64_t seed) {
    if (n_graphs < 1) throw std::invalid_argument("make_dataset: need at least one graph");
    if (train_count < 0 || train_count >= n_graphs)
        throw std::invalid_argument("make_dataset: train_count must be in [0, n_graphs)");
    std::vector<DatasetEntry> dataset;
    dataset.reserve(n_graphs);
    for (int i = 0; i < n_graphs; ++i) {
        DatasetEntry entry;
        entry.id = i;
        entry.split = i < train_count ? "train" : "test";
        entry.graph = erdos_renyi(n_nodes, edge_prob, derive_seed(seed, i));
        dataset.push_back(std::move(entry));
    }
    return dataset;
}

void save_dataset(const std::vector<DatasetEntry>& dataset, const std::string& path) {
    json j = json::array();
    for (const DatasetEntry& entry : dataset) {
        json item = graph_to_json(entry.graph);
        item["id"] = entry.id;
        item["split"] = entry.split;
        j.push_back(std::move(item));
    }
    write_json_file(j, path);
}

std::vector<DatasetEntry> load_dataset(const std::string& path) {
    const json j = load_json_file(path);
    if (!j.is_array()) throw std::runtime_error("dataset file: expected a JSON array");
    std::vector<DatasetEntry> dataset;
    dataset.reserve(j.size());
    for (const auto& item : j) {
        DatasetEntry entry;
        entry.id = item.at("id").get<int>();
        entry.split = item.at("split").get<std::string>();
        if (entry.split != "train" && entry.split != "test")
            throw std::runtime_error("dataset file: bad split tag");
        entry.graph = graph_from_json(item);
        dataset.push_back(std::move(entry));
    }
    return dataset;
}

void save_labels(const std::vector<LabeledInstance>& labels, const std::string& path) {
    json j = json::array();
    for (const LabeledInstance& inst : labels) {
        json params = json::object();
        json values = json::object();
        for (const auto& [depth, p] : inst.params_by_depth)
            params[std::to_string(depth)] = params_to_json(p);
        for (const auto& [depth, v] : inst.values_by_depth) values[std::to_string(depth)] = v;
        j.push_back(json{{"graph_id", inst.graph_id},
                         {"params_by_depth", std::move(params)},
                         {"values_by_depth", std::move(values)}});
    }
    write_json_file(j, path);
}

std::vector<LabeledInstance> load_labels(const std::string& path,
                                         const std::vector<DatasetEntry>& dataset) {
    std::map<int, const Graph*> by_id;
    for (const DatasetEntry& entry : dataset) by_id[entry.id] = &entry.graph;

    const json j = load_json_file(path);
    if (!j.is_array()) throw std::runtime_error("labels file: expected a JSON array");
    std::vector<LabeledInstance> labels;
    labels.reserve(j.size());
    for (const auto& item : j) {
        LabeledInstance inst;
        inst.graph_id = item.at("graph_id").get<int>();
        const auto found = by_id.find(inst.graph_id);
        if (found == by_id.end())
            throw std::runtime_error("labels file: graph_id not present in dataset");
        inst.graph = *found->second;
        for (const auto& [key, value] : item.at("params_by_depth").items())
            inst.params_by_depth[std::stoi(key)] = params_from_json(value);
        if (item.contains("values_by_depth"))
            for (const auto& [key, value] : item.at("values_by_depth").items())
                inst.values_by_depth[std::stoi(key)] = value.get<double>();
        labels.push_back(std::move(inst));
    }
    return labels;
}

RecommendedList regression_from_labels(const std::vector<LabeledInstance>& labels, int n_points) {
    std::vector<std::pair<double, double>> optima;
    optima.reserve(labels.size());
    for (const LabeledInstance& inst : labels) {
        const auto found = inst.params_by_depth.find(1);
        if (found == inst.params_by_depth.end())
            throw std::runtime_error("labels are missing depth-1 parameters");
        optima.emplace_back(found->second.gammas[0], found->second.betas[0]);
    }
    return fit_depth1_regression(optima, n_points);
}

std::vector<TrainingExample> to_training_examples(const std::vector<LabeledInstance>& labels,
                                                  int start_depth, int horizon) {
    std::vector<TrainingExample> examples;
    examples.reserve(labels.size());
    for (const LabeledInstance& inst : labels) {
        TrainingExample ex;
        const auto start = inst.params_by_depth.find(start_depth);
        if (start == inst.params_by_depth.end())
            throw std::runtime_error("labels are missing the start depth");
        ex.start = normalize(start->second);
        for (int t = 1; t <= horizon; ++t) {
            const auto target = inst.params_by_depth.find(start_depth + t);
            if (target == inst.params_by_depth.end())
                throw std::runtime_error("labels do not cover the composition horizon");
            ex.targets.push_back(normalize(target->second));
        }
        examples.push_back(std::move(ex));
    }
    return examples;
}

void save_params(const ParameterSet& params, const std::string& path) {
    write_json_file(params_to_json(params), path);
}

ParameterSet load_params(const std::string& path) {
    return params_from_json(load_json_file(path));
}

std::string file_hash_hex(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    char buffer[4096];
    while (in.read(buffer, sizeof(buffer)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            hash ^= static_cast<unsigned char>(buffer[i]);
            hash *= 0x100000001b3ULL;
        }
        if (!in) break;
    }
    char out[17];
    std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(hash));
    return std::string(out);
}

}  // namespace qaoa
