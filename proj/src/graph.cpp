#include "qaoa/graph.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>

#include "qaoa/rng.hpp"

namespace qaoa {

void Graph::validate() const {
    if (n_nodes < 2) throw std::invalid_argument("graph needs at least 2 nodes");
    if (edges.empty()) throw std::invalid_argument("graph has no edges");
    std::set<std::pair<int, int>> seen;
    for (const auto& [u, v] : edges) {
        if (u < 1 || v < 1 || u > n_nodes || v > n_nodes)
            throw std::invalid_argument("edge endpoint out of range");
        if (u == v) throw std::invalid_argument("self-loop");
        if (u > v) throw std::invalid_argument("edge not stored as (u, v) with u < v");
        if (!seen.insert({u, v}).second) throw std::invalid_argument("duplicate edge");
    }
}

CutAssignment CutAssignment::from_bits(const std::vector<int>& bits) {
    if (bits.empty() || bits.size() > 24) throw std::invalid_argument("bad bit count");
    CutAssignment z;
    z.n_bits = static_cast<int>(bits.size());
    for (int b : bits) {
        if (b != 0 && b != 1) throw std::invalid_argument("bits must be 0 or 1");
        z.code = (z.code << 1) | static_cast<std::uint32_t>(b);
    }
    return z;
}

std::vector<int> CutAssignment::bits() const {
    std::vector<int> out(n_bits);
    for (int j = 1; j <= n_bits; ++j) out[j - 1] = bit(j);
    return out;
}

Graph erdos_renyi(int n_nodes, double edge_prob, std::uint64_t seed) {
    if (n_nodes < 2) throw std::invalid_argument("erdos_renyi: n_nodes must be >= 2");
    if (!(edge_prob > 0.0) || edge_prob > 1.0)
        throw std::invalid_argument("erdos_renyi: edge_prob must be in (0, 1]");
    Rng rng(seed);
    Graph g;
    g.n_nodes = n_nodes;
    do {
        g.edges.clear();
        for (int u = 1; u <= n_nodes; ++u)
            for (int v = u + 1; v <= n_nodes; ++v)
                if (rng.uniform() < edge_prob) g.edges.emplace_back(u, v);
    } while (g.edges.empty());
    return g;
}

double cut_value(const Graph& g, const CutAssignment& z) {
    if (z.n_bits != g.n_nodes) throw std::invalid_argument("cut_value: assignment length mismatch");
    int cut = 0;
    for (const auto& [u, v] : g.edges) cut += z.bit(u) ^ z.bit(v);
    return static_cast<double>(cut);
}

std::vector<int> all_cut_values(const Graph& g) {
    const int n = g.n_nodes;
    if (n < 1 || n > 24) throw std::invalid_argument("all_cut_values: unsupported node count");
    const std::size_t size = std::size_t{1} << n;
    std::vector<int> values(size, 0);
    for (const auto& [u, v] : g.edges) {
        const int shift_u = n - u;
        const int shift_v = n - v;
        for (std::size_t z = 0; z < size; ++z)
            values[z] += static_cast<int>(((z >> shift_u) ^ (z >> shift_v)) & 1u);
    }
    return values;
}

MaxCutSolution max_cut_brute_force(const Graph& g) {
    if (g.n_nodes > 24)
        throw std::invalid_argument("max_cut_brute_force: graph too large for enumeration");
    const auto values = all_cut_values(g);
    std::size_t best = 0;
    for (std::size_t z = 1; z < values.size(); ++z)
        if (values[z] > values[best]) best = z;
    MaxCutSolution sol;
    sol.value = static_cast<double>(values[best]);
    sol.assignment.n_bits = g.n_nodes;
    sol.assignment.code = static_cast<std::uint32_t>(best);
    return sol;
}

}  // namespace qaoa
