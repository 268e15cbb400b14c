#ifndef QAOA_GRAPH_HPP
#define QAOA_GRAPH_HPP

#include <cstdint>
#include <utility>
#include <vector>

namespace qaoa {

// Undirected unweighted graph; the Max-Cut problem instance. Node indices are
// 1-based, edges are stored as (u, v) with u < v in lexicographic order.
struct Graph {
    int n_nodes = 0;
    std::vector<std::pair<int, int>> edges;

    int n_edges() const { return static_cast<int>(edges.size()); }

    // Throws std::invalid_argument on self-loops, duplicates, out-of-range
    // endpoints or an empty edge set.
    void validate() const;
};

// One cut: bit z_j per node j. z_1 is the most significant bit of the integer
// encoding, so code = sum_j z_j * 2^(n-j). The same encoding indexes
// statevector amplitudes.
struct CutAssignment {
    int n_bits = 0;
    std::uint32_t code = 0;

    static CutAssignment from_bits(const std::vector<int>& bits);
    std::vector<int> bits() const;

    // z_j for 1-based node j
    int bit(int node) const { return static_cast<int>((code >> (n_bits - node)) & 1u); }
};

// G(n, p) with unit edge weights. Deterministic for a fixed seed; resamples
// until the graph has at least one edge.
Graph erdos_renyi(int n_nodes, double edge_prob, std::uint64_t seed);

// Number of edges cut by z: (1/2) sum_(j,k) (1 - (-1)^z_j (-1)^z_k).
double cut_value(const Graph& g, const CutAssignment& z);

// C(z) for every z in [0, 2^n), indexed by the CutAssignment encoding.
std::vector<int> all_cut_values(const Graph& g);

struct MaxCutSolution {
    double value = 0.0;
    CutAssignment assignment;
};

// Exhaustive maximum over all 2^n assignments; ties broken by the smallest
// integer encoding. Guarded to n_nodes <= 24.
MaxCutSolution max_cut_brute_force(const Graph& g);

}  // namespace qaoa

#endif  // QAOA_GRAPH_HPP
