#ifndef QAOA_QAOA_HPP
#define QAOA_QAOA_HPP

#include <complex>
#include <optional>
#include <vector>

#include "qaoa/graph.hpp"

namespace qaoa {

// Depth-p angle set. gamma_j lives in [0, pi), beta_j in [0, pi/2).
struct ParameterSet {
    std::vector<double> gammas;
    std::vector<double> betas;

    int depth() const { return static_cast<int>(gammas.size()); }
    void validate() const;  // equal lengths, depth >= 1
};

// Largest representable values strictly below pi and pi/2; the closed box
// [0, gamma_max] x [0, beta_max] is exactly the half-open interval pair in
// double precision.
double gamma_max();
double beta_max();
bool params_in_box(const ParameterSet& p);

// Reduces gamma mod 2*pi and beta mod pi (the expected-value periods on
// unit-weight graphs). Only applied on explicit request; strategies always
// produce in-box values themselves.
ParameterSet canonicalized(ParameterSet p);

struct Statevector {
    int n_qubits = 0;
    std::vector<std::complex<double>> amplitudes;  // index = CutAssignment code

    double norm() const;
};

// Counts F_QAOA evaluations. One counter per run; never shared across threads.
struct EvalCounter {
    long long count = 0;
};

Statevector plus_state(int n_qubits);

// amp_z *= exp(-i * gamma * C(z)); diagonal, so phase-only.
void apply_cost_unitary(Statevector& s, const Graph& g, double gamma);
void apply_cost_unitary(Statevector& s, const std::vector<int>& cut_table, double gamma);

// exp(-i * beta * X) on every qubit.
void apply_mixer_unitary(Statevector& s, double beta);

// |+>^n followed by cost layer j then mixer layer j for j = 1..p.
Statevector prepare_state(const Graph& g, const ParameterSet& params);

// sum_z |amp_z|^2 C(z); increments the counter by exactly 1.
double expected_value(const Graph& g, const ParameterSet& params, EvalCounter& counter);

// expected_value / brute-force optimum.
double approximation_ratio(const Graph& g, const ParameterSet& params, EvalCounter& counter);

// Per-graph evaluation context: caches C(z) for all z and the brute-force
// optimum so repeated evaluations only pay for the circuit itself.
class MaxCutQaoa {
public:
    explicit MaxCutQaoa(Graph g);

    const Graph& graph() const { return graph_; }
    const std::vector<int>& cut_table() const { return cut_table_; }

    // Brute-force Max-Cut value; throws if the graph was too large to enumerate.
    double optimum() const;

    Statevector prepare(const ParameterSet& params) const;
    double expected_value(const ParameterSet& params, EvalCounter& counter) const;
    double approximation_ratio(const ParameterSet& params, EvalCounter& counter) const;

private:
    Graph graph_;
    std::vector<int> cut_table_;
    int max_cut_ = 0;  // largest C(z), bounds the phase table
    std::optional<double> optimum_;
};

}  // namespace qaoa

#endif  // QAOA_QAOA_HPP
