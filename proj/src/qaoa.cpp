#include "qaoa/qaoa.hpp"

#include <cmath>
#include <stdexcept>

namespace qaoa {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

double positive_mod(double x, double period) {
    double r = std::fmod(x, period);
    if (r < 0.0) r += period;
    return r;
}

}  // namespace

void ParameterSet::validate() const {
    if (gammas.empty()) throw std::invalid_argument("parameter set needs depth >= 1");
    if (gammas.size() != betas.size())
        throw std::invalid_argument("gamma/beta length mismatch");
}

double gamma_max() { return std::nextafter(kPi, 0.0); }
double beta_max() { return std::nextafter(kPi / 2.0, 0.0); }

bool params_in_box(const ParameterSet& p) {
    for (double g : p.gammas)
        if (!(g >= 0.0) || g > gamma_max()) return false;
    for (double b : p.betas)
        if (!(b >= 0.0) || b > beta_max()) return false;
    return true;
}

ParameterSet canonicalized(ParameterSet p) {
    p.validate();
    for (double& g : p.gammas) g = positive_mod(g, 2.0 * kPi);
    for (double& b : p.betas) b = positive_mod(b, kPi);
    return p;
}

double Statevector::norm() const {
    double s = 0.0;
    for (const auto& a : amplitudes) s += std::norm(a);
    return std::sqrt(s);
}

Statevector plus_state(int n_qubits) {
    if (n_qubits < 1 || n_qubits > 24) throw std::invalid_argument("plus_state: bad qubit count");
    Statevector s;
    s.n_qubits = n_qubits;
    const std::size_t dim = std::size_t{1} << n_qubits;
    s.amplitudes.assign(dim, std::complex<double>(std::pow(2.0, -0.5 * n_qubits), 0.0));
    return s;
}

void apply_cost_unitary(Statevector& s, const std::vector<int>& cut_table, double gamma) {
    if (cut_table.size() != s.amplitudes.size())
        throw std::invalid_argument("apply_cost_unitary: table size mismatch");
    int max_cut = 0;
    for (int c : cut_table)
        if (c > max_cut) max_cut = c;
    // e^{-i gamma k} for integer k; built once, reused for all amplitudes
    std::vector<std::complex<double>> phase(max_cut + 1);
    for (int k = 0; k <= max_cut; ++k)
        phase[k] = std::complex<double>(std::cos(gamma * k), -std::sin(gamma * k));
    for (std::size_t z = 0; z < s.amplitudes.size(); ++z) s.amplitudes[z] *= phase[cut_table[z]];
}

void apply_cost_unitary(Statevector& s, const Graph& g, double gamma) {
    if (s.n_qubits != g.n_nodes)
        throw std::invalid_argument("apply_cost_unitary: qubit/node count mismatch");
    apply_cost_unitary(s, all_cut_values(g), gamma);
}

void apply_mixer_unitary(Statevector& s, double beta) {
    const double c = std::cos(beta);
    const double ms = -std::sin(beta);  // off-diagonal is -i sin(beta)
    const std::size_t dim = s.amplitudes.size();
    auto* amp = s.amplitudes.data();
    for (int q = 0; q < s.n_qubits; ++q) {
        const std::size_t stride = std::size_t{1} << q;
        for (std::size_t base = 0; base < dim; base += 2 * stride) {
            for (std::size_t off = 0; off < stride; ++off) {
                const std::size_t i0 = base + off;
                const std::size_t i1 = i0 + stride;
                const std::complex<double> a0 = amp[i0];
                const std::complex<double> a1 = amp[i1];
                amp[i0] = c * a0 + std::complex<double>(-ms * a1.imag(), ms * a1.real());
                amp[i1] = std::complex<double>(-ms * a0.imag(), ms * a0.real()) + c * a1;
            }
        }
    }
}

namespace {

Statevector prepare_impl(int n_qubits, const std::vector<int>& cut_table,
                         const ParameterSet& params) {
    params.validate();
    Statevector s = plus_state(n_qubits);
    for (int j = 0; j < params.depth(); ++j) {
        apply_cost_unitary(s, cut_table, params.gammas[j]);
        apply_mixer_unitary(s, params.betas[j]);
    }
    return s;
}

double expectation_of(const Statevector& s, const std::vector<int>& cut_table) {
    double f = 0.0;
    for (std::size_t z = 0; z < s.amplitudes.size(); ++z)
        f += std::norm(s.amplitudes[z]) * cut_table[z];
    return f;
}

}  // namespace

Statevector prepare_state(const Graph& g, const ParameterSet& params) {
    return prepare_impl(g.n_nodes, all_cut_values(g), params);
}

double expected_value(const Graph& g, const ParameterSet& params, EvalCounter& counter) {
    const auto table = all_cut_values(g);
    const Statevector s = prepare_impl(g.n_nodes, table, params);
    ++counter.count;
    return expectation_of(s, table);
}

double approximation_ratio(const Graph& g, const ParameterSet& params, EvalCounter& counter) {
    if (g.edges.empty()) throw std::invalid_argument("approximation_ratio: edgeless graph");
    return expected_value(g, params, counter) / max_cut_brute_force(g).value;
}

MaxCutQaoa::MaxCutQaoa(Graph g) : graph_(std::move(g)) {
    graph_.validate();
    cut_table_ = all_cut_values(graph_);
    for (int c : cut_table_)
        if (c > max_cut_) max_cut_ = c;
    optimum_ = static_cast<double>(max_cut_);
}

double MaxCutQaoa::optimum() const {
    if (!optimum_) throw std::logic_error("optimum unavailable");
    return *optimum_;
}

Statevector MaxCutQaoa::prepare(const ParameterSet& params) const {
    return prepare_impl(graph_.n_nodes, cut_table_, params);
}

double MaxCutQaoa::expected_value(const ParameterSet& params, EvalCounter& counter) const {
    const Statevector s = prepare(params);
    ++counter.count;
    return expectation_of(s, cut_table_);
}

double MaxCutQaoa::approximation_ratio(const ParameterSet& params, EvalCounter& counter) const {
    return expected_value(params, counter) / optimum();
}

}  // namespace qaoa
