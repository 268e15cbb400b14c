#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qaoa/qaoa.hpp"
#include "qaoa/rng.hpp"
#include "support/oracles.hpp"

using namespace qaoa;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

Graph triangle() {
    Graph g;
    g.n_nodes = 3;
    g.edges = {{1, 2}, {1, 3}, {2, 3}};
    return g;
}

Graph single_edge() {
    Graph g;
    g.n_nodes = 2;
    g.edges = {{1, 2}};
    return g;
}

ParameterSet random_box_params(int depth, Rng& rng) {
    ParameterSet p;
    for (int i = 0; i < depth; ++i) {
        p.gammas.push_back(rng.uniform() * gamma_max());
        p.betas.push_back(rng.uniform() * beta_max());
    }
    return p;
}

double max_amp_diff(const Statevector& s, const std::vector<oracle::cdouble>& reference) {
    double worst = 0.0;
    for (std::size_t i = 0; i < s.amplitudes.size(); ++i)
        worst = std::max(worst, std::abs(s.amplitudes[i] - reference[i]));
    return worst;
}

}  // namespace

TEST_CASE("plus_state is the uniform superposition") {
    const Statevector one = plus_state(1);
    CHECK(one.amplitudes[0].real() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(one.amplitudes[1].real() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));

    const Statevector three = plus_state(3);
    REQUIRE(three.amplitudes.size() == 8);
    for (const auto& a : three.amplitudes) {
        CHECK(a.real() == doctest::Approx(1.0 / std::sqrt(8.0)).epsilon(1e-15));
        CHECK(a.imag() == 0.0);
    }
    CHECK(std::abs(three.norm() - 1.0) < 1e-15);
}

TEST_CASE("cost unitary with gamma 0 is the identity") {
    const Graph g = triangle();
    Statevector s = plus_state(3);
    const Statevector before = s;
    apply_cost_unitary(s, g, 0.0);
    for (std::size_t i = 0; i < s.amplitudes.size(); ++i)
        CHECK(s.amplitudes[i] == before.amplitudes[i]);
}

TEST_CASE("cost unitary with gamma 2*pi is the identity on unit weights") {
    const Graph g = erdos_renyi(6, 0.5, 11);
    Statevector s = plus_state(6);
    apply_mixer_unitary(s, 0.37);  // some structure first
    const Statevector before = s;
    apply_cost_unitary(s, g, 2.0 * kPi);
    CHECK(max_amp_diff(before, std::vector<oracle::cdouble>(s.amplitudes.begin(),
                                                            s.amplitudes.end())) < 1e-12);
}

TEST_CASE("cost unitary matches the dense diagonal exponential") {
    const Graph g = triangle();
    Statevector s = plus_state(3);
    apply_cost_unitary(s, g, 0.7);
    const auto reference = oracle::mat_vec(
        oracle::cost_matrix(g, 0.7),
        std::vector<oracle::cdouble>(8, oracle::cdouble(1.0 / std::sqrt(8.0), 0.0)));
    CHECK(max_amp_diff(s, reference) < 1e-12);
}

TEST_CASE("cost unitary is phase-only") {
    const Graph g = erdos_renyi(5, 0.5, 3);
    Rng rng(99);
    Statevector s = plus_state(5);
    apply_mixer_unitary(s, 0.8);
    Statevector phased = s;
    apply_cost_unitary(phased, g, rng.uniform() * 6.0);
    for (std::size_t i = 0; i < s.amplitudes.size(); ++i)
        CHECK(std::abs(std::abs(phased.amplitudes[i]) - std::abs(s.amplitudes[i])) < 1e-14);
}

TEST_CASE("mixer with beta 0 is the identity") {
    Statevector s = plus_state(4);
    apply_cost_unitary(s, erdos_renyi(4, 0.7, 2), 0.4);
    const Statevector before = s;
    apply_mixer_unitary(s, 0.0);
    for (std::size_t i = 0; i < s.amplitudes.size(); ++i)
        CHECK(s.amplitudes[i] == before.amplitudes[i]);
}

TEST_CASE("mixer with beta pi preserves all measurement probabilities") {
    Statevector s = plus_state(3);
    apply_cost_unitary(s, triangle(), 0.9);
    const Statevector before = s;
    apply_mixer_unitary(s, kPi);
    for (std::size_t i = 0; i < s.amplitudes.size(); ++i)
        CHECK(std::abs(std::norm(s.amplitudes[i]) - std::norm(before.amplitudes[i])) < 1e-12);
}

TEST_CASE("mixer matches the dense Kronecker product on |00>") {
    Statevector s;
    s.n_qubits = 2;
    s.amplitudes = {1.0, 0.0, 0.0, 0.0};
    apply_mixer_unitary(s, 0.3);
    const auto m = oracle::mixer_matrix(2, 0.3);
    std::vector<oracle::cdouble> basis{1.0, 0.0, 0.0, 0.0};
    const auto reference = oracle::mat_vec(m, basis);
    CHECK(max_amp_diff(s, reference) < 1e-12);
}

TEST_CASE("prepare_state with a zero layer is the plus state") {
    const Graph g = triangle();
    const Statevector s = prepare_state(g, ParameterSet{{0.0}, {0.0}});
    const Statevector plus = plus_state(3);
    for (std::size_t i = 0; i < s.amplitudes.size(); ++i)
        CHECK(std::abs(s.amplitudes[i] - plus.amplitudes[i]) < 1e-15);
}

TEST_CASE("appending a zero layer leaves the state unchanged") {
    const Graph g = erdos_renyi(5, 0.5, 8);
    Rng rng(4);
    ParameterSet p = random_box_params(2, rng);
    const Statevector base = prepare_state(g, p);
    p.gammas.push_back(0.0);
    p.betas.push_back(0.0);
    const Statevector extended = prepare_state(g, p);
    for (std::size_t i = 0; i < base.amplitudes.size(); ++i)
        CHECK(std::abs(base.amplitudes[i] - extended.amplitudes[i]) < 1e-12);
}

TEST_CASE("layered simulation matches the dense unitary product") {
    Rng rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform_int(3));
        const Graph g = erdos_renyi(n, 0.6, 5000 + trial);
        const int depth = 1 + static_cast<int>(rng.uniform_int(5));
        const ParameterSet p = random_box_params(depth, rng);
        const Statevector s = prepare_state(g, p);
        const auto reference = oracle::dense_prepare(g, p);
        CHECK(max_amp_diff(s, reference) < 1e-8);
    }
}

TEST_CASE("statevector norm stays 1 after every layer") {
    const Graph g = erdos_renyi(6, 0.5, 12);
    Rng rng(7);
    Statevector s = plus_state(6);
    for (int layer = 0; layer < 6; ++layer) {
        apply_cost_unitary(s, g, rng.uniform() * 6.0);
        CHECK(std::abs(s.norm() - 1.0) < 1e-10);
        apply_mixer_unitary(s, rng.uniform() * 3.0);
        CHECK(std::abs(s.norm() - 1.0) < 1e-10);
    }
}

TEST_CASE("expected value at zero parameters is half the edge count") {
    for (int seed = 0; seed < 10; ++seed) {
        const Graph g = erdos_renyi(8, 0.5, 700 + seed);
        EvalCounter counter;
        const double f = expected_value(g, ParameterSet{{0.0, 0.0}, {0.0, 0.0}}, counter);
        CHECK(std::abs(f - g.n_edges() / 2.0) < 1e-12);
    }
}

TEST_CASE("grid-optimal depth-1 parameters solve the single edge") {
    const MaxCutQaoa problem(single_edge());
    const auto best = oracle::grid_search_depth1(problem, 100, 100);
    EvalCounter counter;
    const double f =
        problem.expected_value(ParameterSet{{best.gamma}, {best.beta}}, counter);
    CHECK(std::abs(f - 1.0) < 1e-6);
    CHECK(std::abs(problem.approximation_ratio(ParameterSet{{best.gamma}, {best.beta}}, counter) -
                   1.0) < 1e-6);
}

TEST_CASE("expected value equals an independently assembled probability sum") {
    const Graph g = erdos_renyi(8, 0.5, 424242);
    Rng rng(5);
    const ParameterSet p = random_box_params(3, rng);
    EvalCounter counter;
    const double f = expected_value(g, p, counter);

    const Statevector s = prepare_state(g, p);
    double reference = 0.0;
    for (std::uint32_t z = 0; z < s.amplitudes.size(); ++z) {
        const double prob =
            s.amplitudes[z].real() * s.amplitudes[z].real() +
            s.amplitudes[z].imag() * s.amplitudes[z].imag();
        reference += prob * oracle::count_cut_edges(g, z);
    }
    CHECK(std::abs(f - reference) < 1e-10);
}

TEST_CASE("expected value is periodic in gamma by 2*pi and beta by pi") {
    const Graph g = erdos_renyi(7, 0.5, 99);
    Rng rng(6);
    const ParameterSet p = random_box_params(2, rng);
    EvalCounter counter;
    const double base = expected_value(g, p, counter);

    ParameterSet shifted_gamma = p;
    shifted_gamma.gammas[0] += 2.0 * kPi;
    CHECK(std::abs(expected_value(g, shifted_gamma, counter) - base) < 1e-10);

    ParameterSet shifted_beta = p;
    shifted_beta.betas[1] += kPi;
    CHECK(std::abs(expected_value(g, shifted_beta, counter) - base) < 1e-10);
}

TEST_CASE("appending a zero layer leaves the expected value unchanged") {
    Rng rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        const Graph g = erdos_renyi(6, 0.5, 1300 + trial);
        ParameterSet p = random_box_params(1 + static_cast<int>(rng.uniform_int(3)), rng);
        EvalCounter counter;
        const double base = expected_value(g, p, counter);
        p.gammas.push_back(0.0);
        p.betas.push_back(0.0);
        CHECK(std::abs(expected_value(g, p, counter) - base) < 1e-12);
    }
}

TEST_CASE("the counter increments once per evaluation") {
    const Graph g = triangle();
    EvalCounter counter;
    const ParameterSet p{{0.2}, {0.1}};
    for (int k = 1; k <= 7; ++k) {
        expected_value(g, p, counter);
        CHECK(counter.count == k);
    }
    const MaxCutQaoa problem(g);
    for (int k = 8; k <= 12; ++k) {
        problem.expected_value(p, counter);
        CHECK(counter.count == k);
    }
}

TEST_CASE("approximation ratio of the triangle at zero parameters") {
    EvalCounter counter;
    CHECK(std::abs(approximation_ratio(triangle(), ParameterSet{{0.0}, {0.0}}, counter) - 0.75) <
          1e-12);
}

TEST_CASE("approximation ratio lies in (0, 1]") {
    Rng rng(21);
    for (int trial = 0; trial < 30; ++trial) {
        const Graph g = erdos_renyi(6, 0.5, 888 + trial);
        const MaxCutQaoa problem(g);
        EvalCounter counter;
        const double ratio =
            problem.approximation_ratio(random_box_params(2, rng), counter);
        CHECK(ratio > 0.0);
        CHECK(ratio <= 1.0 + 1e-12);
    }
}

TEST_CASE("MaxCutQaoa agrees with the free functions") {
    const Graph g = erdos_renyi(7, 0.5, 3141);
    const MaxCutQaoa problem(g);
    Rng rng(17);
    const ParameterSet p = random_box_params(3, rng);
    EvalCounter c1, c2;
    CHECK(problem.expected_value(p, c1) == expected_value(g, p, c2));
    CHECK(problem.optimum() == max_cut_brute_force(g).value);
}

TEST_CASE("canonicalized reduces onto the fundamental periods") {
    const ParameterSet p =
        canonicalized(ParameterSet{{2.0 * kPi + 0.5, -0.25}, {kPi + 0.75, -0.1}});
    CHECK(p.gammas[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p.gammas[1] == doctest::Approx(2.0 * kPi - 0.25).epsilon(1e-12));
    CHECK(p.betas[0] == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(p.betas[1] == doctest::Approx(kPi - 0.1).epsilon(1e-12));
}

TEST_CASE("mismatched sizes are rejected") {
    Statevector s = plus_state(3);
    CHECK_THROWS(apply_cost_unitary(s, erdos_renyi(4, 0.9, 1), 0.1));
    ParameterSet bad;
    bad.gammas = {0.1};
    CHECK_THROWS(bad.validate());
    EvalCounter counter;
    Graph edgeless;
    edgeless.n_nodes = 2;
    CHECK_THROWS(approximation_ratio(edgeless, ParameterSet{{0.1}, {0.1}}, counter));
}
