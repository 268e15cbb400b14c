#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qaoa/optimize.hpp"
#include "support/oracles.hpp"

using namespace qaoa;

namespace {

Graph single_edge() {
    Graph g;
    g.n_nodes = 2;
    g.edges = {{1, 2}};
    return g;
}

}  // namespace

TEST_CASE("bounded_minimize solves a convex quadratic") {
    const auto objective = [](const std::vector<double>& x) {
        return (x[0] - 0.3) * (x[0] - 0.3);
    };
    const auto r = bounded_minimize(objective, {0.9}, {{0.0}, {1.0}});
    CHECK(std::abs(r.x[0] - 0.3) < 1e-6);
    CHECK(r.converged);
    CHECK(r.n_evals >= 1);
    CHECK(std::abs(r.f - objective(r.x)) < 1e-15);
}

TEST_CASE("bounded_minimize finds an active bound on a linear objective") {
    const auto r =
        bounded_minimize([](const std::vector<double>& x) { return x[0]; }, {0.5}, {{0.2}, {1.0}});
    CHECK(r.x[0] == 0.2);
    CHECK(r.f == 0.2);
}

TEST_CASE("bounded_minimize never leaves the box") {
    const auto objective = [](const std::vector<double>& x) {
        return std::sin(5.0 * x[0]) + (x[1] - 2.0) * (x[1] - 2.0);
    };
    const auto r = bounded_minimize(objective, {0.4, 0.1}, {{0.0, 0.0}, {1.0, 0.5}});
    CHECK(r.x[0] >= 0.0);
    CHECK(r.x[0] <= 1.0);
    CHECK(r.x[1] >= 0.0);
    CHECK(r.x[1] <= 0.5);
    CHECK(r.x[1] == 0.5);  // quadratic pulls to the upper bound
}

TEST_CASE("bounded_minimize rejects bad inputs") {
    const auto objective = [](const std::vector<double>& x) { return x[0]; };
    CHECK_THROWS(bounded_minimize(objective, {2.0}, {{0.0}, {1.0}}));
    CHECK_THROWS(bounded_minimize(objective, {0.5}, {{0.0, 0.0}, {1.0, 1.0}}));
    const auto nan_objective = [](const std::vector<double>&) {
        return std::numeric_limits<double>::quiet_NaN();
    };
    CHECK_THROWS(bounded_minimize(nan_objective, {0.5}, {{0.0}, {1.0}}));
}

TEST_CASE("bounded_minimize reaches the single-edge optimum from the grid-best start") {
    const MaxCutQaoa problem(single_edge());
    const auto grid = oracle::grid_search_depth1(problem, 100, 100);
    EvalCounter counter;
    const auto objective = [&](const std::vector<double>& x) {
        return -problem.expected_value(ParameterSet{{x[0]}, {x[1]}}, counter);
    };
    const auto r = bounded_minimize(objective, {grid.gamma, grid.beta},
                                    {{0.0, 0.0}, {gamma_max(), beta_max()}});
    CHECK(std::abs(r.f - (-1.0)) < 1e-6);
    CHECK(r.n_evals == counter.count);
}

TEST_CASE("optimize_qaoa keeps a stationary start") {
    // all-zero parameters prepare the uniform state; every finite-difference
    // probe of one coordinate leaves the expected value at |E|/2
    const Graph g = erdos_renyi(6, 0.5, 51);
    const MaxCutQaoa problem(g);
    EvalCounter counter;
    const OptimizeResult r = optimize_qaoa(problem, ParameterSet{{0.0}, {0.0}}, counter);
    CHECK(r.best_params.gammas[0] == 0.0);
    CHECK(r.best_params.betas[0] == 0.0);
    CHECK(std::abs(r.best_value - g.n_edges() / 2.0) < 1e-8);
    CHECK(r.n_evals == counter.count);
    CHECK(r.n_evals <= 6);  // initial value plus one gradient
}

TEST_CASE("optimize_qaoa from a near-optimal single-edge start") {
    const MaxCutQaoa problem(single_edge());
    EvalCounter counter;
    const OptimizeResult r = optimize_qaoa(problem, ParameterSet{{0.1}, {0.1}}, counter);
    CHECK(std::abs(r.best_value - 1.0) < 1e-5);
    CHECK(params_in_box(r.best_params));
}

TEST_CASE("multi-start depth-1 optimization matches a dense grid search") {
    const Graph g = erdos_renyi(8, 0.5, 20240817);
    const MaxCutQaoa problem(g);
    const auto grid = oracle::grid_search_depth1(problem, 200, 200);

    EvalCounter counter;
    Rng rng(1);
    double best = -1.0;
    for (int restart = 0; restart < 10; ++restart) {
        ParameterSet init{{rng.uniform() * gamma_max()}, {rng.uniform() * beta_max()}};
        best = std::max(best, optimize_qaoa(problem, init, counter).best_value);
    }
    CHECK(best >= grid.value - 1e-9);  // the polished optimum dominates the grid
    CHECK(std::abs(best - grid.value) < 1e-3);
}

TEST_CASE("pearson on exact lines and a hand-computed triple") {
    const std::vector<double> xs{0.1, 0.4, 0.9, 1.7};
    std::vector<double> ys;
    for (double x : xs) ys.push_back(2.0 * x + 1.0);
    CHECK(pearson(xs, ys) == doctest::Approx(1.0).epsilon(1e-12));
    for (double& y : ys) y = -y;
    CHECK(pearson(xs, ys) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(pearson({1.0, 2.0, 3.0}, {1.0, 3.0, 2.0}) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("pearson is invariant under positive affine rescaling") {
    const std::vector<double> xs{0.3, 1.1, 0.7, 2.4, 1.9};
    const std::vector<double> ys{0.5, 0.2, 1.4, 0.9, 1.1};
    const double base = pearson(xs, ys);
    std::vector<double> scaled;
    for (double x : xs) scaled.push_back(3.7 * x + 11.0);
    CHECK(std::abs(pearson(scaled, ys) - base) < 1e-12);
    std::vector<double> scaled_y;
    for (double y : ys) scaled_y.push_back(0.02 * y - 5.0);
    CHECK(std::abs(pearson(xs, scaled_y) - base) < 1e-12);
}

TEST_CASE("pearson rejects degenerate inputs") {
    CHECK_THROWS(pearson({1.0}, {2.0}));
    CHECK_THROWS(pearson({1.0, 1.0}, {0.5, 0.7}));
    CHECK_THROWS(pearson({1.0, 2.0}, {0.5, 0.5}));
}

TEST_CASE("regression recovers an exact line") {
    std::vector<std::pair<double, double>> pts;
    for (double g = 0.2; g <= 1.4; g += 0.2) pts.emplace_back(g, 0.5 * g + 0.1);
    const RecommendedList rec = fit_depth1_regression(pts);
    CHECK(rec.slope == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(rec.intercept == doctest::Approx(0.1).epsilon(1e-12));
    REQUIRE(rec.points.size() == 10);
    for (const auto& [g, b] : rec.points) {
        CHECK(std::abs(b - (rec.slope * g + rec.intercept)) < 1e-12);
        CHECK(g >= 0.0);
        CHECK(g <= gamma_max());
        CHECK(b >= 0.0);
        CHECK(b <= beta_max());
    }
    CHECK(rec.points.front().first == doctest::Approx(0.2));
    CHECK(rec.points.back().first == doctest::Approx(1.4));
}

TEST_CASE("regression through two points") {
    const RecommendedList rec = fit_depth1_regression({{0.2, 0.1}, {0.6, 0.3}}, 5);
    CHECK(rec.slope == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(rec.intercept == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("regression minimizes the squared residuals") {
    Rng rng(77);
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < 30; ++i) {
        const double g = rng.uniform(0.2, 1.2);
        pts.emplace_back(g, 0.45 * g + 0.08 + 0.05 * rng.normal());
    }
    const RecommendedList rec = fit_depth1_regression(pts);
    const auto residual = [&](double slope, double intercept) {
        double s = 0.0;
        for (const auto& [g, b] : pts) {
            const double r = b - (slope * g + intercept);
            s += r * r;
        }
        return s;
    };
    const double base = residual(rec.slope, rec.intercept);
    for (const double ds : {-1e-3, 0.0, 1e-3})
        for (const double di : {-1e-3, 0.0, 1e-3})
            CHECK(residual(rec.slope + ds, rec.intercept + di) >= base - 1e-15);
}

TEST_CASE("regression rejects degenerate inputs") {
    CHECK_THROWS(fit_depth1_regression({{0.3, 0.2}}));
    CHECK_THROWS(fit_depth1_regression({{0.3, 0.2}, {0.3, 0.4}}));
}

TEST_CASE("depth1_solve counts list evaluations plus optimizer evaluations") {
    const MaxCutQaoa problem(MaxCutQaoa(erdos_renyi(8, 0.5, 4321)));
    const RecommendedList rec = fit_depth1_regression({{0.3, 0.15}, {0.9, 0.42}}, 10);
    EvalCounter counter;
    const OptimizeResult r = depth1_solve(problem, rec, counter);
    CHECK(r.n_evals == counter.count);
    CHECK(r.n_evals > 10);
    CHECK(params_in_box(r.best_params));
}

TEST_CASE("depth1_solve rejects an empty list") {
    const MaxCutQaoa problem(single_edge());
    EvalCounter counter;
    CHECK_THROWS(depth1_solve(problem, RecommendedList{}, counter));
}

TEST_CASE("depth1_solve reaches 1.0 on the single edge regardless of the list") {
    const MaxCutQaoa problem(single_edge());
    RecommendedList rec;
    rec.slope = 0.0;
    rec.intercept = 0.3;
    rec.points = {{0.4, 0.3}, {1.1, 0.3}, {2.2, 0.3}};
    EvalCounter counter;
    const OptimizeResult r = depth1_solve(problem, rec, counter);
    CHECK(std::abs(r.best_value - 1.0) < 1e-5);
    CHECK(std::abs(r.best_value / problem.optimum() - 1.0) < 1e-5);
}

TEST_CASE("a list containing the optimum is kept by the optimizer") {
    const MaxCutQaoa problem(single_edge());
    const auto grid = oracle::grid_search_depth1(problem, 100, 100);
    RecommendedList rec;
    rec.points = {{0.05, 0.02}, {grid.gamma, grid.beta}};
    EvalCounter counter;
    const OptimizeResult r = depth1_solve(problem, rec, counter);
    CHECK(std::abs(r.best_value - grid.value) < 1e-8);
}

TEST_CASE("generate_labels on the single edge keeps every depth at 1.0") {
    const MaxCutQaoa problem(single_edge());
    EvalCounter counter;
    Rng rng(9);
    const DepthLabels labels = generate_labels(problem, 4, 6, counter, rng);
    REQUIRE(labels.values.size() == 4);
    for (double v : labels.values) CHECK(std::abs(v - 1.0) < 1e-5);
}

TEST_CASE("generate_labels values are non-decreasing in depth") {
    for (int seed = 0; seed < 4; ++seed) {
        const MaxCutQaoa problem(erdos_renyi(7, 0.5, 60 + seed));
        EvalCounter counter;
        Rng rng(100 + seed);
        const DepthLabels labels = generate_labels(problem, 4, 4, counter, rng);
        for (std::size_t d = 1; d < labels.values.size(); ++d)
            CHECK(labels.values[d] >= labels.values[d - 1] - 1e-9);
        for (const ParameterSet& p : labels.params) CHECK(params_in_box(p));
        // stored values re-evaluate to themselves
        for (std::size_t d = 0; d < labels.params.size(); ++d) {
            EvalCounter scratch;
            CHECK(std::abs(problem.expected_value(labels.params[d], scratch) - labels.values[d]) <
                  1e-9);
        }
    }
}

TEST_CASE("generate_labels at max_depth 1 equals a depth-1 solve with restarts") {
    const MaxCutQaoa problem(erdos_renyi(8, 0.5, 808));
    const RecommendedList rec = fit_depth1_regression({{0.3, 0.15}, {0.9, 0.42}}, 10);

    EvalCounter c1;
    Rng rng1(55);
    const DepthLabels labels = generate_labels(problem, 1, 5, c1, rng1, &rec);

    EvalCounter c2;
    Rng rng2(55);
    OptimizeResult expected = depth1_solve(problem, rec, c2);
    for (int r = 1; r < 5; ++r) {
        ParameterSet init{{rng2.uniform() * gamma_max()}, {rng2.uniform() * beta_max()}};
        const OptimizeResult cand = optimize_qaoa(problem, init, c2);
        if (cand.best_value > expected.best_value + 1e-12) expected = cand;
    }
    CHECK(labels.values[0] == expected.best_value);
    CHECK(labels.params[0].gammas == expected.best_params.gammas);
    CHECK(c1.count == c2.count);
}
