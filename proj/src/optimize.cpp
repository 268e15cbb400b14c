#include "qaoa/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace qaoa {

namespace {

std::vector<double> clip_to_box(std::vector<double> x, const BoxBounds& b) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::clamp(x[i], b.lo[i], b.hi[i]);
    return x;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

struct CurvaturePair {
    std::vector<double> s;
    std::vector<double> y;
    double rho;
};

// Two-loop recursion; returns -H * g.
std::vector<double> lbfgs_direction(const std::vector<double>& g,
                                    const std::deque<CurvaturePair>& mem) {
    std::vector<double> q = g;
    std::vector<double> alpha(mem.size());
    for (std::size_t i = mem.size(); i-- > 0;) {
        alpha[i] = mem[i].rho * dot(mem[i].s, q);
        for (std::size_t k = 0; k < q.size(); ++k) q[k] -= alpha[i] * mem[i].y[k];
    }
    if (!mem.empty()) {
        const auto& last = mem.back();
        const double scale = dot(last.s, last.y) / dot(last.y, last.y);
        for (double& v : q) v *= scale;
    }
    for (std::size_t i = 0; i < mem.size(); ++i) {
        const double beta = mem[i].rho * dot(mem[i].y, q);
        for (std::size_t k = 0; k < q.size(); ++k) q[k] += mem[i].s[k] * (alpha[i] - beta);
    }
    for (double& v : q) v = -v;
    return q;
}

}  // namespace

MinimizeResult bounded_minimize(const std::function<double(const std::vector<double>&)>& objective,
                                std::vector<double> x0, const BoxBounds& bounds,
                                const MinimizeOptions& opts) {
    const std::size_t n = x0.size();
    if (n == 0) throw std::invalid_argument("bounded_minimize: empty start point");
    if (bounds.lo.size() != n || bounds.hi.size() != n)
        throw std::invalid_argument("bounded_minimize: bounds dimension mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(bounds.lo[i]) || !std::isfinite(bounds.hi[i]) ||
            bounds.lo[i] > bounds.hi[i])
            throw std::invalid_argument("bounded_minimize: bounds must be finite with lo <= hi");
        if (x0[i] < bounds.lo[i] || x0[i] > bounds.hi[i])
            throw std::invalid_argument("bounded_minimize: x0 out of bounds");
    }

    long long evals = 0;
    auto eval = [&](const std::vector<double>& x) {
        const double v = objective(x);
        ++evals;
        if (!std::isfinite(v)) throw std::runtime_error("bounded_minimize: non-finite objective");
        return v;
    };
    auto gradient = [&](const std::vector<double>& x) {
        std::vector<double> g(n);
        std::vector<double> probe = x;
        for (std::size_t i = 0; i < n; ++i) {
            const double xi = probe[i];
            probe[i] = xi + opts.fd_step;
            const double fp = eval(probe);
            probe[i] = xi - opts.fd_step;
            const double fm = eval(probe);
            probe[i] = xi;
            g[i] = (fp - fm) / (2.0 * opts.fd_step);
        }
        return g;
    };

    std::vector<double> x = std::move(x0);
    double fx = eval(x);
    std::vector<double> best_x = x;
    double best_f = fx;
    std::vector<double> g = gradient(x);
    std::deque<CurvaturePair> memory;
    bool converged = false;

    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        double pg_inf = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double step = std::clamp(x[i] - g[i], bounds.lo[i], bounds.hi[i]) - x[i];
            pg_inf = std::max(pg_inf, std::abs(step));
        }
        if (pg_inf < opts.grad_tol) {
            converged = true;
            break;
        }

        std::vector<double> direction = lbfgs_direction(g, memory);
        if (dot(direction, g) >= 0.0) {
            // not a descent direction; restart from steepest descent
            memory.clear();
            direction = g;
            for (double& v : direction) v = -v;
        }

        // backtracking along the projected path
        bool accepted = false;
        std::vector<double> x_new;
        double f_new = 0.0;
        double t = 1.0;
        for (int ls = 0; ls < 40; ++ls, t *= 0.5) {
            std::vector<double> cand(n);
            for (std::size_t i = 0; i < n; ++i) cand[i] = x[i] + t * direction[i];
            cand = clip_to_box(std::move(cand), bounds);
            bool moved = false;
            for (std::size_t i = 0; i < n; ++i)
                if (cand[i] != x[i]) moved = true;
            if (!moved) continue;
            const double fc = eval(cand);
            double decrease = 0.0;
            for (std::size_t i = 0; i < n; ++i) decrease += g[i] * (cand[i] - x[i]);
            if (fc <= fx + 1e-4 * std::min(decrease, 0.0)) {
                accepted = true;
                x_new = std::move(cand);
                f_new = fc;
                break;
            }
        }
        if (!accepted) {
            if (!memory.empty()) {
                // retry once with plain gradient information
                memory.clear();
                continue;
            }
            converged = true;
            break;
        }

        std::vector<double> g_new = gradient(x_new);
        CurvaturePair pair;
        pair.s.resize(n);
        pair.y.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            pair.s[i] = x_new[i] - x[i];
            pair.y[i] = g_new[i] - g[i];
        }
        const double sy = dot(pair.s, pair.y);
        if (sy > 1e-12) {
            pair.rho = 1.0 / sy;
            memory.push_back(std::move(pair));
            if (static_cast<int>(memory.size()) > opts.history) memory.pop_front();
        }

        const double improvement = fx - f_new;
        x = std::move(x_new);
        fx = f_new;
        g = std::move(g_new);
        if (fx < best_f) {
            best_f = fx;
            best_x = x;
        }
        if (improvement < opts.f_tol) {
            converged = true;
            break;
        }
    }

    MinimizeResult result;
    result.x = std::move(best_x);
    result.f = best_f;
    result.n_evals = evals;
    result.converged = converged;
    return result;
}

BoxBounds qaoa_box(int depth) {
    BoxBounds b;
    b.lo.assign(2 * depth, 0.0);
    b.hi.resize(2 * depth);
    for (int i = 0; i < depth; ++i) b.hi[i] = gamma_max();
    for (int i = depth; i < 2 * depth; ++i) b.hi[i] = beta_max();
    return b;
}

namespace {

ParameterSet params_from_vector(const std::vector<double>& x) {
    const int p = static_cast<int>(x.size() / 2);
    ParameterSet params;
    params.gammas.assign(x.begin(), x.begin() + p);
    params.betas.assign(x.begin() + p, x.end());
    return params;
}

std::vector<double> vector_from_params(const ParameterSet& p) {
    std::vector<double> x;
    x.reserve(2 * p.depth());
    x.insert(x.end(), p.gammas.begin(), p.gammas.end());
    x.insert(x.end(), p.betas.begin(), p.betas.end());
    return x;
}

}  // namespace

OptimizeResult optimize_qaoa(const MaxCutQaoa& problem, const ParameterSet& init,
                             EvalCounter& counter) {
    init.validate();
    if (!params_in_box(init)) throw std::invalid_argument("optimize_qaoa: init out of bounds");
    auto objective = [&](const std::vector<double>& x) {
        return -problem.expected_value(params_from_vector(x), counter);
    };
    const MinimizeResult r =
        bounded_minimize(objective, vector_from_params(init), qaoa_box(init.depth()));
    OptimizeResult out;
    out.best_params = params_from_vector(r.x);
    out.best_value = -r.f;
    out.n_evals = r.n_evals;
    out.converged = r.converged;
    return out;
}

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw std::invalid_argument("pearson: need equal lengths >= 2");
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) throw std::invalid_argument("pearson: degenerate variance");
    return sxy / std::sqrt(sxx * syy);
}

RecommendedList fit_depth1_regression(const std::vector<std::pair<double, double>>& optima,
                                      int n_points) {
    if (optima.size() < 2) throw std::invalid_argument("fit_depth1_regression: need >= 2 points");
    if (n_points < 1) throw std::invalid_argument("fit_depth1_regression: need >= 1 list point");
    const double n = static_cast<double>(optima.size());
    double mg = 0.0, mb = 0.0;
    for (const auto& [g, b] : optima) {
        mg += g;
        mb += b;
    }
    mg /= n;
    mb /= n;
    double sgg = 0.0, sgb = 0.0;
    double g_min = optima.front().first, g_max = optima.front().first;
    for (const auto& [g, b] : optima) {
        sgg += (g - mg) * (g - mg);
        sgb += (g - mg) * (b - mb);
        g_min = std::min(g_min, g);
        g_max = std::max(g_max, g);
    }
    if (sgg <= 0.0) throw std::invalid_argument("fit_depth1_regression: zero gamma variance");

    RecommendedList rec;
    rec.slope = sgb / sgg;
    rec.intercept = mb - rec.slope * mg;
    rec.points.reserve(n_points);
    for (int k = 0; k < n_points; ++k) {
        double gamma = n_points == 1 ? 0.5 * (g_min + g_max)
                                     : g_min + (g_max - g_min) * k / (n_points - 1);
        gamma = std::clamp(gamma, 0.0, gamma_max());
        const double beta = std::clamp(rec.slope * gamma + rec.intercept, 0.0, beta_max());
        rec.points.emplace_back(gamma, beta);
    }
    return rec;
}

OptimizeResult depth1_solve(const MaxCutQaoa& problem, const RecommendedList& rec,
                            EvalCounter& counter) {
    if (rec.points.empty()) throw std::invalid_argument("depth1_solve: empty recommended list");
    double best_f = -std::numeric_limits<double>::infinity();
    std::pair<double, double> best_point{0.0, 0.0};
    for (const auto& pt : rec.points) {
        ParameterSet p{{pt.first}, {pt.second}};
        const double f = problem.expected_value(p, counter);
        if (f > best_f) {
            best_f = f;
            best_point = pt;
        }
    }
    OptimizeResult r =
        optimize_qaoa(problem, ParameterSet{{best_point.first}, {best_point.second}}, counter);
    r.n_evals += static_cast<long long>(rec.points.size());
    return r;
}

namespace {

ParameterSet random_start(int depth, Rng& rng) {
    ParameterSet p;
    p.gammas.resize(depth);
    p.betas.resize(depth);
    for (int i = 0; i < depth; ++i) p.gammas[i] = rng.uniform() * gamma_max();
    for (int i = 0; i < depth; ++i) p.betas[i] = rng.uniform() * beta_max();
    return p;
}

// linear gamma ramp-up / beta ramp-down over the depth, total time 0.625
ParameterSet label_schedule_start(int depth) {
    ParameterSet p;
    p.gammas.resize(depth);
    p.betas.resize(depth);
    for (int i = 1; i <= depth; ++i) {
        const double frac = static_cast<double>(i) / depth;
        p.gammas[i - 1] = frac * 0.625;
        p.betas[i - 1] = (1.0 - frac) * 0.625;
    }
    return p;
}

// replace only on strict improvement beyond the tie window
void keep_best(OptimizeResult& best, OptimizeResult candidate) {
    if (candidate.best_value > best.best_value + 1e-12) best = std::move(candidate);
}

}  // namespace

DepthLabels generate_labels(const MaxCutQaoa& problem, int max_depth, int restarts,
                            EvalCounter& counter, Rng& rng, const RecommendedList* rec) {
    if (max_depth < 1) throw std::invalid_argument("generate_labels: max_depth must be >= 1");
    if (restarts < 1) throw std::invalid_argument("generate_labels: restarts must be >= 1");

    DepthLabels labels;
    labels.params.reserve(max_depth);
    labels.values.reserve(max_depth);

    OptimizeResult best;
    if (rec && !rec->points.empty()) {
        best = depth1_solve(problem, *rec, counter);
    } else {
        best = optimize_qaoa(problem, random_start(1, rng), counter);
    }
    for (int r = 1; r < restarts; ++r)
        keep_best(best, optimize_qaoa(problem, random_start(1, rng), counter));
    labels.params.push_back(best.best_params);
    labels.values.push_back(best.best_value);

    for (int depth = 2; depth <= max_depth; ++depth) {
        ParameterSet warm = labels.params.back();
        warm.gammas.push_back(0.0);
        warm.betas.push_back(0.0);
        OptimizeResult d_best = optimize_qaoa(problem, warm, counter);
        // annealing-schedule start; random restarts alone stall in shallow
        // local optima at depth >= 3
        keep_best(d_best, optimize_qaoa(problem, label_schedule_start(depth), counter));
        const int extra = std::max(restarts / 2, 1);
        for (int r = 0; r < extra; ++r)
            keep_best(d_best, optimize_qaoa(problem, random_start(depth, rng), counter));
        labels.params.push_back(d_best.best_params);
        labels.values.push_back(d_best.best_value);
    }
    return labels;
}

}  // namespace qaoa
