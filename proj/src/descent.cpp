#include "descent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fraclap::detail {

DescentResult projected_descent(const DescentProblem& problem, DiscreteField start,
                                const SolverOptions& options) {
    options.validate();
    DescentResult res;
    DiscreteField u = std::move(start);
    problem.project(u.values);
    double J = problem.objective(u);
    if (options.record_energy_history) res.energy_history.push_back(J);

    double step = options.initial_step;
    std::vector<double> u_prev, g_prev;
    bool have_prev = false;

    for (int iter = 0; iter < options.max_iterations; ++iter) {
        DiscreteField g = problem.gradient(u);
        double pg = problem.projected_norm(u, g);
        if (pg <= options.gradient_tolerance) {
            res.solution = std::move(u);
            res.iterations = iter;
            res.gradient_norm = pg;
            res.status = SolveStatus::converged;
            return res;
        }

        double trial = step;
        if (have_prev) {
            double num = 0.0, den = 0.0;
            for (std::size_t i = 0; i < u.values.size(); ++i) {
                double du = u.values[i] - u_prev[i];
                double dg = g.values[i] - g_prev[i];
                num += du * du;
                den += du * dg;
            }
            trial = den > 1e-300 ? num / den : step * 2.0;
        }
        trial = std::clamp(trial, 1e-12, 1e12);

        u_prev = u.values;
        g_prev = g.values;

        bool accepted = false;
        while (trial >= 1e-18) {
            DiscreteField cand = u;
            for (std::size_t i = 0; i < cand.values.size(); ++i)
                cand.values[i] -= trial * g.values[i];
            problem.project(cand.values);
            double dir = 0.0;  // <g, cand - u>, nonpositive along the projected arc
            for (std::size_t i = 0; i < cand.values.size(); ++i)
                dir += g.values[i] * (cand.values[i] - u.values[i]);
            double Jc = problem.objective(cand);
            // Rounding slack: near the minimizer the true decrease drops below
            // the resolution of J; without it the search stalls while the
            // gradient is still reducible.
            double slack = 4.0 * std::numeric_limits<double>::epsilon() *
                           std::max(1.0, std::abs(J));
            if (Jc <= J + options.sufficient_decrease * dir + slack) {
                u = std::move(cand);
                J = Jc;
                step = trial;
                accepted = true;
                break;
            }
            trial *= options.shrink_factor;
        }
        if (options.record_energy_history) res.energy_history.push_back(J);
        if (!accepted) {
            // Line search hit the numerical floor; report where we stand.
            res.solution = std::move(u);
            res.iterations = iter;
            res.gradient_norm = pg;
            res.status = SolveStatus::iteration_limit;
            return res;
        }
        have_prev = true;
    }

    DiscreteField g = problem.gradient(u);
    res.gradient_norm = problem.projected_norm(u, g);
    res.status = res.gradient_norm <= options.gradient_tolerance
                     ? SolveStatus::converged
                     : SolveStatus::iteration_limit;
    res.solution = std::move(u);
    res.iterations = options.max_iterations;
    return res;
}

}  // namespace fraclap::detail
