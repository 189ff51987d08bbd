#pragma once

// Internal projected-descent engine shared by the Dirichlet solver and the
// capacity minimizer. Not part of the public surface.

#include <functional>
#include <vector>

#include "fraclap/solver.hpp"

namespace fraclap::detail {

struct DescentProblem {
    std::function<double(const DiscreteField&)> objective;
    std::function<DiscreteField(const DiscreteField&)> gradient;
    // Projects raw values onto the feasible set in place.
    std::function<void(std::vector<double>&)> project;
    // h^n-weighted norm of the projected gradient (stopping criterion).
    std::function<double(const DiscreteField&, const DiscreteField&)> projected_norm;
};

struct DescentResult {
    DiscreteField solution;
    int iterations = 0;
    double gradient_norm = 0.0;
    SolveStatus status = SolveStatus::iteration_limit;
    std::vector<double> energy_history;
};

// Projected gradient descent with Armijo backtracking. The trial step is the
// Barzilai-Borwein estimate from the previous accepted move, safeguarded by
// the backtracking loop so that energy decreases monotonically.
DescentResult projected_descent(const DescentProblem& problem, DiscreteField start,
                                const SolverOptions& options);

}  // namespace fraclap::detail
