#include "fraclap/capacity.hpp"

#include <cmath>
#include <stdexcept>

#include "descent.hpp"

namespace fraclap {

CapacityReport relative_capacity(const NonlocalKernel& kernel, const DomainMask& E,
                                 const DomainMask& D_mask, const SolverOptions& options) {
    if (!(E.grid == kernel.grid()) || !(D_mask.grid == kernel.grid()))
        throw std::invalid_argument("relative_capacity: grid mismatch");
    if (!is_subset(E, D_mask))
        throw std::invalid_argument("relative_capacity: E is not contained in D_mask");

    CapacityReport report;
    if (E.empty()) {
        report.potential = DiscreteField::zero(D_mask);
        return report;  // u = 0 is admissible; the infimum is 0
    }

    double hn = kernel.grid().cell_measure();
    SourceTerm zero_f = SourceTerm::constant(kernel.grid(), 0.0);

    detail::DescentProblem prob;
    prob.objective = [&](const DiscreteField& u) {
        return kernel.gagliardo_p(u) / kernel.params().p;
    };
    prob.gradient = [&](const DiscreteField& u) {
        return kernel.energy_gradient(u, zero_f);
    };
    prob.project = [&](std::vector<double>& v) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!D_mask.inside[i])
                v[i] = 0.0;
            else if (E.inside[i] && v[i] < 1.0)
                v[i] = 1.0;
        }
    };
    prob.projected_norm = [&](const DiscreteField& u, const DiscreteField& g) {
        double acc = 0.0;
        for (std::size_t i = 0; i < g.values.size(); ++i) {
            double gi = g.values[i];
            // At an active lower bound only the descent-blocked part counts.
            if (E.inside[i] && u.values[i] <= 1.0 + 1e-12 && gi > 0.0) gi = 0.0;
            acc += gi * gi;
        }
        return std::sqrt(hn * acc);
    };

    // Indicator of E: feasible and supported in D_mask.
    DiscreteField start = DiscreteField::zero(D_mask);
    for (std::size_t i = 0; i < start.values.size(); ++i)
        if (E.inside[i]) start.values[i] = 1.0;

    detail::DescentResult res = detail::projected_descent(prob, std::move(start), options);
    report.potential = std::move(res.solution);
    report.iterations = res.iterations;
    report.final_gradient_norm = res.gradient_norm;
    report.status = res.status;
    report.value = kernel.gagliardo_p(report.potential);
    return report;
}

double capacity_of_difference(const NonlocalKernel& kernel, const DomainMask& A,
                              const DomainMask& B, const DomainMask& D_mask,
                              const SolverOptions& options) {
    DomainMask diff = set_minus(A, B);
    if (diff.empty()) return 0.0;
    return relative_capacity(kernel, set_intersection(diff, D_mask), D_mask, options).value;
}

}  // namespace fraclap
