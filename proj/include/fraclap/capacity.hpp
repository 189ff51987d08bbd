#pragma once

#include "fraclap/solver.hpp"

namespace fraclap {

struct CapacityReport {
    double value = 0.0;           // [u*]^p
    DiscreteField potential;      // u*: >= 1 on E, 0 outside D_mask
    int iterations = 0;
    double final_gradient_norm = 0.0;  // projected gradient
    SolveStatus status = SolveStatus::converged;
};

/// cap_{s,p}(E; D): minimizes [u]^p over fields supported in D_mask subject
/// to u >= 1 on the nodes of E, by projected (clipping) gradient descent.
/// An empty E returns value 0 immediately.
CapacityReport relative_capacity(const NonlocalKernel& kernel, const DomainMask& E,
                                 const DomainMask& D_mask, const SolverOptions& options);

/// cap_{s,p}(A \ B; D); 0 when the difference is empty.
double capacity_of_difference(const NonlocalKernel& kernel, const DomainMask& A,
                              const DomainMask& B, const DomainMask& D_mask,
                              const SolverOptions& options);

}  // namespace fraclap
