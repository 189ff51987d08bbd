#pragma once

#include <optional>
#include <vector>

#include "fraclap/kernel.hpp"

namespace fraclap {

struct SolverOptions {
    int max_iterations = 50000;
    double gradient_tolerance = 1e-8;  // h^n-weighted dual norm
    double initial_step = 1.0;
    double shrink_factor = 0.5;
    double sufficient_decrease = 1e-4;
    std::optional<DiscreteField> initial_guess;  // zero when absent
    bool record_energy_history = false;

    void validate() const;
};

enum class SolveStatus { converged, iteration_limit };

struct SolveReport {
    DiscreteField solution;  // u_Omega^f
    double final_energy = 0.0;
    int iterations = 0;
    double final_gradient_norm = 0.0;
    double energy_identity_residual = 0.0;  // |[u]^p - <f,u>| / max(1, [u]^p)
    double norm_sp = 0.0;
    SolveStatus status = SolveStatus::converged;
    std::vector<double> energy_history;  // accepted iterates, when recorded
};

/// Minimizes J(u) = (1/p)[u]^p - <f,u> over fields supported in `mask` by
/// projected gradient descent with Armijo backtracking. Non-convergence
/// within max_iterations is reported in the status, not thrown.
SolveReport solve_dirichlet(const NonlocalKernel& kernel, const DomainMask& mask,
                            const SourceTerm& f, const SolverOptions& options);

/// Direct solve of the p = 2 case: assembles the SPD system
///   A_ii = 2 sum_{j != i} w_ij + t_i h^n,  A_ij = -2 w_ij,  b_i = h^n f_i
/// over the support nodes and factorizes it.
DiscreteField linear_oracle_p2(const NonlocalKernel& kernel, const DomainMask& mask,
                               const SourceTerm& f);

struct BoundCheck {
    bool pass = false;
    double bound = 0.0;   // C(||f||_{p'}, c)
    double norm_sp = 0.0;
    double slack = 0.0;   // bound - norm_sp
};

/// Checks ||u||_{s,p} <= (1 + c^p)^{1/p} (c ||f||_{p'})^{1/(p-1)} with the
/// empirical Poincare constant c; the domain-independent solution bound.
BoundCheck verify_bound(const NonlocalKernel& kernel, const SolveReport& report,
                        const SourceTerm& f, double poincare_constant);

}  // namespace fraclap
