#pragma once

#include <string>
#include <vector>

#include "fraclap/capacity.hpp"
#include "fraclap/solver.hpp"

namespace fraclap {

enum class StepStatus { ok, no_convergence };
enum class Verdict { converged, not_converged, inconclusive };

std::string to_string(StepStatus s);
std::string to_string(Verdict v);

struct StepRecord {
    int k = 0;
    double dH = 0.0;          // d^H(Omega_k, Omega)
    double cap_out = 0.0;     // cap_{s,p}(Omega_k \ Omega; D)
    double cap_in = 0.0;      // cap_{s,p}(Omega \ Omega_k; D), diagnostic
    double sol_gap_sp = 0.0;  // ||u_k - u_Omega||_{s,p}
    double energy_gap = 0.0;  // |[u_k]^p - [u_Omega]^p|
    double duality = 0.0;     // <f, u_k>
    StepStatus status = StepStatus::ok;
};

struct ExperimentOptions {
    SolverOptions solver;
    double decrease_factor = 0.2;  // converged: last <= factor * first
    double floor_fraction = 0.25;  // not_converged: last >= fraction * first
};

struct PerturbationRun {
    std::vector<StepRecord> records;
    Verdict verdict = Verdict::inconclusive;
    double limit_energy_p = 0.0;    // [u_Omega]^p
    double limit_duality = 0.0;     // <f, u_Omega>
    DiscreteField limit_solution;
    std::vector<DiscreteField> step_solutions;
    std::vector<double> identity_residuals;  // per step, |[u_k]^p - <f,u_k>| rel
};

/// Solves on the limit domain once and on every Omega_k, computes per-step
/// metrics, and assigns the finite-run verdict.
PerturbationRun run_experiment(const DomainSequenceSpec& seq, const GridSpec& grid,
                               const SourceTerm& f, const FractionalParams& params,
                               const ExperimentOptions& options);

/// CSV: header, one row per step, trailer row carrying the verdict.
/// Columns: k,dH,cap_out,cap_in,sol_gap_sp,energy_gap,duality,step_status.
std::string convergence_table(const PerturbationRun& run);

struct ParsedTable {
    std::vector<StepRecord> records;
    Verdict verdict = Verdict::inconclusive;
};

ParsedTable parse_convergence_table(const std::string& csv);

struct StrongConvergenceCheck {
    bool pass = false;
    double max_identity_residual = 0.0;
    double energy_gap_ratio = 0.0;  // last / first, 0 when first is ~0
};

/// Verifies the energy identity [u_k]^p = <f, u_k> at every step and that the
/// energy gap to the limit shrinks by the configured factor.
StrongConvergenceCheck strong_convergence_check(const PerturbationRun& run,
                                                double identity_tolerance,
                                                double decrease_factor);

}  // namespace fraclap
