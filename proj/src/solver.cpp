#include "fraclap/solver.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "descent.hpp"

namespace fraclap {

void SolverOptions::validate() const {
    if (max_iterations < 1)
        throw std::invalid_argument("solver: max_iterations must be >= 1");
    if (!(gradient_tolerance > 0.0))
        throw std::invalid_argument("solver: gradient_tolerance must be positive");
    if (!(initial_step > 0.0))
        throw std::invalid_argument("solver: initial_step must be positive");
    if (!(shrink_factor > 0.0 && shrink_factor < 1.0))
        throw std::invalid_argument("solver: shrink_factor must lie in (0,1)");
    if (!(sufficient_decrease > 0.0 && sufficient_decrease <= 0.5))
        throw std::invalid_argument("solver: sufficient_decrease must lie in (0, 0.5]");
}

SolveReport solve_dirichlet(const NonlocalKernel& kernel, const DomainMask& mask,
                            const SourceTerm& f, const SolverOptions& options) {
    if (mask.empty()) throw std::invalid_argument("solve_dirichlet: empty mask");
    if (!(mask.grid == kernel.grid()) || !(f.grid == kernel.grid()))
        throw std::invalid_argument("solve_dirichlet: grid mismatch");

    double hn = kernel.grid().cell_measure();
    detail::DescentProblem prob;
    prob.objective = [&](const DiscreteField& u) { return kernel.energy(u, f); };
    prob.gradient = [&](const DiscreteField& u) { return kernel.energy_gradient(u, f); };
    prob.project = [&](std::vector<double>& v) {
        for (std::size_t i = 0; i < v.size(); ++i)
            if (!mask.inside[i]) v[i] = 0.0;
    };
    prob.projected_norm = [&](const DiscreteField&, const DiscreteField& g) {
        double acc = 0.0;
        for (double x : g.values) acc += x * x;
        return std::sqrt(hn * acc);
    };

    DiscreteField start = options.initial_guess
                              ? DiscreteField::projected(mask, options.initial_guess->values)
                              : DiscreteField::zero(mask);
    detail::DescentResult res = detail::projected_descent(prob, std::move(start), options);

    SolveReport report;
    report.solution = std::move(res.solution);
    report.iterations = res.iterations;
    report.final_gradient_norm = res.gradient_norm;
    report.status = res.status;
    report.final_energy = kernel.energy(report.solution, f);
    report.energy_identity_residual = kernel.energy_identity_residual(report.solution, f);
    report.norm_sp = kernel.norm_sp(report.solution);
    report.energy_history = std::move(res.energy_history);
    return report;
}

DiscreteField linear_oracle_p2(const NonlocalKernel& kernel, const DomainMask& mask,
                               const SourceTerm& f) {
    if (kernel.params().p != 2.0)
        throw std::invalid_argument("linear_oracle_p2: requires p = 2");
    if (mask.empty()) throw std::invalid_argument("linear_oracle_p2: empty mask");

    const GridSpec& grid = kernel.grid();
    double hn = grid.cell_measure();
    bool tails = kernel.params().tail_mode == TailMode::analytic;

    std::vector<int> sup;
    for (int i = 0; i < grid.node_count(); ++i)
        if (mask.contains(i)) sup.push_back(i);
    int m = static_cast<int>(sup.size());

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd b(m);
    for (int a = 0; a < m; ++a) {
        int i = sup[a];
        double diag = 0.0;
        for (int j = 0; j < grid.node_count(); ++j)
            if (j != i) diag += kernel.weight(i, j);
        diag *= 2.0;
        if (tails) diag += kernel.tails().t[i] * hn;
        A(a, a) = diag;
        for (int c = a + 1; c < m; ++c) {
            double off = -2.0 * kernel.weight(i, sup[c]);
            A(a, c) = off;
            A(c, a) = off;
        }
        b(a) = hn * f.density[i];
    }

    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("linear_oracle_p2: Cholesky factorization failed");
    Eigen::VectorXd x = llt.solve(b);

    DiscreteField u = DiscreteField::zero(mask);
    for (int a = 0; a < m; ++a) u.values[sup[a]] = x(a);
    return u;
}

BoundCheck verify_bound(const NonlocalKernel& kernel, const SolveReport& report,
                        const SourceTerm& f, double poincare_constant) {
    double p = kernel.params().p;
    double pc = p / (p - 1.0);
    double hn = kernel.grid().cell_measure();
    double fp = 0.0;
    for (double x : f.density) fp += std::pow(std::abs(x), pc);
    double f_norm = std::pow(hn * fp, 1.0 / pc);

    // [u]^p = <f,u> <= ||f||_{p'} ||u||_p <= c ||f||_{p'} [u]  gives
    // [u] <= (c ||f||)^{1/(p-1)}, and ||u||_{s,p} <= (1+c^p)^{1/p} [u].
    double c = poincare_constant;
    double bound = std::pow(1.0 + std::pow(c, p), 1.0 / p) *
                   std::pow(c * f_norm, 1.0 / (p - 1.0));

    BoundCheck check;
    check.bound = bound;
    check.norm_sp = report.norm_sp;
    check.slack = bound - report.norm_sp;
    check.pass = report.norm_sp <= bound;
    return check;
}

}  // namespace fraclap
