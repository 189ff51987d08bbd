#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "fraclap/solver.hpp"

using namespace fraclap;

namespace {

FractionalParams params(double s, double p) {
    FractionalParams fp;
    fp.s = s;
    fp.p = p;
    return fp;
}

// For p < 2 the gradient map is only Holder continuous near zero differences,
// so first-order descent cannot drive the gradient norm arbitrarily low.
SolverOptions tight_options(double p = 2.0) {
    SolverOptions o;
    o.gradient_tolerance = p < 2.0 ? 1e-6 : 1e-10;
    return o;
}

}  // namespace

TEST_CASE("solver option validation") {
    SolverOptions o;
    o.shrink_factor = 1.0;
    CHECK_THROWS_AS(o.validate(), std::invalid_argument);
    o = SolverOptions{};
    o.sufficient_decrease = 0.6;
    CHECK_THROWS_AS(o.validate(), std::invalid_argument);
    o = SolverOptions{};
    o.gradient_tolerance = 0.0;
    CHECK_THROWS_AS(o.validate(), std::invalid_argument);
}

TEST_CASE("zero source gives the zero solution") {
    GridSpec g = build_grid(1, 0.0, 1.0, 1.0 / 16.0);
    DomainMask mask = DomainMask::interior(g);
    NonlocalKernel k(g, params(0.5, 2.5));
    SourceTerm f = SourceTerm::constant(g, 0.0);
    SolveReport r = solve_dirichlet(k, mask, f, SolverOptions{});
    CHECK(r.status == SolveStatus::converged);
    CHECK(r.final_energy == doctest::Approx(0.0));
    for (double v : r.solution.values) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("empty mask is rejected") {
    GridSpec g = build_grid(1, 0.0, 1.0, 0.25);
    NonlocalKernel k(g, params(0.5, 2.0));
    SourceTerm f = SourceTerm::constant(g, 1.0);
    CHECK_THROWS_AS(solve_dirichlet(k, DomainMask::empty_mask(g), f, SolverOptions{}),
                    std::invalid_argument);
}

TEST_CASE("p=2 solve matches the linear oracle") {
    GridSpec g = build_grid(1, 0.0, 1.0, 1.0 / 32.0);
    DomainMask mask = DomainMask::interior(g);
    NonlocalKernel k(g, params(0.5, 2.0));
    SourceTerm f = SourceTerm::constant(g, 1.0);
    SolveReport r = solve_dirichlet(k, mask, f, tight_options());
    REQUIRE(r.status == SolveStatus::converged);
    DiscreteField oracle = linear_oracle_p2(k, mask, f);
    double sup = 0.0, err = 0.0;
    for (int i = 0; i < g.node_count(); ++i) {
        sup = std::max(sup, std::abs(oracle.values[i]));
        err = std::max(err, std::abs(oracle.values[i] - r.solution.values[i]));
    }
    CHECK(err <= 1e-6 * sup);
}

TEST_CASE("linear oracle residual and assembly properties") {
    GridSpec g = build_grid(1, 0.0, 1.0, 1.0 / 32.0);
    DomainMask mask = DomainMask::interior(g);
    NonlocalKernel k(g, params(0.5, 2.0));
    SourceTerm f = SourceTerm::constant(g, 1.0);

    // zero source
    SourceTerm zero = SourceTerm::constant(g, 0.0);
    DiscreteField uz = linear_oracle_p2(k, mask, zero);
    for (double v : uz.values) CHECK(v == doctest::Approx(0.0));

    // assembled matrix is symmetric and strictly diagonally dominant
    std::vector<int> sup;
    for (int i = 0; i < g.node_count(); ++i)
        if (mask.contains(i)) sup.push_back(i);
    double hn = g.cell_measure();
    for (int a = 0; a < static_cast<int>(sup.size()); ++a) {
        double diag = 0.0, offsum = 0.0;
        for (int j = 0; j < g.node_count(); ++j)
            if (j != sup[a]) diag += 2.0 * k.weight(sup[a], j);
        diag += k.tails().t[sup[a]] * hn;
        for (int b = 0; b < static_cast<int>(sup.size()); ++b)
            if (b != a) offsum += std::abs(-2.0 * k.weight(sup[a], sup[b]));
        CHECK(diag > offsum);
    }

    // residual ||A u - b||_inf after the direct solve
    DiscreteField u = linear_oracle_p2(k, mask, f);
    DiscreteField g1 = k.energy_gradient(u, f);  // = A u - b on support for p=2
    double res = 0.0;
    for (double v : g1.values) res = std::max(res, std::abs(v));
    CHECK(res <= 1e-10);

    CHECK_THROWS_AS(linear_oracle_p2(NonlocalKernel(g, params(0.5, 3.0)), mask, f),
                    std::invalid_argument);
}

TEST_CASE("solution is independent of the initialization") {
    GridSpec g = build_grid(1, 0.0, 1.0, 1.0 / 32.0);
    DomainMask mask = DomainMask::interior(g);
    SourceTerm f = SourceTerm::constant(g, 1.0);
    for (double p : {1.5, 3.0}) {
        NonlocalKernel k(g, params(0.5, p));
        SolverOptions a = tight_options(p);
        a.initial_guess = random_field(mask, 1);
        SolverOptions b = tight_options(p);
        b.initial_guess = random_field(mask, 2);
        SolveReport ra = solve_dirichlet(k, mask, f, a);
        SolveReport rb = solve_dirichlet(k, mask, f, b);
        REQUIRE(ra.status == SolveStatus::converged);
        REQUIRE(rb.status == SolveStatus::converged);
        DiscreteField diff = field_difference(ra.solution, rb.solution);
        CHECK(k.norm_sp(diff) <= 1e-5);
    }
}

TEST_CASE("energy decreases monotonically across accepted iterations") {
    GridSpec g = build_grid(1, 0.0, 1.0, 1.0 / 32.0);
    DomainMask mask = DomainMask::interior(g);
    NonlocalKernel k(g, params(0.5, 3.0));
    SourceTerm f = SourceTerm::constant(g, 1.0);
    SolverOptions o;
    o.record_energy_history = true;
    o.initial_guess = random_field(mask, 5);
    SolveReport r = solve_dirichlet(k, mask, f, o);
    REQUIRE(r.energy_history.size() > 2);
    for (std::size_t i = 1; i < r.energy_history.size(); ++i)
        CHECK(r.energy_history[i] <= r.energy_history[i - 1] + 1e-15);
}

TEST_CASE("energy identity holds at the solution") {
    GridSpec g = build_grid(1, 0.0, 1.0, 1.0 / 32.0);
    DomainMask mask = DomainMask::interior(g);
    SourceTerm f = SourceTerm::constant(g, 1.0);
    for (double p : {1.5, 2.0, 3.0}) {
        NonlocalKernel k(g, params(0.5, p));
        SolveReport r = solve_dirichlet(k, mask, f, tight_options(p));
        REQUIRE(r.status == SolveStatus::converged);
        CHECK(r.energy_identity_residual <= 1e-6);
    }
}

TEST_CASE("shrinking the mask cannot lower the minimum energy") {
    GridSpec g = build_grid(1, 0.0, 1.0, 1.0 / 32.0);
    DomainMask big = DomainMask::interior(g);
    DomainMask small = rasterize(g, Shape::box1d(0.25, 0.75));
    NonlocalKernel k(g, params(0.5, 2.0));
    SourceTerm f = SourceTerm::constant(g, 1.0);
    SolveReport rb = solve_dirichlet(k, big, f, tight_options());
    SolveReport rs = solve_dirichlet(k, small, f, tight_options());
    CHECK(rs.final_energy >= rb.final_energy - 1e-10);
}

TEST_CASE("verify_bound") {
    GridSpec g = build_grid(1, 0.0, 1.0, 1.0 / 32.0);
    DomainMask mask = DomainMask::interior(g);
    NonlocalKernel k(g, params(0.5, 2.0));
    double c = poincare_diagnostic(k, mask, 100, 3);

    SourceTerm zero = SourceTerm::constant(g, 0.0);
    SolveReport rz = solve_dirichlet(k, mask, zero, SolverOptions{});
    CHECK(verify_bound(k, rz, zero, c).pass);

    SourceTerm f1 = SourceTerm::constant(g, 1.0);
    SolveReport r1 = solve_dirichlet(k, mask, f1, tight_options());
    BoundCheck b1 = verify_bound(k, r1, f1, c);
    CHECK(b1.pass);
    CHECK(b1.slack >= 0.0);

    // doubling f grows norm_sp by at most 2^{1/(p-1)}
    SourceTerm f2 = SourceTerm::constant(g, 2.0);
    SolveReport r2 = solve_dirichlet(k, mask, f2, tight_options());
    CHECK(verify_bound(k, r2, f2, c).pass);
    CHECK(r2.norm_sp <= std::pow(2.0, 1.0 / (k.params().p - 1.0)) * r1.norm_sp + 1e-8);
}

TEST_CASE("bound holds uniformly across nested masks with the same f") {
    GridSpec g = build_grid(1, 0.0, 1.0, 1.0 / 32.0);
    NonlocalKernel k(g, params(0.5, 2.0));
    DomainMask D = DomainMask::interior(g);
    double c = poincare_diagnostic(k, D, 100, 3);
    SourceTerm f = SourceTerm::constant(g, 1.0);
    for (double lo : {0.1, 0.25, 0.4}) {
        DomainMask mask = rasterize(g, Shape::box1d(lo, 1.0 - lo));
        SolveReport r = solve_dirichlet(k, mask, f, tight_options());
        CHECK(verify_bound(k, r, f, c).pass);
    }
}
