// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances are pinned here, not configurable.
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fraclap/capacity.hpp"
#include "fraclap/io.hpp"
#include "fraclap/perturbation.hpp"

using namespace fraclap;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& what,
            const std::string& detail = "") {
    std::printf("[%s] criterion %d: %s%s%s\n", pass ? "PASS" : "FAIL", criterion,
                what.c_str(), detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return buf;
}

FractionalParams params(double s, double p) {
    FractionalParams fp;
    fp.s = s;
    fp.p = p;
    return fp;
}

// For p < 2 the gradient map is only Holder continuous near zero differences,
// so first-order descent cannot drive the gradient norm arbitrarily low.
SolverOptions tight(double p = 2.0) {
    SolverOptions o;
    o.gradient_tolerance = p < 2.0 ? 1e-6 : 1e-10;
    return o;
}

// Criterion 1: p=2 descent solution vs direct linear solve, node-wise.
void criterion1() {
    GridSpec g = build_grid(1, 0.0, 1.0, 1.0 / 64.0);
    DomainMask mask = DomainMask::interior(g);
    NonlocalKernel k(g, params(0.5, 2.0));
    SourceTerm f = SourceTerm::constant(g, 1.0);
    SolveReport r = solve_dirichlet(k, mask, f, tight());
    DiscreteField oracle = linear_oracle_p2(k, mask, f);
    double sup = 0.0, err = 0.0;
    for (int i = 0; i < g.node_count(); ++i) {
        sup = std::max(sup, std::abs(oracle.values[i]));
        err = std::max(err, std::abs(oracle.values[i] - r.solution.values[i]));
    }
    bool pass = r.status == SolveStatus::converged && err <= 1e-6 * sup;
    report(1, pass, "p=2 oracle equivalence", "rel sup error " + fmt(err / sup));
}

// Criterion 2: energy identity [u]^p = <f,u> at the minimizer.
void criterion2() {
    GridSpec g = build_grid(1, 0.0, 1.0, 1.0 / 64.0);
    DomainMask mask = DomainMask::interior(g);
    SourceTerm f = SourceTerm::constant(g, 1.0);
    double worst = 0.0;
    bool converged = true;
    for (double p : {1.5, 2.0, 3.0}) {
        NonlocalKernel k(g, params(0.5, p));
        SolveReport r = solve_dirichlet(k, mask, f, tight(p));
        converged = converged && r.status == SolveStatus::converged;
        worst = std::max(worst, r.energy_identity_residual);
    }
    report(2, converged && worst <= 1e-6, "energy identity",
           "max relative residual " + fmt(worst));
}

// Criterion 3: analytic gradient vs central finite differences.
void criterion3() {
    GridSpec g = build_grid(1, 0.0, 1.0, 1.0 / 32.0);
    DomainMask mask = DomainMask::interior(g);
    SourceTerm f = SourceTerm::constant(g, 1.0);
    double step = std::cbrt(std::numeric_limits<double>::epsilon());
    double worst = 0.0;
    for (double p : {1.5, 2.0, 3.0}) {
        NonlocalKernel k(g, params(0.5, p));
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            DiscreteField u = random_field(mask, 100 + seed);
            DiscreteField grad = k.energy_gradient(u, f);
            double gmax = 0.0;
            for (double v : grad.values) gmax = std::max(gmax, std::abs(v));
            for (int i = 0; i < g.node_count(); ++i) {
                if (!mask.contains(i)) continue;
                DiscreteField up = u, um = u;
                up.values[i] += step;
                um.values[i] -= step;
                double fd = (k.energy(up, f) - k.energy(um, f)) / (2.0 * step);
                worst = std::max(worst, std::abs(fd - grad.values[i]) / gmax);
            }
        }
    }
    report(3, worst <= 1e-5, "gradient vs central differences",
           "max relative error " + fmt(worst));
}

// Criterion 4: minimizer independent of the starting point.
void criterion4() {
    GridSpec g = build_grid(1, 0.0, 1.0, 1.0 / 32.0);
    DomainMask mask = DomainMask::interior(g);
    SourceTerm f = SourceTerm::constant(g, 1.0);
    double worst = 0.0;
    bool converged = true;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> pick_p(1.4, 3.0);
    for (int t = 0; t < 5; ++t) {
        double p = pick_p(rng);
        NonlocalKernel k(g, params(0.5, p));
        SolverOptions a = tight(p);
        a.initial_guess = random_field(mask, 2 * t + 1);
        SolverOptions b = tight(p);
        b.initial_guess = random_field(mask, 2 * t + 2);
        SolveReport ra = solve_dirichlet(k, mask, f, a);
        SolveReport rb = solve_dirichlet(k, mask, f, b);
        converged = converged && ra.status == SolveStatus::converged &&
                    rb.status == SolveStatus::converged;
        worst = std::max(worst, k.norm_sp(field_difference(ra.solution, rb.solution)));
    }
    report(4, converged && worst <= 1e-5, "initialization independence",
           "max (s,p)-norm gap " + fmt(worst));
}

// Criterion 5: capacity is zero on the empty set, monotone in E, subadditive,
// and antitone in D.
void criterion5() {
    GridSpec g = build_grid(1, 0.0, 1.0, 1.0 / 24.0);
    NonlocalKernel k(g, params(0.5, 2.0));
    DomainMask D = DomainMask::interior(g);
    const double tol = 2e-10;  // 2x solver tolerance

    bool pass = relative_capacity(k, DomainMask::empty_mask(g), D, tight()).value == 0.0;

    std::mt19937_64 rng(31);
    std::bernoulli_distribution coin4(0.4), coin5(0.5), coin25(0.25);
    auto subset = [&](const DomainMask& within, auto& coin) {
        DomainMask m = DomainMask::empty_mask(g);
        for (int i = 0; i < g.node_count(); ++i)
            if (within.contains(i) && coin(rng)) m.inside[i] = 1;
        return m;
    };
    double worst_mono = 0.0, worst_sub = 0.0;
    for (int t = 0; t < 20; ++t) {
        DomainMask e2 = subset(D, coin4);
        DomainMask e1 = subset(e2, coin5);
        double v1 = relative_capacity(k, e1, D, tight()).value;
        double v2 = relative_capacity(k, e2, D, tight()).value;
        worst_mono = std::max(worst_mono, v1 - v2);

        DomainMask a = subset(D, coin25);
        DomainMask b = subset(D, coin25);
        double vu = relative_capacity(k, set_union(a, b), D, tight()).value;
        double va = relative_capacity(k, a, D, tight()).value;
        double vb = relative_capacity(k, b, D, tight()).value;
        worst_sub = std::max(worst_sub, vu - va - vb);
    }
    pass = pass && worst_mono <= tol && worst_sub <= tol;

    DomainMask E = rasterize(g, Shape::box1d(0.45, 0.55));
    double worst_d = 0.0;
    double prev = std::numeric_limits<double>::infinity();
    for (int t = 0; t < 10; ++t) {
        double lo = 0.35 - 0.03 * t;
        DomainMask d = rasterize(g, Shape::box1d(lo, 1.0 - lo));
        double v = relative_capacity(k, E, d, tight()).value;
        worst_d = std::max(worst_d, v - prev);
        prev = v;
    }
    pass = pass && worst_d <= tol;
    report(5, pass, "capacity properties",
           "violations: monotone-E " + fmt(worst_mono) + ", subadditive " +
               fmt(worst_sub) + ", monotone-D " + fmt(worst_d));
}

DomainSequenceSpec hole_spec_1d() {
    DomainSequenceSpec spec;
    spec.kind = SequenceKind::shrinking_hole;
    spec.base = Shape::difference(Shape::box1d(0.0, 1.0), Shape::ball1d(0.5, 0.3));
    spec.center = {0.5, 0.0};
    spec.radii = {0.3, 0.15, 0.075, 0.0375, 0.01875};
    spec.steps = 5;
    return spec;
}

// Criterion 6: cap(Omega_k \ Omega; D) strictly decreasing, last/first <= 0.1.
void criterion6() {
    GridSpec g = build_grid(1, 0.0, 1.0, 1.0 / 127.0);  // 128 nodes
    NonlocalKernel k(g, params(0.5, 2.0));
    DomainMask D = DomainMask::interior(g);
    DomainSequence seq = generate_sequence(hole_spec_1d(), g);
    std::vector<double> caps;
    for (const DomainMask& m : seq.step_masks)
        caps.push_back(capacity_of_difference(k, m, seq.limit, D, tight()));
    bool decreasing = true;
    for (std::size_t i = 1; i < caps.size(); ++i)
        if (caps[i] >= caps[i - 1]) decreasing = false;
    double ratio = caps.back() / caps.front();
    std::string detail = "values";
    for (double c : caps) detail += " " + fmt(c);
    detail += "; last/first " + fmt(ratio);
    report(6, decreasing && ratio <= 0.1, "capacity decay on shrinking holes", detail);
}

struct SequenceRatios {
    double sol_ratio = 0.0;
    double energy_ratio = 0.0;
    bool decreasing = true;
    bool converged = true;
};

SequenceRatios run_hole_experiment(const DomainSequenceSpec& spec, const GridSpec& g) {
    SourceTerm f = SourceTerm::constant(g, 1.0);
    ExperimentOptions o;
    o.solver = tight();
    PerturbationRun run = run_experiment(spec, g, f, params(0.5, 2.0), o);
    SequenceRatios out;
    for (std::size_t i = 1; i < run.records.size(); ++i) {
        if (run.records[i].sol_gap_sp > run.records[i - 1].sol_gap_sp)
            out.decreasing = false;
        if (run.records[i].energy_gap > run.records[i - 1].energy_gap)
            out.decreasing = false;
    }
    for (const StepRecord& r : run.records)
        if (r.status != StepStatus::ok) out.converged = false;
    out.sol_ratio = run.records.back().sol_gap_sp / run.records.front().sol_gap_sp;
    out.energy_ratio = run.records.back().energy_gap / run.records.front().energy_gap;
    return out;
}

// Criterion 7: solution and energy gaps to the limit shrink to <= 0.2 of the
// first step, in 1D and on a 2D disk-hole domain.
void criterion7() {
    GridSpec g1 = build_grid(1, 0.0, 1.0, 1.0 / 127.0);
    SequenceRatios r1 = run_hole_experiment(hole_spec_1d(), g1);

    GridSpec g2 = build_grid(2, {0.0, 0.0}, {1.0, 1.0}, 1.0 / 31.0);  // 32x32
    DomainSequenceSpec spec2;
    spec2.kind = SequenceKind::shrinking_hole;
    spec2.base = Shape::difference(Shape::box({0.0, 0.0}, {1.0, 1.0}),
                                   Shape::ball({0.5, 0.5}, 0.3));
    spec2.center = {0.5, 0.5};
    spec2.radii = {0.3, 0.15, 0.075, 0.0375, 0.01875};
    spec2.steps = 5;
    SequenceRatios r2 = run_hole_experiment(spec2, g2);

    bool pass = r1.converged && r1.decreasing && r1.sol_ratio <= 0.2 &&
                r1.energy_ratio <= 0.2 && r2.converged && r2.decreasing &&
                r2.sol_ratio <= 0.2 && r2.energy_ratio <= 0.2;
    report(7, pass, "domain-perturbation convergence",
           "1D sol/energy ratios " + fmt(r1.sol_ratio) + "/" + fmt(r1.energy_ratio) +
               ", 2D " + fmt(r2.sol_ratio) + "/" + fmt(r2.energy_ratio));
}

// Criterion 8 (report-only): periodic perforation keeps a capacity floor and a
// solution gap that never drops below 25% of its initial value.
void criterion8() {
    GridSpec g = build_grid(1, 0.0, 1.0, 1.0 / 127.0);
    DomainSequenceSpec spec;
    spec.kind = SequenceKind::periodic_perforation;
    spec.base = Shape::box1d(0.0, 1.0);
    spec.perforation_radii = {0.04, 0.04, 0.04, 0.04};
    spec.perforation_spacings = {0.2, 0.2, 0.2, 0.2};
    spec.steps = 4;
    SourceTerm f = SourceTerm::constant(g, 1.0);
    ExperimentOptions o;
    o.solver = tight();
    PerturbationRun run = run_experiment(spec, g, f, params(0.5, 2.0), o);

    double cap_floor = std::numeric_limits<double>::infinity();
    double gap_min = std::numeric_limits<double>::infinity();
    for (const StepRecord& r : run.records) {
        cap_floor = std::min(cap_floor, r.cap_in);
        gap_min = std::min(gap_min, r.sol_gap_sp);
    }
    double gap_fraction = gap_min / run.records.front().sol_gap_sp;
    // exploratory run: always reported as pass, with the diagnostics logged
    report(8, true, "perforation non-convergence diagnostic (exploratory)",
           "capacity floor " + fmt(cap_floor) + ", min gap fraction " +
               fmt(gap_fraction) + ", verdict " + to_string(run.verdict));
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// Criterion 9: CLI reruns with --deterministic --seed 7 give bit-identical
// CSVs for a solve, a capacity run, and a perturbation experiment.
void criterion9() {
    const char* cli = std::getenv("FRACLAP_CLI");
    if (!cli) {
        report(9, false, "determinism", "FRACLAP_CLI not set");
        return;
    }
    fs::path root = fs::temp_directory_path() / "fraclap_acceptance_det";
    fs::remove_all(root);
    fs::create_directories(root);

    std::string config = R"(
[grid]
dimension = 1
box_min = 0
box_max = 1
h = 0.0078125

[params]
s = 0.5
p = 2.5

[shape]
omega = difference(box(0, 1), ball(0.5, 0.3))

[capacity]
e = ball(0.5, 0.1)

[sequence]
kind = shrinking_hole
center = 0.5
radii = 0.3, 0.15, 0.075
steps = 3

[source]
f = sin(3*x) + 1
)";
    write_file((root / "run.cfg").string(), config);

    bool pass = true;
    std::string detail;
    for (const char* sub : {"solve", "capacity", "perturb"}) {
        fs::path a = root / (std::string(sub) + "_a");
        fs::path b = root / (std::string(sub) + "_b");
        for (const fs::path& out : {a, b}) {
            std::string cmd = std::string("\"") + cli + "\" " + sub + " --config \"" +
                              (root / "run.cfg").string() + "\" --out \"" +
                              out.string() + "\" --deterministic --seed 7 --quiet";
            if (std::system(cmd.c_str()) != 0) {
                pass = false;
                detail += std::string(sub) + " run failed; ";
            }
        }
        const char* artifact = std::string(sub) == "solve"      ? "solution.csv"
                               : std::string(sub) == "capacity" ? "potential.csv"
                                                                : "run.csv";
        std::string ca = slurp(a / artifact), cb = slurp(b / artifact);
        if (ca.empty() || ca != cb) {
            pass = false;
            detail += std::string(sub) + " CSVs differ; ";
        }
    }
    fs::remove_all(root);
    report(9, pass, "determinism of CLI reruns",
           detail.empty() ? "all CSVs bit-identical" : detail);
}

// Criterion 10: the empirical Poincare ratio is finite and seed-stable.
void criterion10() {
    GridSpec g = build_grid(1, 0.0, 1.0, 1.0 / 64.0);
    NonlocalKernel k(g, params(0.5, 2.0));
    DomainMask mask = rasterize(g, Shape::box1d(0.1, 0.9));
    double c1 = poincare_diagnostic(k, mask, 100, 41);
    double c2 = poincare_diagnostic(k, mask, 100, 42);
    bool finite = std::isfinite(c1) && std::isfinite(c2) && c1 > 0.0 && c2 > 0.0;
    double spread = std::abs(c1 - c2) / std::max(c1, c2);
    report(10, finite && spread <= 0.05, "Poincare diagnostic",
           "constants " + fmt(c1) + ", " + fmt(c2) + "; spread " + fmt(spread));
}

}  // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    criterion10();
    if (g_failures > 0) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
