#include "fraclap/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fraclap/capacity.hpp"
#include "fraclap/config.hpp"
#include "fraclap/io.hpp"
#include "fraclap/perturbation.hpp"
#include "fraclap/solver.hpp"

namespace fraclap {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNoConvergence = 2;
constexpr int kExitIo = 3;

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    bool deterministic = false;
    std::uint64_t seed = 0;
    bool quiet = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "Path to the run configuration")
        ->required();
    cmd->add_option("--out", args.out_dir, "Output directory");
    cmd->add_flag("--deterministic", args.deterministic,
                  "Force deterministic (fixed-order) reductions");
    cmd->add_option("--seed", args.seed, "Random seed for stochastic initialization");
    cmd->add_flag("--quiet", args.quiet, "Suppress progress output");
}

int load_config(const CommonArgs& args, RunConfig& cfg, std::ostream& err) {
    std::ifstream in(args.config_path, std::ios::binary);
    if (!in) {
        err << "error: cannot read config file: " << args.config_path << "\n";
        return kExitIo;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    ParseResult parsed = parse_config(buf.str());
    if (!parsed.ok()) {
        for (const ParseError& e : parsed.errors)
            err << args.config_path << ":" << e.line << ": " << e.message << "\n";
        return kExitValidation;
    }
    cfg = std::move(*parsed.config);
    cfg.deterministic = args.deterministic;
    cfg.seed = args.seed;
    return kExitOk;
}

std::string out_path(const CommonArgs& args, const std::string& name) {
    return (std::filesystem::path(args.out_dir) / name).string();
}

SolverOptions solver_options(const RunConfig& cfg, const DomainMask& mask) {
    SolverOptions opts = cfg.solver;
    if (cfg.init_mode == InitMode::random)
        opts.initial_guess = random_field(mask, cfg.seed);
    return opts;
}

int cmd_solve(const CommonArgs& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    if (int rc = load_config(args, cfg, err); rc != kExitOk) return rc;

    GridSpec grid = cfg.make_grid();
    DomainMask omega = rasterize(grid, cfg.omega);
    SourceTerm f = cfg.make_source(grid);
    NonlocalKernel kernel(grid, cfg.params);

    SolveReport report = solve_dirichlet(kernel, omega, f, solver_options(cfg, omega));
    if (report.status != SolveStatus::converged) {
        err << "error: solver did not converge within " << cfg.solver.max_iterations
            << " iterations (gradient norm " << format_value(report.final_gradient_norm)
            << ")\n";
        return kExitNoConvergence;
    }
    write_file(out_path(args, "solution.csv"), field_csv(report.solution));
    write_file(out_path(args, "summary.txt"), solve_summary(report));
    if (!args.quiet) out << solve_summary(report);
    return kExitOk;
}

int cmd_capacity(const CommonArgs& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    if (int rc = load_config(args, cfg, err); rc != kExitOk) return rc;
    if (!cfg.capacity_e) {
        err << "error: the capacity command needs [capacity] e = <shape>\n";
        return kExitValidation;
    }

    GridSpec grid = cfg.make_grid();
    NonlocalKernel kernel(grid, cfg.params);
    DomainMask D = cfg.capacity_d ? rasterize(grid, *cfg.capacity_d)
                                  : DomainMask::interior(grid);
    DomainMask E = set_intersection(rasterize(grid, *cfg.capacity_e), D);

    CapacityReport report = relative_capacity(kernel, E, D, cfg.solver);
    if (report.status != SolveStatus::converged) {
        err << "error: capacity minimization did not converge\n";
        return kExitNoConvergence;
    }
    write_file(out_path(args, "potential.csv"), field_csv(report.potential));
    write_file(out_path(args, "summary.txt"), capacity_summary(report));
    if (!args.quiet) out << capacity_summary(report);
    return kExitOk;
}

int cmd_perturb(const CommonArgs& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    if (int rc = load_config(args, cfg, err); rc != kExitOk) return rc;
    if (!cfg.sequence) {
        err << "error: the perturb command needs a [sequence] section\n";
        return kExitValidation;
    }

    GridSpec grid = cfg.make_grid();
    SourceTerm f = cfg.make_source(grid);
    ExperimentOptions opts;
    opts.solver = cfg.solver;
    opts.decrease_factor = cfg.decrease_factor;
    opts.floor_fraction = cfg.floor_fraction;

    PerturbationRun run = run_experiment(*cfg.sequence, grid, f, cfg.params, opts);
    for (const StepRecord& rec : run.records)
        if (rec.status != StepStatus::ok) {
            err << "error: step " << rec.k << " solve did not converge\n";
            return kExitNoConvergence;
        }

    std::string table = convergence_table(run);
    std::ostringstream summary;
    summary << "verdict: " << to_string(run.verdict) << '\n';
    summary << "steps: " << run.records.size() << '\n';
    summary << "limit_energy_p: " << format_value(run.limit_energy_p) << '\n';
    summary << "limit_duality: " << format_value(run.limit_duality) << '\n';

    write_file(out_path(args, "run.csv"), table);
    write_file(out_path(args, "limit_solution.csv"), field_csv(run.limit_solution));
    write_file(out_path(args, "summary.txt"), summary.str());
    if (!args.quiet) out << summary.str();
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Fractional p-Laplacian Dirichlet solver, (s,p)-capacities and "
                 "domain-perturbation experiments"};
    app.require_subcommand(1);

    CommonArgs solve_args, capacity_args, perturb_args;
    CLI::App* solve = app.add_subcommand("solve", "Solve the Dirichlet problem on omega");
    add_common(solve, solve_args);
    CLI::App* capacity =
        app.add_subcommand("capacity", "Compute the relative (s,p)-capacity of E in D");
    add_common(capacity, capacity_args);
    CLI::App* perturb =
        app.add_subcommand("perturb", "Run a domain-sequence convergence experiment");
    add_common(perturb, perturb_args);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return kExitOk;
        }
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    }

    try {
        if (solve->parsed()) return cmd_solve(solve_args, out, err);
        if (capacity->parsed()) return cmd_capacity(capacity_args, out, err);
        if (perturb->parsed()) return cmd_perturb(perturb_args, out, err);
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::runtime_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    }
    err << "error: no subcommand given\n";
    return kExitValidation;
}

}  // namespace fraclap
