#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fraclap/geometry.hpp"
#include "fraclap/kernel.hpp"
#include "fraclap/perturbation.hpp"
#include "fraclap/solver.hpp"

namespace fraclap {

/// Scalar expression over the coordinates: +, -, *, /, ^, sin, cos, exp,
/// the symbols x and y, numeric literals and parentheses.
class Expression {
public:
    Expression();
    static Expression parse(const std::string& text);  // throws std::invalid_argument
    double eval(double x, double y) const;
    const std::string& source() const { return source_; }

    struct Node;

private:
    std::shared_ptr<const Node> root_;
    std::string source_;
};

enum class InitMode { zero, random };

struct RunConfig {
    int dimension = 1;
    std::array<double, 2> box_min{0.0, 0.0};
    std::array<double, 2> box_max{1.0, 1.0};
    double h = 0.0;

    FractionalParams params;

    Shape omega = Shape::box1d(0.0, 1.0);
    std::optional<Shape> capacity_e;
    std::optional<Shape> capacity_d;   // defaults to all interior nodes
    std::optional<DomainSequenceSpec> sequence;  // base is `omega`

    Expression source;

    SolverOptions solver;
    InitMode init_mode = InitMode::zero;
    double decrease_factor = 0.2;
    double floor_fraction = 0.25;

    bool deterministic = false;
    std::uint64_t seed = 0;

    GridSpec make_grid() const;
    SourceTerm make_source(const GridSpec& grid) const;
};

struct ParseError {
    int line = 0;
    std::string message;
};

struct ParseResult {
    std::optional<RunConfig> config;
    std::vector<ParseError> errors;

    bool ok() const { return config.has_value() && errors.empty(); }
};

/// Line-based `key = value` format with `#` comments and [section] headers.
/// Unknown sections or keys are errors; all errors carry line numbers.
ParseResult parse_config(const std::string& text);

/// Canonical text form; parse(serialize(c)) reproduces c.
std::string serialize_config(const RunConfig& config);

}  // namespace fraclap
