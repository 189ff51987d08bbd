#pragma once

#include <string>

#include "fraclap/capacity.hpp"
#include "fraclap/geometry.hpp"
#include "fraclap/kernel.hpp"
#include "fraclap/solver.hpp"

namespace fraclap {

/// Numbers in all CSV output use 12 significant decimal digits.
std::string format_value(double x);

/// CSV columns: node,x[,y],inside.
std::string mask_csv(const DomainMask& mask);

/// CSV columns: node,x[,y],inside,u.
std::string field_csv(const DiscreteField& field);

std::string solve_summary(const SolveReport& report);
std::string capacity_summary(const CapacityReport& report);

/// Writes `content` to `path`, creating parent directories.
/// Throws std::runtime_error on I/O failure.
void write_file(const std::string& path, const std::string& content);

}  // namespace fraclap
