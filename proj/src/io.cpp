#include "fraclap/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fraclap {

std::string format_value(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

namespace {

void csv_header(std::ostringstream& os, const GridSpec& grid) {
    os << "node,x";
    if (grid.dimension == 2) os << ",y";
    os << ",inside";
}

void csv_row_prefix(std::ostringstream& os, const GridSpec& grid, int i, bool inside) {
    auto xy = grid.position(i);
    os << i << ',' << format_value(xy[0]);
    if (grid.dimension == 2) os << ',' << format_value(xy[1]);
    os << ',' << (inside ? 1 : 0);
}

}  // namespace

std::string mask_csv(const DomainMask& mask) {
    std::ostringstream os;
    csv_header(os, mask.grid);
    os << '\n';
    for (int i = 0; i < mask.grid.node_count(); ++i) {
        csv_row_prefix(os, mask.grid, i, mask.contains(i));
        os << '\n';
    }
    return os.str();
}

std::string field_csv(const DiscreteField& field) {
    std::ostringstream os;
    csv_header(os, field.grid());
    os << ",u\n";
    for (int i = 0; i < field.grid().node_count(); ++i) {
        csv_row_prefix(os, field.grid(), i, field.support.contains(i));
        os << ',' << format_value(field.values[i]) << '\n';
    }
    return os.str();
}

std::string solve_summary(const SolveReport& report) {
    std::ostringstream os;
    os << "status: "
       << (report.status == SolveStatus::converged ? "converged" : "iteration_limit") << '\n';
    os << "final_energy: " << format_value(report.final_energy) << '\n';
    os << "iterations: " << report.iterations << '\n';
    os << "final_gradient_norm: " << format_value(report.final_gradient_norm) << '\n';
    os << "energy_identity_residual: " << format_value(report.energy_identity_residual)
       << '\n';
    os << "norm_sp: " << format_value(report.norm_sp) << '\n';
    return os.str();
}

std::string capacity_summary(const CapacityReport& report) {
    std::ostringstream os;
    os << "status: "
       << (report.status == SolveStatus::converged ? "converged" : "iteration_limit") << '\n';
    os << "value: " << format_value(report.value) << '\n';
    os << "iterations: " << report.iterations << '\n';
    os << "final_gradient_norm: " << format_value(report.final_gradient_norm) << '\n';
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::filesystem::path p(path);
    std::error_code ec;
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path(), ec);
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace fraclap
