#include "fraclap/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace fraclap {

void FractionalParams::validate() const {
    if (!(s >= 0.05 && s <= 0.95))
        throw std::invalid_argument("params: s must lie in [0.05, 0.95]");
    if (!(p >= 1.1 && p <= 10.0))
        throw std::invalid_argument("params: p must lie in [1.1, 10]");
    if (quadrature_order < 1)
        throw std::invalid_argument("params: quadrature_order must be >= 1");
}

DiscreteField DiscreteField::zero(const DomainMask& support) {
    return DiscreteField{support, std::vector<double>(support.grid.node_count(), 0.0)};
}

DiscreteField DiscreteField::projected(const DomainMask& support, std::vector<double> raw) {
    if (static_cast<int>(raw.size()) != support.grid.node_count())
        throw std::invalid_argument("DiscreteField: value count != node count");
    for (std::size_t i = 0; i < raw.size(); ++i)
        if (!support.inside[i]) raw[i] = 0.0;
    return DiscreteField{support, std::move(raw)};
}

DiscreteField field_difference(const DiscreteField& u, const DiscreteField& v) {
    DomainMask sup = set_union(u.support, v.support);
    std::vector<double> vals(sup.inside.size());
    for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = u.values[i] - v.values[i];
    return DiscreteField::projected(sup, std::move(vals));
}

SourceTerm SourceTerm::constant(const GridSpec& grid, double value) {
    return SourceTerm{grid, std::vector<double>(grid.node_count(), value)};
}

double phi_p(double t, double p) {
    if (t == 0.0) return 0.0;  // continuous extension for p < 2
    return std::copysign(std::pow(std::abs(t), p - 1.0), t);
}

double kernel_weight(int i, int j, const GridSpec& grid, const FractionalParams& params) {
    if (i == j) throw std::invalid_argument("kernel_weight: i == j");
    double r = grid.distance(i, j);
    double n = grid.dimension;
    double h2n = std::pow(grid.h, 2.0 * n);
    return h2n / std::pow(r, n + params.s * params.p);
}

namespace {

// Distance from x (inside the box) to the box boundary along direction theta.
double ray_to_box(const GridSpec& g, std::array<double, 2> x, double theta) {
    double c = std::cos(theta), s = std::sin(theta);
    double r = std::numeric_limits<double>::infinity();
    if (c > 1e-15) r = std::min(r, (g.box_max[0] - x[0]) / c);
    if (c < -1e-15) r = std::min(r, (g.box_min[0] - x[0]) / c);
    if (s > 1e-15) r = std::min(r, (g.box_max[1] - x[1]) / s);
    if (s < -1e-15) r = std::min(r, (g.box_min[1] - x[1]) / s);
    return r;
}

}  // namespace

ExteriorWeights exterior_weights(const GridSpec& grid, const FractionalParams& params,
                                 int quadrature_order) {
    params.validate();
    if (quadrature_order < 1)
        throw std::invalid_argument("exterior_weights: quadrature_order must be >= 1");
    double sp = params.s * params.p;
    double clamp = grid.h / 2.0;
    ExteriorWeights w{grid, std::vector<double>(grid.node_count(), 0.0)};

    if (grid.dimension == 1) {
        for (int i = 0; i < grid.node_count(); ++i) {
            double x = grid.coord(0, grid.ix(i));
            double dl = std::max(x - grid.box_min[0], clamp);
            double dr = std::max(grid.box_max[0] - x, clamp);
            w.t[i] = (2.0 / sp) * (std::pow(dl, -sp) + std::pow(dr, -sp));
        }
        return w;
    }

    for (int i = 0; i < grid.node_count(); ++i) {
        auto x = grid.position(i);
        // Corner angles split [0, 2pi) into four arcs on which the nearest
        // box side does not change, so the integrand is smooth per arc.
        std::array<double, 4> corners = {
            std::atan2(grid.box_min[1] - x[1], grid.box_min[0] - x[0]),
            std::atan2(grid.box_min[1] - x[1], grid.box_max[0] - x[0]),
            std::atan2(grid.box_max[1] - x[1], grid.box_min[0] - x[0]),
            std::atan2(grid.box_max[1] - x[1], grid.box_max[0] - x[0])};
        std::sort(corners.begin(), corners.end());

        double integral = 0.0;
        int intervals = 8 * quadrature_order;  // composite Simpson per arc
        for (int a = 0; a < 4; ++a) {
            double t0 = corners[a];
            double t1 = (a == 3) ? corners[0] + 2.0 * M_PI : corners[a + 1];
            if (t1 - t0 < 1e-14) continue;
            double dt = (t1 - t0) / (2 * intervals);
            double acc = 0.0;
            for (int m = 0; m <= 2 * intervals; ++m) {
                double theta = t0 + m * dt;
                double R = std::max(ray_to_box(grid, x, theta), clamp);
                double f = std::pow(R, -sp) / sp;
                double coeff = (m == 0 || m == 2 * intervals) ? 1.0 : (m % 2 ? 4.0 : 2.0);
                acc += coeff * f;
            }
            integral += acc * dt / 3.0;
        }
        w.t[i] = 2.0 * integral;
    }
    return w;
}

NonlocalKernel::NonlocalKernel(GridSpec grid, FractionalParams params)
    : grid_(std::move(grid)), params_(params) {
    params_.validate();
    hn_ = grid_.cell_measure();
    use_tails_ = params_.tail_mode == TailMode::analytic;
    tails_ = exterior_weights(grid_, params_, params_.quadrature_order);

    int nx = grid_.nodes[0], ny = grid_.nodes[1];
    double n = grid_.dimension;
    double sp = params_.s * params_.p;
    double h2n = std::pow(grid_.h, 2.0 * n);
    table_.assign(static_cast<std::size_t>(nx) * ny, 0.0);
    for (int dx = 0; dx < nx; ++dx)
        for (int dy = 0; dy < ny; ++dy) {
            if (dx == 0 && dy == 0) continue;
            double r = grid_.h * std::sqrt(double(dx) * dx + double(dy) * dy);
            table_[static_cast<std::size_t>(dx) * ny + dy] = h2n / std::pow(r, n + sp);
        }
}

double NonlocalKernel::weight(int i, int j) const {
    if (i == j) throw std::invalid_argument("NonlocalKernel::weight: i == j");
    int dx = std::abs(grid_.ix(i) - grid_.ix(j));
    int dy = std::abs(grid_.iy(i) - grid_.iy(j));
    return displacement_weight(dx, dy);
}

namespace {

std::vector<int> support_list(const DomainMask& m) {
    std::vector<int> s;
    for (int i = 0; i < m.grid.node_count(); ++i)
        if (m.contains(i)) s.push_back(i);
    return s;
}

}  // namespace

double NonlocalKernel::gagliardo_p(const DiscreteField& u) const {
    const int N = grid_.node_count();
    const int ny = grid_.nodes[1];
    const double p = params_.p;
    const bool p2 = p == 2.0;
    double acc = 0.0;
    // Pairs with both nodes off support contribute nothing (u vanishes there);
    // a pair with exactly one support node appears twice in the ordered sum.
    for (int i : support_list(u.support)) {
        int ixi = grid_.ix(i), iyi = grid_.iy(i);
        double ui = u.values[i];
        double row = 0.0;
        for (int j = 0; j < N; ++j) {
            if (j == i) continue;
            double d = ui - u.values[j];
            double w = table_[static_cast<std::size_t>(std::abs(ixi - grid_.ix(j))) * ny +
                              std::abs(iyi - grid_.iy(j))];
            double term = w * (p2 ? d * d : std::pow(std::abs(d), p));
            row += u.support.contains(j) ? term : 2.0 * term;
        }
        acc += row;
        if (use_tails_) acc += hn_ * tails_.t[i] * (p2 ? ui * ui : std::pow(std::abs(ui), p));
    }
    return acc;
}

double NonlocalKernel::duality_pairing(const SourceTerm& f, const DiscreteField& u) const {
    if (!(f.grid == grid_) || !(u.grid() == grid_))
        throw std::invalid_argument("duality_pairing: grid mismatch");
    double acc = 0.0;
    for (int i = 0; i < grid_.node_count(); ++i) acc += f.density[i] * u.values[i];
    return hn_ * acc;
}

double NonlocalKernel::energy(const DiscreteField& u, const SourceTerm& f) const {
    return gagliardo_p(u) / params_.p - duality_pairing(f, u);
}

DiscreteField NonlocalKernel::energy_gradient(const DiscreteField& u,
                                              const SourceTerm& f) const {
    const int N = grid_.node_count();
    const int ny = grid_.nodes[1];
    const double p = params_.p;
    const bool p2 = p == 2.0;
    DiscreteField g = DiscreteField::zero(u.support);
    for (int i : support_list(u.support)) {
        int ixi = grid_.ix(i), iyi = grid_.iy(i);
        double ui = u.values[i];
        double acc = 0.0;
        for (int j = 0; j < N; ++j) {
            if (j == i) continue;
            double d = ui - u.values[j];
            double w = table_[static_cast<std::size_t>(std::abs(ixi - grid_.ix(j))) * ny +
                              std::abs(iyi - grid_.iy(j))];
            acc += w * (p2 ? d : phi_p(d, p));
        }
        double gi = 2.0 * acc - hn_ * f.density[i];
        if (use_tails_) gi += hn_ * tails_.t[i] * (p2 ? ui : phi_p(ui, p));
        g.values[i] = gi;
    }
    return g;
}

double NonlocalKernel::operator_pairing(const DiscreteField& u, const DiscreteField& v) const {
    if (!(u.grid() == grid_) || !(v.grid() == grid_))
        throw std::invalid_argument("operator_pairing: grid mismatch");
    const int N = grid_.node_count();
    const int ny = grid_.nodes[1];
    const double p = params_.p;
    const bool p2 = p == 2.0;
    DomainMask sup = set_union(u.support, v.support);
    double acc = 0.0;
    for (int i : support_list(sup)) {
        int ixi = grid_.ix(i), iyi = grid_.iy(i);
        double row = 0.0;
        for (int j = 0; j < N; ++j) {
            if (j == i) continue;
            double du = u.values[i] - u.values[j];
            double dv = v.values[i] - v.values[j];
            double w = table_[static_cast<std::size_t>(std::abs(ixi - grid_.ix(j))) * ny +
                              std::abs(iyi - grid_.iy(j))];
            double term = w * (p2 ? du : phi_p(du, p)) * dv;
            row += sup.contains(j) ? term : 2.0 * term;
        }
        acc += row;
        if (use_tails_)
            acc += hn_ * tails_.t[i] * (p2 ? u.values[i] : phi_p(u.values[i], p)) * v.values[i];
    }
    return acc;
}

double NonlocalKernel::lp_norm(const DiscreteField& u) const {
    const double p = params_.p;
    double acc = 0.0;
    for (double x : u.values) acc += std::pow(std::abs(x), p);
    return std::pow(hn_ * acc, 1.0 / p);
}

double NonlocalKernel::norm_sp(const DiscreteField& u) const {
    double lp = lp_norm(u);
    return std::pow(gagliardo_p(u) + std::pow(lp, params_.p), 1.0 / params_.p);
}

double NonlocalKernel::energy_identity_residual(const DiscreteField& u,
                                                const SourceTerm& f) const {
    double gp = gagliardo_p(u);
    return std::abs(gp - duality_pairing(f, u)) / std::max(1.0, gp);
}

DiscreteField random_field(const DomainMask& mask, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    DiscreteField u = DiscreteField::zero(mask);
    for (int i = 0; i < mask.grid.node_count(); ++i)
        if (mask.contains(i)) u.values[i] = normal(rng);
    return u;
}

namespace {

// Neighbour-averaging passes inside the mask. White noise barely excites the
// low modes that realize the Poincare constant; smoothing each sample pushes
// it toward them so the sampled maximum approaches the true sup.
DiscreteField smooth_in_mask(const DiscreteField& u, int passes) {
    DiscreteField v = u;
    const GridSpec& g = v.grid();
    for (int t = 0; t < passes; ++t) {
        DiscreteField w = v;
        for (int i = 0; i < g.node_count(); ++i) {
            if (!v.support.contains(i)) continue;
            double acc = v.values[i];
            int cnt = 1;
            int x = g.ix(i);
            if (x > 0) { acc += v.values[i - 1]; ++cnt; }
            if (x < g.nodes[0] - 1) { acc += v.values[i + 1]; ++cnt; }
            if (g.dimension == 2) {
                int y = g.iy(i);
                if (y > 0) { acc += v.values[i - g.nodes[0]]; ++cnt; }
                if (y < g.nodes[1] - 1) { acc += v.values[i + g.nodes[0]]; ++cnt; }
            }
            w.values[i] = acc / cnt;
        }
        v = std::move(w);
    }
    return v;
}

}  // namespace

double poincare_diagnostic(const NonlocalKernel& kernel, const DomainMask& mask,
                           int samples, std::uint64_t seed) {
    constexpr int kSmoothingPasses = 100;
    double worst = 0.0;
    for (int k = 0; k < samples; ++k) {
        DiscreteField u = smooth_in_mask(
            random_field(mask, seed + static_cast<std::uint64_t>(k)), kSmoothingPasses);
        double semi = std::pow(kernel.gagliardo_p(u), 1.0 / kernel.params().p);
        if (semi > 0.0) worst = std::max(worst, kernel.lp_norm(u) / semi);
    }
    return worst;
}

}  // namespace fraclap
