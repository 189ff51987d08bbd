#include "fraclap/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace fraclap {

double GridSpec::distance(int i, int j) const {
    double dx = (ix(i) - ix(j)) * h;
    if (dimension == 1) return std::abs(dx);
    double dy = (iy(i) - iy(j)) * h;
    return std::hypot(dx, dy);
}

double GridSpec::cell_measure() const {
    return dimension == 2 ? h * h : h;
}

GridSpec build_grid(int dimension, std::array<double, 2> box_min,
                    std::array<double, 2> box_max, double h, int node_cap) {
    if (dimension != 1 && dimension != 2)
        throw std::invalid_argument("build_grid: dimension must be 1 or 2");
    if (!(h > 0.0))
        throw std::invalid_argument("build_grid: grid spacing h must be positive");

    GridSpec g;
    g.dimension = dimension;
    g.box_min = box_min;
    g.box_max = box_max;
    g.h = h;
    g.nodes = {0, 1};
    long total = 1;
    for (int a = 0; a < dimension; ++a) {
        double len = box_max[a] - box_min[a];
        if (!(len > 0.0))
            throw std::invalid_argument("build_grid: degenerate box (box_max <= box_min)");
        // small relative slack so that e.g. (1-0)/0.25 lands on 4, not 3
        int n = static_cast<int>(std::floor(len / h * (1.0 + 1e-12))) + 1;
        g.nodes[a] = n;
        total *= n;
    }
    if (total < 2)
        throw std::invalid_argument("build_grid: fewer than 2 nodes; shrink h");
    if (total > node_cap)
        throw std::invalid_argument("build_grid: node cap exceeded");
    return g;
}

GridSpec build_grid(int dimension, double box_min, double box_max, double h,
                    int node_cap) {
    return build_grid(dimension, {box_min, 0.0}, {box_max, 0.0}, h, node_cap);
}

Shape Shape::box(std::array<double, 2> lo, std::array<double, 2> hi) {
    Shape s;
    s.kind_ = Kind::box;
    s.a_ = lo;
    s.b_ = hi;
    for (int a = 0; a < 2; ++a)
        if (s.a_[a] > s.b_[a]) std::swap(s.a_[a], s.b_[a]);
    return s;
}

Shape Shape::box1d(double lo, double hi) { return box({lo, 0.0}, {hi, 0.0}); }

Shape Shape::ball(std::array<double, 2> center, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("Shape::ball: radius must be positive");
    Shape s;
    s.kind_ = Kind::ball;
    s.a_ = center;
    s.r_ = radius;
    return s;
}

Shape Shape::ball1d(double center, double radius) { return ball({center, 0.0}, radius); }

Shape Shape::difference(Shape a, Shape b) {
    Shape s;
    s.kind_ = Kind::difference;
    s.left_ = std::make_shared<Shape>(std::move(a));
    s.right_ = std::make_shared<Shape>(std::move(b));
    return s;
}

Shape Shape::set_union(Shape a, Shape b) {
    Shape s;
    s.kind_ = Kind::set_union;
    s.left_ = std::make_shared<Shape>(std::move(a));
    s.right_ = std::make_shared<Shape>(std::move(b));
    return s;
}

bool Shape::contains(std::array<double, 2> x, int dimension) const {
    switch (kind_) {
        case Kind::box:
            for (int a = 0; a < dimension; ++a)
                if (!(x[a] > a_[a] && x[a] < b_[a])) return false;
            return true;
        case Kind::ball: {
            double d2 = 0.0;
            for (int a = 0; a < dimension; ++a) {
                double d = x[a] - a_[a];
                d2 += d * d;
            }
            return d2 < r_ * r_;  // strict: ties at the radius are outside
        }
        case Kind::difference:
            return left_->contains(x, dimension) && !right_->contains(x, dimension);
        case Kind::set_union:
            return left_->contains(x, dimension) || right_->contains(x, dimension);
    }
    return false;
}

std::string Shape::to_string(int dimension) const {
    std::ostringstream os;
    os.precision(17);
    switch (kind_) {
        case Kind::box:
            os << "box(" << a_[0];
            if (dimension == 2) os << ", " << a_[1];
            os << ", " << b_[0];
            if (dimension == 2) os << ", " << b_[1];
            os << ")";
            break;
        case Kind::ball:
            os << "ball(" << a_[0];
            if (dimension == 2) os << ", " << a_[1];
            os << ", " << r_ << ")";
            break;
        case Kind::difference:
            os << "difference(" << left_->to_string(dimension) << ", "
               << right_->to_string(dimension) << ")";
            break;
        case Kind::set_union:
            os << "union(" << left_->to_string(dimension) << ", "
               << right_->to_string(dimension) << ")";
            break;
    }
    return os.str();
}

int DomainMask::count() const {
    return static_cast<int>(std::count(inside.begin(), inside.end(), std::uint8_t{1}));
}

DomainMask DomainMask::interior(const GridSpec& grid) {
    DomainMask m{grid, std::vector<std::uint8_t>(grid.node_count(), 0)};
    for (int i = 0; i < grid.node_count(); ++i)
        m.inside[i] = grid.is_boundary_layer(i) ? 0 : 1;
    return m;
}

DomainMask DomainMask::empty_mask(const GridSpec& grid) {
    return DomainMask{grid, std::vector<std::uint8_t>(grid.node_count(), 0)};
}

DomainMask rasterize(const GridSpec& grid, const Shape& shape) {
    DomainMask m = DomainMask::empty_mask(grid);
    int hits = 0;
    for (int i = 0; i < grid.node_count(); ++i) {
        if (grid.is_boundary_layer(i)) continue;
        if (shape.contains(grid.position(i), grid.dimension)) {
            m.inside[i] = 1;
            ++hits;
        }
    }
    if (hits == 0)
        throw std::invalid_argument("rasterize: shape does not cover any interior node");
    return m;
}

namespace {

void require_same_grid(const DomainMask& a, const DomainMask& b, const char* op) {
    if (!(a.grid == b.grid))
        throw std::invalid_argument(std::string(op) + ": masks live on different grids");
}

}  // namespace

DomainMask set_minus(const DomainMask& a, const DomainMask& b) {
    require_same_grid(a, b, "set_minus");
    DomainMask r = a;
    for (std::size_t i = 0; i < r.inside.size(); ++i)
        r.inside[i] = static_cast<std::uint8_t>(a.inside[i] && !b.inside[i]);
    return r;
}

DomainMask set_union(const DomainMask& a, const DomainMask& b) {
    require_same_grid(a, b, "set_union");
    DomainMask r = a;
    for (std::size_t i = 0; i < r.inside.size(); ++i)
        r.inside[i] = static_cast<std::uint8_t>(a.inside[i] || b.inside[i]);
    return r;
}

DomainMask set_intersection(const DomainMask& a, const DomainMask& b) {
    require_same_grid(a, b, "set_intersection");
    DomainMask r = a;
    for (std::size_t i = 0; i < r.inside.size(); ++i)
        r.inside[i] = static_cast<std::uint8_t>(a.inside[i] && b.inside[i]);
    return r;
}

DomainMask symmetric_difference(const DomainMask& a, const DomainMask& b) {
    require_same_grid(a, b, "symmetric_difference");
    DomainMask r = a;
    for (std::size_t i = 0; i < r.inside.size(); ++i)
        r.inside[i] = static_cast<std::uint8_t>(!a.inside[i] != !b.inside[i]);
    return r;
}

bool is_subset(const DomainMask& a, const DomainMask& b) {
    require_same_grid(a, b, "is_subset");
    for (std::size_t i = 0; i < a.inside.size(); ++i)
        if (a.inside[i] && !b.inside[i]) return false;
    return true;
}

namespace {

// sup over nodes of `from` of the distance to the nearest node of `to`.
double directed_distance(const GridSpec& grid, const std::vector<int>& from,
                         const std::vector<int>& to) {
    double sup = 0.0;
    for (int i : from) {
        double inf = std::numeric_limits<double>::infinity();
        for (int j : to) inf = std::min(inf, grid.distance(i, j));
        sup = std::max(sup, inf);
    }
    return sup;
}

}  // namespace

double hausdorff_complementary_distance(const DomainMask& a, const DomainMask& b) {
    require_same_grid(a, b, "hausdorff_complementary_distance");
    std::vector<int> ca, cb;
    for (int i = 0; i < a.grid.node_count(); ++i) {
        if (!a.contains(i)) ca.push_back(i);
        if (!b.contains(i)) cb.push_back(i);
    }
    return std::max(directed_distance(a.grid, ca, cb), directed_distance(a.grid, cb, ca));
}

void DomainSequenceSpec::validate() const {
    if (steps < 0) throw std::invalid_argument("sequence: steps must be >= 0");
    auto check_positive = [](const std::vector<double>& v, const char* name) {
        for (double x : v)
            if (!(x > 0.0))
                throw std::invalid_argument(std::string("sequence: ") + name +
                                            " entries must be positive");
    };
    switch (kind) {
        case SequenceKind::shrinking_hole:
            if (static_cast<int>(radii.size()) != steps)
                throw std::invalid_argument("sequence: radii schedule length != steps");
            check_positive(radii, "radii");
            for (std::size_t k = 1; k < radii.size(); ++k)
                if (!(radii[k] < radii[k - 1]))
                    throw std::invalid_argument("sequence: shrinking_hole radii must decrease");
            break;
        case SequenceKind::boundary_oscillation:
            if (static_cast<int>(amplitudes.size()) != steps)
                throw std::invalid_argument("sequence: amplitudes schedule length != steps");
            check_positive(amplitudes, "amplitudes");
            break;
        case SequenceKind::periodic_perforation:
            if (static_cast<int>(perforation_radii.size()) != steps ||
                static_cast<int>(perforation_spacings.size()) != steps)
                throw std::invalid_argument(
                    "sequence: perforation radius/spacing schedule length != steps");
            check_positive(perforation_radii, "perforation radii");
            check_positive(perforation_spacings, "perforation spacings");
            break;
    }
}

namespace {

// Nodes strictly inside ball(center, r), excluding the boundary layer.
// Features below the grid resolution rasterize away by construction.
DomainMask ball_nodes(const GridSpec& grid, std::array<double, 2> center, double r) {
    DomainMask m = DomainMask::empty_mask(grid);
    if (r < grid.h) return m;  // sub-grid feature
    for (int i = 0; i < grid.node_count(); ++i) {
        if (grid.is_boundary_layer(i)) continue;
        auto x = grid.position(i);
        double d2 = 0.0;
        for (int a = 0; a < grid.dimension; ++a) {
            double d = x[a] - center[a];
            d2 += d * d;
        }
        if (d2 < r * r) m.inside[i] = 1;
    }
    return m;
}

// Smooth positive modulation of the oscillation amplitude along the boundary.
double oscillation_profile(std::array<double, 2> x) {
    return 0.5 * (1.0 + std::sin(6.0 * (x[0] + x[1])));
}

DomainMask oscillation_layer(const GridSpec& grid, const DomainMask& omega,
                             double amplitude) {
    std::vector<int> core;
    for (int i = 0; i < grid.node_count(); ++i)
        if (omega.contains(i)) core.push_back(i);
    DomainMask layer = DomainMask::empty_mask(grid);
    for (int i = 0; i < grid.node_count(); ++i) {
        if (omega.contains(i) || grid.is_boundary_layer(i)) continue;
        double d = std::numeric_limits<double>::infinity();
        for (int j : core) d = std::min(d, grid.distance(i, j));
        if (d <= amplitude * oscillation_profile(grid.position(i)))
            layer.inside[i] = 1;
    }
    return layer;
}

DomainMask perforation_holes(const GridSpec& grid, double radius, double spacing) {
    DomainMask holes = DomainMask::empty_mask(grid);
    for (int a = 0;; ++a) {
        double cx = grid.box_min[0] + (a + 0.5) * spacing;
        if (cx >= grid.box_max[0]) break;
        if (grid.dimension == 1) {
            holes = set_union(holes, ball_nodes(grid, {cx, 0.0}, radius));
        } else {
            for (int b = 0;; ++b) {
                double cy = grid.box_min[1] + (b + 0.5) * spacing;
                if (cy >= grid.box_max[1]) break;
                holes = set_union(holes, ball_nodes(grid, {cx, cy}, radius));
            }
        }
    }
    return holes;
}

}  // namespace

DomainSequence generate_sequence(const DomainSequenceSpec& spec, const GridSpec& grid) {
    spec.validate();
    DomainSequence seq;
    seq.limit = rasterize(grid, spec.base);
    seq.step_masks.reserve(spec.steps);
    for (int k = 0; k < spec.steps; ++k) {
        switch (spec.kind) {
            case SequenceKind::shrinking_hole: {
                double r = spec.radii[k];
                DomainMask hole = ball_nodes(grid, spec.center, r);
                if (r >= grid.h && hole.empty())
                    throw std::invalid_argument(
                        "generate_sequence: hole center outside the grid interior "
                        "(unresolvable schedule)");
                seq.step_masks.push_back(set_union(seq.limit, hole));
                break;
            }
            case SequenceKind::boundary_oscillation:
                seq.step_masks.push_back(set_union(
                    seq.limit, oscillation_layer(grid, seq.limit, spec.amplitudes[k])));
                break;
            case SequenceKind::periodic_perforation: {
                DomainMask holes =
                    perforation_holes(grid, spec.perforation_radii[k],
                                      spec.perforation_spacings[k]);
                if (spec.perforation_radii[k] >= grid.h && holes.empty())
                    throw std::invalid_argument(
                        "generate_sequence: perforation lattice misses the grid "
                        "(unresolvable schedule)");
                seq.step_masks.push_back(set_minus(seq.limit, holes));
                break;
            }
        }
    }
    return seq;
}

}  // namespace fraclap
