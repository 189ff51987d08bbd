#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace fraclap {

/// Regular grid over the bounding box D in R^n, n in {1,2}.
/// Node coordinates along axis a are box_min[a] + i*h, i = 0 .. nodes[a]-1.
struct GridSpec {
    int dimension = 1;
    std::array<double, 2> box_min{0.0, 0.0};
    std::array<double, 2> box_max{0.0, 0.0};
    double h = 0.0;
    std::array<int, 2> nodes{0, 1};  // nodes[1] == 1 in 1D

    int node_count() const { return nodes[0] * nodes[1]; }
    double coord(int axis, int i) const { return box_min[axis] + i * h; }

    int index(int ix, int iy = 0) const { return ix + nodes[0] * iy; }
    int ix(int idx) const { return idx % nodes[0]; }
    int iy(int idx) const { return idx / nodes[0]; }

    std::array<double, 2> position(int idx) const {
        return {coord(0, ix(idx)), dimension == 2 ? coord(1, iy(idx)) : 0.0};
    }

    /// Nodes on the outermost index layer of D. Masks never contain them,
    /// which encodes u = 0 on the boundary of D at the discrete level.
    bool is_boundary_layer(int idx) const {
        int x = ix(idx);
        if (x == 0 || x == nodes[0] - 1) return true;
        if (dimension == 2) {
            int y = iy(idx);
            if (y == 0 || y == nodes[1] - 1) return true;
        }
        return false;
    }

    double distance(int i, int j) const;
    /// h^n, the per-node quadrature weight.
    double cell_measure() const;

    bool operator==(const GridSpec&) const = default;
};

inline constexpr int kDefaultNodeCap = 1 << 20;

GridSpec build_grid(int dimension, std::array<double, 2> box_min,
                    std::array<double, 2> box_max, double h,
                    int node_cap = kDefaultNodeCap);

/// Convenience for 1D.
GridSpec build_grid(int dimension, double box_min, double box_max, double h,
                    int node_cap = kDefaultNodeCap);

/// Geometric primitive for describing open sets: box corners and balls,
/// closed under difference and union. Membership is strict (interior only).
class Shape {
public:
    enum class Kind { box, ball, difference, set_union };

    static Shape box(std::array<double, 2> lo, std::array<double, 2> hi);
    static Shape box1d(double lo, double hi);
    static Shape ball(std::array<double, 2> center, double radius);
    static Shape ball1d(double center, double radius);
    static Shape difference(Shape a, Shape b);
    static Shape set_union(Shape a, Shape b);

    Kind kind() const { return kind_; }
    bool contains(std::array<double, 2> x, int dimension) const;

    std::array<double, 2> lo() const { return a_; }
    std::array<double, 2> hi() const { return b_; }
    std::array<double, 2> center() const { return a_; }
    double radius() const { return r_; }
    const Shape& left() const { return *left_; }
    const Shape& right() const { return *right_; }

    std::string to_string(int dimension) const;

private:
    Kind kind_ = Kind::box;
    std::array<double, 2> a_{0.0, 0.0};
    std::array<double, 2> b_{0.0, 0.0};
    double r_ = 0.0;
    std::shared_ptr<const Shape> left_;
    std::shared_ptr<const Shape> right_;
};

/// Node-indexed boolean subset of D. Every true node lies strictly inside
/// the box (boundary-layer nodes are always false).
struct DomainMask {
    GridSpec grid;
    std::vector<std::uint8_t> inside;

    bool contains(int idx) const { return inside[idx] != 0; }
    int count() const;
    bool empty() const { return count() == 0; }

    /// All non-boundary-layer nodes of the box.
    static DomainMask interior(const GridSpec& grid);
    static DomainMask empty_mask(const GridSpec& grid);
};

DomainMask rasterize(const GridSpec& grid, const Shape& shape);

DomainMask set_minus(const DomainMask& a, const DomainMask& b);
DomainMask set_union(const DomainMask& a, const DomainMask& b);
DomainMask set_intersection(const DomainMask& a, const DomainMask& b);
DomainMask symmetric_difference(const DomainMask& a, const DomainMask& b);
bool is_subset(const DomainMask& a, const DomainMask& b);

/// d^H(A, B) = Hausdorff distance between the node complements D\A and D\B.
/// Complements include the boundary layer, so they are never empty.
double hausdorff_complementary_distance(const DomainMask& a, const DomainMask& b);

enum class SequenceKind { shrinking_hole, boundary_oscillation, periodic_perforation };

/// Describes a sequence Omega_1, ..., Omega_K approximating a limit Omega.
///
/// shrinking_hole:       Omega_k = Omega  union  ball(center, r_k); the base
///                       shape is expected to carry a hole at `center`, so the
///                       added ball partially refills it and Omega_k \ Omega
///                       shrinks with r_k. Balls with r_k < h rasterize away.
/// boundary_oscillation: Omega_k = Omega plus an oscillating dilation layer of
///                       amplitude a_k; Omega_k contains Omega.
/// periodic_perforation: Omega_k = Omega minus a lattice of balls with the
///                       step's radius and spacing; here Omega_k is a subset
///                       of Omega (the no-convergence diagnostic).
struct DomainSequenceSpec {
    SequenceKind kind = SequenceKind::shrinking_hole;
    Shape base = Shape::box1d(0.0, 1.0);
    std::array<double, 2> center{0.5, 0.5};
    std::vector<double> radii;                  // shrinking_hole
    std::vector<double> amplitudes;             // boundary_oscillation
    std::vector<double> perforation_radii;      // periodic_perforation
    std::vector<double> perforation_spacings;   // periodic_perforation
    int steps = 0;

    void validate() const;  // throws std::invalid_argument
};

struct DomainSequence {
    std::vector<DomainMask> step_masks;  // length K
    DomainMask limit;                    // Omega
};

DomainSequence generate_sequence(const DomainSequenceSpec& spec, const GridSpec& grid);

}  // namespace fraclap
