#pragma once

#include <cstdint>
#include <vector>

#include "fraclap/geometry.hpp"

namespace fraclap {

enum class TailMode { none, analytic };

/// Fractional exponents s in (0,1), p in (1,inf), with guard bands that keep
/// the discrete energy well conditioned.
struct FractionalParams {
    double s = 0.5;
    double p = 2.0;
    TailMode tail_mode = TailMode::analytic;
    int quadrature_order = 4;

    double p_conjugate() const { return p / (p - 1.0); }
    void validate() const;  // throws std::invalid_argument outside guard bands
};

/// Node-indexed function supported in a mask: values are zero at every node
/// outside `support` (the discrete W_0^{s,p} constraint).
struct DiscreteField {
    DomainMask support;
    std::vector<double> values;

    const GridSpec& grid() const { return support.grid; }

    static DiscreteField zero(const DomainMask& support);
    /// Copies `raw` and zeroes every node outside the support.
    static DiscreteField projected(const DomainMask& support, std::vector<double> raw);
};

/// u - v on the union of the two supports (both on one grid).
DiscreteField field_difference(const DiscreteField& u, const DiscreteField& v);

/// An L^{p'} density sampled at the nodes.
struct SourceTerm {
    GridSpec grid;
    std::vector<double> density;

    static SourceTerm constant(const GridSpec& grid, double value);
};

/// Per-node value of 2 * int_{R^n \ Box} |x_i - y|^{-(n+sp)} dy.
/// Closed form in 1D; angular quadrature over the four smooth arcs in 2D.
/// Distances to the box boundary are clamped below by h/2.
struct ExteriorWeights {
    GridSpec grid;
    std::vector<double> t;
};

ExteriorWeights exterior_weights(const GridSpec& grid, const FractionalParams& params,
                                 int quadrature_order);

/// Pair weight w_ij = h^{2n} / |x_i - x_j|^{n+sp}, i != j.
double kernel_weight(int i, int j, const GridSpec& grid, const FractionalParams& params);

/// phi_p(t) = |t|^{p-2} t, with phi_p(0) = 0 for every p.
double phi_p(double t, double p);

/// Discrete Gagliardo energy machinery for one (grid, params) pair.
/// Pair weights depend only on the index displacement, so they are tabulated
/// once; all reductions run in a fixed serial order and are deterministic.
class NonlocalKernel {
public:
    NonlocalKernel(GridSpec grid, FractionalParams params);

    const GridSpec& grid() const { return grid_; }
    const FractionalParams& params() const { return params_; }
    const ExteriorWeights& tails() const { return tails_; }

    double weight(int i, int j) const;

    /// [u]^p: sum_{i != j} w_ij |u_i - u_j|^p  (+ tail term when analytic).
    double gagliardo_p(const DiscreteField& u) const;

    /// <f, u> = sum_i h^n f_i u_i.
    double duality_pairing(const SourceTerm& f, const DiscreteField& u) const;

    /// J(u) = (1/p) [u]^p - <f, u>.
    double energy(const DiscreteField& u, const SourceTerm& f) const;

    /// Gradient of J restricted to support coordinates; zero off support.
    DiscreteField energy_gradient(const DiscreteField& u, const SourceTerm& f) const;

    /// <(-Delta_p)^s u, v>; equals gagliardo_p(u) at v = u.
    double operator_pairing(const DiscreteField& u, const DiscreteField& v) const;

    /// ||u||_p = (sum_i h^n |u_i|^p)^{1/p}.
    double lp_norm(const DiscreteField& u) const;

    /// ([u]^p + ||u||_p^p)^{1/p}.
    double norm_sp(const DiscreteField& u) const;

    /// |[u]^p - <f,u>| / max(1, [u]^p), the weak-form residual at u.
    double energy_identity_residual(const DiscreteField& u, const SourceTerm& f) const;

private:
    double displacement_weight(int dx, int dy) const { return table_[dx * grid_.nodes[1] + dy]; }

    GridSpec grid_;
    FractionalParams params_;
    ExteriorWeights tails_;
    std::vector<double> table_;  // weight by |index displacement|
    double hn_ = 0.0;
    bool use_tails_ = false;
};

/// Max of ||u||_p / [u]_{s,p} over `samples` Gaussian random fields supported
/// in `mask`; the empirical constant of the discrete Poincare inequality.
double poincare_diagnostic(const NonlocalKernel& kernel, const DomainMask& mask,
                           int samples, std::uint64_t seed);

/// Gaussian random field supported in `mask` (unit variance per node).
DiscreteField random_field(const DomainMask& mask, std::uint64_t seed);

}  // namespace fraclap
