// Three-dimensional Weyl geometry: the compatible torsion-free connection of
// a (metric, one-form) pair, Einstein-Weyl residuals, the quotient of a 4D
// anti-self-dual metric by a Killing symmetry realized on a section of the
// orbit space, abelian monopoles, the symmetry criterion for Weyl structures,
// and the discriminant metric recovered from invariant curve coordinates.

#pragma once

#include "tg/curvature.hpp"

namespace tg {

struct WeylStructure {
    Chart chart;        // 3D
    MetricField h;
    TensorField omega;  // one-form, variance "l"
};

// Gamma^i_{jk} = LC(h)^i_{jk} - 1/2 (omega_j d^i_k + omega_k d^i_j - h_jk omega^i),
// the unique torsion-free connection with D h = omega (x) h.
JTensor weyl_connection_at(const WeylStructure& ws, const Point& p, int order);
// |D h - omega (x) h| at p (should vanish identically; sanity check).
double weyl_compat_residual(const WeylStructure& ws, const Point& p);
// Norm of the trace-free part of the symmetrized Ricci of the Weyl
// connection, relative to |Ric|. Near 0 certifies Einstein-Weyl.
double ew_residual(const WeylStructure& ws, const Point& p);

// A Killing reduction realized concretely: three invariant functions u^i on
// the 4D chart with K(u^i) = 0, and a section target -> source of the orbit
// projection with coords(section(u)) = u.
struct InvariantChart {
    Chart source;                      // 4D
    TensorField k;                     // Killing vector, variance "u"
    std::vector<ScalarField> coords;   // u^i on the source (3 fields)
    std::vector<ScalarField> section;  // target point -> source point (4 fields)
    Chart target;                      // 3D chart in the u^i
};
// max_i |K(u^i)| at a source point (invariance certificate).
double invariant_coords_residual(const InvariantChart& ic, const Point& p4);

// h = |K|^{-2} g - |K|^{-4} K (x) K, omega = (2/|K|^2) star(K ^ dK), expressed
// in the invariant coordinates by pulling back through the section. The 4D
// star orientation is a per-example choice (the opposite one flips omega's
// sign); 0 means "use g4.orientation". Throws on |K|^2 below 1e-8 at a sample.
WeylStructure jones_tod_reduce(const MetricField& g4, const InvariantChart& ic,
                               int star_orientation = 0);

// Pointwise fit of rho^2 from the h-ratio plus the omega gauge term check:
// h1 = rho^2 h2 and omega1 = omega2 + 2 d ln rho within tol at every point.
struct GaugeReport {
    bool verdict = false;
    double conf_misfit = 0;   // max over points of trace-free misfit of h1 - rho^2 h2
    double omega_misfit = 0;  // max over points of |omega1 - omega2 - 2 d ln rho|
    std::vector<double> rho2;
};
GaugeReport gauge_equivalent(const WeylStructure& a, const WeylStructure& b,
                             const std::vector<Point>& pts, double tol = 1e-8);

// |dV + 1/2 omega V - star_h d alpha| at p.
double monopole_residual(const WeylStructure& ws, const ScalarField& V,
                         const TensorField& alpha, const Point& p);

// L_K h = f h (f fitted from the trace), L_K omega = (1/N) d[K . d ln det h].
struct SymmetryReport {
    double res_h = 0;      // trace-free misfit of L_K h - f h, relative to |h|
    double res_omega = 0;  // |L_K omega - (1/N) d[K . d ln det h]|
    double f = 0;
};
SymmetryReport ew_symmetry_residual(const WeylStructure& ws, const TensorField& K,
                                    const Point& p);

// The conformal structure of the model reduction with parameter a, read off
// the invariant curves on the (u, v, t) chart: the normal components of the
// curve deformation are a cubic in the curve parameter with an exact root at
// -v/t, and the quadratic cofactor A l^2 + B l + C yields the discriminant
// B (.) B - 4 A (.) C. Returns a symmetric rank-2 tensor, scaled so the du^2
// coefficient is -t^2. Conformal to the Jones-Tod quotient of the model.
JTensor discriminant_h(double a, const Point& p, int order);

// The reference quotient pair of the x-translation reduction of the
// normal-form Einstein metric, on the chart (p, q, y); A, B are fields of y
// (slot 2).
WeylStructure translation_reduction_pair(ScalarField A, ScalarField B);
// The reference quotient pair of the cubic-structure reduction, chart
// (u, v, w): h = -du^2/u - 2w du dv - w(w^2+u-5w+4) dv^2 + 4(u-w+4) dv dw with
// omega = (du - 3w dv - 4 dw)/(u-w+4).
WeylStructure cubic_reduction_pair();

struct EwError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace tg
