// Dispersionless Toda solutions in three dimensions: the PDE residual
// U_XX + U_YY = eps (e^U)_ZZ, implicit polynomial solution branches with
// derivative jets, parametric solution families, the associated Weyl
// structure, and the extraction pipeline on a four-manifold with symmetry
// (conformal factor, parallel two-form, moment map, normal-form check).

#pragma once

#include "tg/einstein_weyl.hpp"

namespace tg {

// |U_XX + U_YY - eps (e^U)_ZZ| / (1 + |U_XX| + |U_YY| + |(e^U)_ZZ|) for a
// scalar U of (X, Y, Z).
double toda_residual(const ScalarField& U, double epsilon, const Point& p);

// One branch of an implicit relation poly(w, X, Y, Z) = 0, with w standing
// for e^U. The polynomial is evaluated through jets, so it may be any ring
// expression of the four arguments (degree <= kMaxOrder in w).
struct ImplicitTodaSolution {
    std::function<Jet(const std::vector<Jet>&)> poly;  // args (w, X, Y, Z)
    double epsilon = 1.0;
    Chart box;            // 3D region where the branch is tracked
    Point seed;           // reference point inside the box
    double seed_w = 1.0;  // approximate branch value at the seed (polished)
};

// U = log w at p as a jet of the given order in (X, Y, Z). The root w is
// selected by continuation along the straight line from the seed; the walk
// monitors root separation (>= 1e-8) and regularity, and the final root must
// be positive. Derivatives come from implicit differentiation through jets.
Jet implicit_eval(const ImplicitTodaSolution& sol, const Point& p, int order);
// Scalar-field view of the branch (each evaluation re-runs the continuation).
ScalarField implicit_field(const ImplicitTodaSolution& sol);

// A solution given by maps (X, Y, Z, U) over an auxiliary parameter chart.
struct ParametricTodaSolution {
    Chart params;            // 3D
    ScalarField x, y, z, u;  // functions of the parameters
};
// Toda residual transported to (X, Y, Z) by inverting the parametrization's
// Jacobian on second-order jets. Throws on a singular Jacobian.
double parametric_residual(const ParametricTodaSolution& sol, double epsilon,
                           const Point& t);

// The two-function family on the parameter chart (y, p, Z):
//   X = -8 E Z^3 p / D^2,  Y = I2 + E (8 Z^2 - 2 Z^4 p^2) / D^2,
//   U = ln(D^3 / (64 Z^2)) + 4 IB,   D = Z^2 p^2 + 4,  E = e^{-2 IB},
// where IB and I2 are antiderivative fields of y (slot 0): IB' = B and
// I2' = e^{-2 IB}.
ParametricTodaSolution toda_family(const ScalarField& IB, const ScalarField& I2);

// Antiderivative field F with F' = integrand in coordinate `slot` of a
// dim-variable chart and F = base at y0: the value comes from adaptive
// quadrature, the jet coefficients from series integration of the integrand.
ScalarField antiderivative(std::function<Jet(const Jet&)> integrand, double y0,
                           double base, int dim, int slot);

// h = e^U (dX^2 + dY^2) - eps dZ^2, omega = 2 U_Z dZ on a 3D chart whose
// slots are (X, Y, Z). (eps = -1 flips the sign of the dZ^2 term.)
WeylStructure build_toda_ew(const ScalarField& U, double epsilon, const Chart& chart);

// Norm of d(star_h dU) at p: an independent re-derivation of the Toda
// residual, which vanishes iff U solves the equation.
double dstar_du_residual(const WeylStructure& ws, const ScalarField& U, const Point& p);

struct TodStep1 {
    double c = 0;             // conformal factor
    JTensor theta;            // the rescaled self-dual derivative of K
    double parallel_res = 0;  // |grad theta| w.r.t. c^2 g, relative to |theta|
    double lkc = 0;           // |K . dc|
};
// F = dK + star_g dK, c normalized so that theta = c^3 F / 2 has squared
// norm 2 w.r.t. c^2 g (the compatible Kaehler / para-Kaehler scale); theta is
// then parallel for the Levi-Civita connection of c^2 g. star_orientation 0
// means "use g4.orientation". Throws when |F|_g vanishes at p.
TodStep1 tod_step1(const MetricField& g4, const TensorField& k, const Point& p,
                   int star_orientation = 0);

struct MomentReport {
    std::vector<double> z;  // value at each polyline vertex
    double closedness = 0;  // max |d(K . theta)| over the vertices
};
// The moment map dZ = theta(., K) integrated along the polyline (adaptive
// Simpson, tol 1e-12), anchored by Z = z0 at the first vertex.
MomentReport tod_step2_moment(const MetricField& g4, const TensorField& k,
                              const std::vector<Point>& polyline, double z0 = 0.0,
                              int star_orientation = 0);

// The moment map as a scalar field: the value integrates theta(., K) along
// the straight line from `base` (where Z = z_base), the jet coefficients are
// exact from the one-form theta(., K).
ScalarField moment_map_field(const MetricField& g4, const TensorField& k,
                             const Point& base, double z_base,
                             int star_orientation = 0);

// Normal-form check for candidate scalars (X, Y, Z, U) on the four-manifold:
// with gh = c^2 g and Kh = gh(K, .), verifies
//   |K|^2_gh gh - Kh (x) Kh
//     = e^U (dX (x) dX + y_sign dY (x) dY) - eps dZ (x) dZ
// pointwise (relative Frobenius misfit). Certifies the isothermal coordinates
// without constructing them. y_sign = -1 covers neutral-signature quotients,
// where the horizontal part of gh has Lorentzian signature and one isothermal
// coordinate of the elliptic normal form is imaginary: passing its real part
// as Y with y_sign = -1 verifies the same identity in real terms.
double toda_form_check(const MetricField& g4, const TensorField& k,
                       const ScalarField& X, const ScalarField& Y,
                       const ScalarField& Z, const ScalarField& U,
                       double epsilon, const Point& p, int star_orientation = 0,
                       int y_sign = +1);

// g = z (dx^2 + dy^2 + dz^2) + z^{-1} (dt + (x dy - y dx)/2)^2 on z > 0:
// Ricci-flat with anti-self-dual Weyl tensor for the returned orientation.
MetricField gibbons_hawking();

struct TodaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace tg
