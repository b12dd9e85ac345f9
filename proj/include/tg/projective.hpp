// 2D projective structures: representative connections, the associated
// second-order ODE coefficients, projective changes of representative,
// Schouten/Cotton tensors, and projective vector field certification.

#pragma once

#include <array>

#include "tg/curvature.hpp"

namespace tg {

struct ProjectiveStructure {
    Chart chart;            // 2D, coordinates (x, y)
    TensorField gamma;      // variance "ull", torsion-free
};

struct OdeCoefficients {
    ScalarField a0, a1, a2, a3;  // y'' = -(a0 + 3 a1 y' + 3 a2 y'^2 + a3 y'^3)
};

// Representative connection G^0_{11} = A(y), G^1_{00} = -1, G^1_{11} = -B(y),
// all other components zero. A, B are fields on the 2D chart (of y only).
ProjectiveStructure normal_form_structure(ScalarField A, ScalarField B,
                                          Chart chart);
ProjectiveStructure flat_structure(Chart chart);

// a0 = G^1_{00}, 3 a1 = -G^0_{00} + 2 G^1_{01},
// 3 a2 = -2 G^0_{01} + G^1_{11}, a3 = -G^0_{11}. Projectively invariant.
OdeCoefficients ode_coefficients(const ProjectiveStructure& ps);

// Change of representative: G^C_{AB} += delta^C_A ups_B + delta^C_B ups_A.
ProjectiveStructure apply_upsilon(const ProjectiveStructure& ps, const TensorField& ups);

// P_{AB} = 1/(n-1) R_(AB) + 1/(n+1) R_[AB] from the (possibly non-symmetric)
// Ricci of an affine connection; consumes one jet order.
JTensor schouten_at(const JTensor& gamma, int n);
// Schouten of the structure as a field (n = 2).
TensorField schouten_field(const ProjectiveStructure& ps);

// Norm of the projective Cotton tensor grad_{[A} P_{B]C}; 0 iff flat nearby.
double cotton_residual(const ProjectiveStructure& ps, const Point& p);

// Least-squares fit of ups in L_k G^C_{AB} = delta^C_A ups_B + delta^C_B ups_A
// over the six independent component equations. residual ~ 0 certifies that
// k generates a projective symmetry; ups feeds the cotangent-bundle lift.
struct ProjectiveVectorReport {
    double residual = 0;
    std::array<double, 2> upsilon{0, 0};
};
ProjectiveVectorReport projective_vector_residual(const ProjectiveStructure& ps,
                                                  const TensorField& k, const Point& p);
// The fitted ups as a one-form field (smooth wherever k is projective).
TensorField upsilon_field(const ProjectiveStructure& ps, const TensorField& k);

// L_k of connection symbols (non-tensorial transformation law).
JTensor lie_derivative_connection(const JTensor& k, const JTensor& gamma);

}  // namespace tg
