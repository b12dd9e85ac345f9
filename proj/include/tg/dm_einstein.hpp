// The projective-to-Einstein construction on the cotangent bundle of an
// n-manifold: the one-parameter family of Einstein metrics, its symplectic
// form and Maxwell potential, Killing lifts of projective vector fields,
// the parallel two-form identities of the model case, the circle-bundle
// Einstein lift, the flat quadric embedding, and the point-line incidence
// metric of the model.

#pragma once

#include <random>

#include "tg/curvature.hpp"
#include "tg/projective.hpp"

namespace tg {

struct DmSpace {
    int n = 2;
    double lambda = 1.0;
    Chart base_chart;       // n-dim (x^0..x^{n-1})
    TensorField gamma;      // "ull" connection symbols on base_chart
    TensorField schouten;   // "ll" on base_chart (full, both parts)
    Chart chart;            // 2n-dim (x^0.., z_0..)
    MetricField metric;     // per the lambda-family display; orientation -1
    TensorField omega;      // symplectic form, classical components
    TensorField potential;  // one-form A with dA = omega
};

DmSpace build_dm(const Chart& base_chart, const TensorField& gamma, int n, double lambda);
DmSpace build_dm(const ProjectiveStructure& ps, double lambda);

struct EinsteinCheckReport {
    double max_residual = 0;
    double max_scalar_err = 0;  // |scalar - expected| (absolute)
    double expected_scalar = 0;
    int points = 0;
    long resamples = 0;
};
// expected scalar 4 n (n+1) lambda for the 2n-metric.
EinsteinCheckReport einstein_check(const DmSpace& space, int npoints,
                                   std::mt19937_64& rng, double tol);

// K = k - z_C (d k^C / d x^A) d/dz_A + ups_A d/dz_A on the 2n-chart.
TensorField killing_lift(const DmSpace& space, const TensorField& k,
                         const TensorField& ups);

// hh: max over the three SD two-forms S of |dS + 2 A ^ S| (model case n=2,
// flat structure, lambda=1); beta: |grad S - (beta_const/2) A (x) S| for
// S = dx^0 ^ dx^1 (any structure at lambda=1); the half accounts for the
// scale of the primitive A (dA = omega classically gives grad S = 3 A (x) S).
struct ParallelReport {
    double hh = 0;
    double beta = 0;
};
ParallelReport parallel_structure_residuals(const DmSpace& space, const Point& p,
                                            double beta_const = 6.0);

struct KkSpace {
    DmSpace base;
    Chart chart;         // 2n+1 coordinates, fibre coordinate t last
    MetricField metric;  // g - lambda (dt/lambda + A)^2
};
KkSpace kk_lift(const DmSpace& space);

// |grad^c W_{cb}| for the space's symplectic form (or any given 2-form).
double omega_divergence(const DmSpace& space, const Point& p);
double omega_divergence_of(const DmSpace& space, const TensorField& form2, const Point& p);

struct QuadricReport {
    double metric_residual = 0;      // pullback of dX.dY vs g - L(dtau/L + z dx)^2
    double constraint_residual = 0;  // X.Y - 1/L along the embedding
};
// p lives on the (x^0..x^{n-1}, z_0..z_{n-1}, tau) chart.
QuadricReport quadric_embedding_check(int n, double lambda, const Point& p);

// g = dP.dL + (L.dP)^2 for jets P (3 components) and L (3 components) in the
// same variables, normalized to P.L = 1 at the point. Returns the rank-2
// metric components in those variables.
JTensor incidence_metric(const std::vector<Jet>& P, const std::vector<Jet>& L);

struct DmError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace tg
