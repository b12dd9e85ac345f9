// Connections and curvature: Levi-Civita symbols, Riemann/Ricci/scalar for
// metrics and general torsion-free affine connections, covariant derivatives,
// the SD/ASD decomposition of 2-forms in 4D, Weyl curvature, and the
// anti-self-duality / Einstein residuals.
//
// Index conventions (pinned by the constant-curvature oracles in the tests):
//   riemann_at:  R_{abc}{}^d = d_a Gamma^d_{bc} - d_b Gamma^d_{ac}
//                              + Gamma^d_{ae} Gamma^e_{bc} - Gamma^d_{be} Gamma^e_{ac}
//   ricci_at:    R_{ab} = R_{cab}{}^c   (not necessarily symmetric for affine
//                                        connections; equals the usual Ricci
//                                        for Levi-Civita)
// The unit round 2-sphere then has scalar curvature +2.

#pragma once

#include "tg/fields.hpp"

namespace tg {

struct ConnectionField {
    Chart chart;
    TensorField symbols;  // variance "ull": Gamma^c_{ab}, symmetric in (a,b)
    JTensor at(const Point& p, int order) const { return symbols.at(p, order); }
};

// Levi-Civita symbols as a field (jets of the symbols carry their derivatives).
ConnectionField levi_civita(const MetricField& g);

// Pointwise pipeline. Each step consumes one jet order.
JTensor christoffel_at(const JTensor& g);                 // g order k -> order k-1
JTensor riemann_at(const JTensor& gamma);                 // Gamma order k -> order k-1
JTensor ricci_at(const JTensor& gamma);                   // R_{ab} = R_{cab}{}^c
Jet scalar_curvature_at(const JTensor& g, const JTensor& ricci);

// (grad T)_{e i...} with connection corrections for the given variance.
JTensor covariant_derivative(const JTensor& gamma, const JTensor& t,
                             const std::string& variance);

// Fully lowered Riemann in pair ordering R_{abcd} (antisymmetric in ab and cd,
// symmetric under pair exchange): R_{abcd} = g_{de} R_{cab}{}^e... arranged so
// that R_{abcd} F^{cd} contractions follow the 2-form slot layout.
JTensor riemann_lower_at(const JTensor& g, const JTensor& riem);

// Weyl tensor, fully lowered, same slot layout as riemann_lower_at. dim >= 3.
JTensor weyl_lower_at(const JTensor& g, const JTensor& riem_lower,
                      const JTensor& ricci, const Jet& scalar);

// F = F+ + F- with star F± = ±F± (4D; split signature makes star an involution).
std::pair<JTensor, JTensor> sd_asd_split_at(const JTensor& g, int orientation,
                                            const JTensor& F);
std::pair<JTensor, JTensor> sd_asd_split(const MetricField& g, const TensorField& F,
                                         const Point& p, int order);

// |C+| / |C| at the point (conformally invariant); falls back to |C+|/|R|
// when the whole Weyl tensor vanishes. Near 0 certifies anti-self-duality.
double asd_weyl_residual(const MetricField& g, const Point& p);

struct EinsteinReport {
    double residual = 0;  // |Ric - (R/n) g| / max(|Ric|, |g|)
    double scalar = 0;
};
EinsteinReport einstein_residual(const MetricField& g, const Point& p);

struct CurvatureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace tg
