#include "tg/projective.hpp"

#include <cmath>

namespace tg {

ProjectiveStructure normal_form_structure(ScalarField A, ScalarField B, Chart chart) {
    ProjectiveStructure ps;
    ps.chart = chart;
    ps.gamma = make_tensor(chart, "ull",
                           [A, B](const std::vector<Jet>& xs, const std::vector<int>& idx) {
                               if (idx[0] == 0 && idx[1] == 1 && idx[2] == 1) return A(xs);
                               if (idx[0] == 1 && idx[1] == 0 && idx[2] == 0)
                                   return constant(-1.0, xs[0].config());
                               if (idx[0] == 1 && idx[1] == 1 && idx[2] == 1) return -1.0 * B(xs);
                               return constant(0.0, xs[0].config());
                           });
    return ps;
}

ProjectiveStructure flat_structure(Chart chart) {
    ProjectiveStructure ps;
    ps.chart = chart;
    ps.gamma = make_tensor(chart, "ull", [](const std::vector<Jet>& xs, const std::vector<int>&) {
        return constant(0.0, xs[0].config());
    });
    return ps;
}

OdeCoefficients ode_coefficients(const ProjectiveStructure& ps) {
    auto g = ps.gamma;
    auto comp = [g](int c, int a, int b) {
        return [g, c, a, b](const std::vector<Jet>& xs) {
            return g.comps[(c * 2 + a) * 2 + b](xs);
        };
    };
    OdeCoefficients out;
    out.a0 = {2, comp(1, 0, 0)};
    out.a1 = {2, [comp](const std::vector<Jet>& xs) {
                  return (comp(0, 0, 0)(xs) * -1.0 + 2.0 * comp(1, 0, 1)(xs)) / 3.0;
              }};
    out.a2 = {2, [comp](const std::vector<Jet>& xs) {
                  return (comp(0, 0, 1)(xs) * -2.0 + comp(1, 1, 1)(xs)) / 3.0;
              }};
    out.a3 = {2, [comp](const std::vector<Jet>& xs) { return comp(0, 1, 1)(xs) * -1.0; }};
    return out;
}

ProjectiveStructure apply_upsilon(const ProjectiveStructure& ps, const TensorField& ups) {
    ProjectiveStructure out;
    out.chart = ps.chart;
    auto g = ps.gamma;
    out.gamma = make_tensor(ps.chart, "ull",
                            [g, ups](const std::vector<Jet>& xs, const std::vector<int>& idx) {
                                Jet v = g.comps[(idx[0] * 2 + idx[1]) * 2 + idx[2]](xs);
                                if (idx[0] == idx[1]) v += ups.comps[idx[2]](xs);
                                if (idx[0] == idx[2]) v += ups.comps[idx[1]](xs);
                                return v;
                            });
    return out;
}

JTensor schouten_at(const JTensor& gamma, int n) {
    JTensor ric = ricci_at(gamma);
    return symmetrize(ric) * (1.0 / (n - 1.0)) +
           (ric - symmetrize(ric)) * (1.0 / (n + 1.0));
}

TensorField schouten_field(const ProjectiveStructure& ps) {
    auto g = ps.gamma;
    return tensorfield_from_evaluator(ps.chart, "ll", [g](const Point& p, int order) {
        return schouten_at(g.at(p, order + 1), 2);
    });
}

double cotton_residual(const ProjectiveStructure& ps, const Point& p) {
    JTensor gam = ps.gamma.at(p, 2);
    JTensor P = schouten_at(gam, 2);
    JTensor gradP = covariant_derivative(truncate(gam, 1), P, "ll");  // (A, B, C)
    double m = 0;
    for (int c = 0; c < 2; ++c)
        m = std::max(m, std::abs(0.5 * (gradP.at({0, 1, c}).value() -
                                        gradP.at({1, 0, c}).value())));
    return m;
}

JTensor lie_derivative_connection(const JTensor& k, const JTensor& gamma) {
    // (L_k G)^C_{AB} = k^D d_D G^C_{AB} - d_D k^C G^D_{AB}
    //                  + d_A k^D G^C_{DB} + d_B k^D G^C_{AD} + d_A d_B k^C
    const int n = gamma.dim;
    const int ord = std::min(jconfig(k).order - 2, jconfig(gamma).order - 1);
    if (ord < 0) throw FieldError("lie_derivative_connection: insufficient jet order");
    JetConfig lo{jconfig(gamma).dim, ord};
    JTensor G = truncate(gamma, ord);
    JTensor dG = truncate(tensor_derivative(gamma), ord);
    JTensor kk = truncate(k, ord);
    JTensor dk = truncate(tensor_derivative(k), ord);    // (a, c) = d_a k^c
    JTensor ddk = truncate(tensor_derivative(tensor_derivative(k)), ord);  // (a, b, c)
    JTensor r(n, 3, lo);
    for (int c = 0; c < n; ++c)
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                Jet s = ddk.at({a, b, c});
                for (int d = 0; d < n; ++d) {
                    s += kk.at({d}) * dG.at({d, c, a, b});
                    s -= dk.at({d, c}) * G.at({d, a, b});
                    s += dk.at({a, d}) * G.at({c, d, b});
                    s += dk.at({b, d}) * G.at({c, a, d});
                }
                r.at({c, a, b}) = s;
            }
    return r;
}

namespace {

ProjectiveVectorReport fit_upsilon(const JTensor& lie) {
    // Solve lie^C_{AB} = delta^C_A u_B + delta^C_B u_A in least squares.
    // Normal equations M^T M u = M^T r assembled over the 8 component slots.
    double MtM[2][2] = {{0, 0}, {0, 0}};
    double Mtr[2] = {0, 0};
    for (int c = 0; c < 2; ++c)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                double row[2] = {0, 0};
                if (c == a) row[b] += 1;
                if (c == b) row[a] += 1;
                double rhs = lie.at({c, a, b}).value();
                for (int i = 0; i < 2; ++i) {
                    Mtr[i] += row[i] * rhs;
                    for (int j = 0; j < 2; ++j) MtM[i][j] += row[i] * row[j];
                }
            }
    double det = MtM[0][0] * MtM[1][1] - MtM[0][1] * MtM[1][0];
    ProjectiveVectorReport rep;
    rep.upsilon = {(MtM[1][1] * Mtr[0] - MtM[0][1] * Mtr[1]) / det,
                   (MtM[0][0] * Mtr[1] - MtM[1][0] * Mtr[0]) / det};
    double s = 0;
    for (int c = 0; c < 2; ++c)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                double fit = (c == a ? rep.upsilon[b] : 0.0) + (c == b ? rep.upsilon[a] : 0.0);
                double d = lie.at({c, a, b}).value() - fit;
                s += d * d;
            }
    rep.residual = std::sqrt(s);
    return rep;
}

}  // namespace

ProjectiveVectorReport projective_vector_residual(const ProjectiveStructure& ps,
                                                  const TensorField& k, const Point& p) {
    JTensor lie = lie_derivative_connection(k.at(p, 2), ps.gamma.at(p, 1));
    return fit_upsilon(lie);
}

TensorField upsilon_field(const ProjectiveStructure& ps, const TensorField& k) {
    auto gam = ps.gamma;
    auto kf = k;
    return tensorfield_from_evaluator(ps.chart, "l", [gam, kf](const Point& p, int order) {
        JTensor lie = lie_derivative_connection(kf.at(p, order + 2), gam.at(p, order + 1));
        // Re-run the pointwise fit per jet coefficient by fitting on jets:
        // the fit is linear, so apply it coefficient-wise via jets directly.
        JetConfig cfg = jconfig(lie);
        // assemble normal equations with jet entries
        Jet MtM00 = constant(0.0, cfg), MtM01 = constant(0.0, cfg), MtM11 = constant(0.0, cfg);
        Jet Mtr0 = constant(0.0, cfg), Mtr1 = constant(0.0, cfg);
        double m00 = 0, m01 = 0, m11 = 0;
        for (int c = 0; c < 2; ++c)
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) {
                    double row[2] = {0, 0};
                    if (c == a) row[b] += 1;
                    if (c == b) row[a] += 1;
                    m00 += row[0] * row[0];
                    m01 += row[0] * row[1];
                    m11 += row[1] * row[1];
                    Mtr0 += row[0] * lie.at({c, a, b});
                    Mtr1 += row[1] * lie.at({c, a, b});
                }
        double det = m00 * m11 - m01 * m01;
        JTensor u(2, 1, cfg);
        u.c[0] = (Mtr0 * m11 - Mtr1 * m01) * (1.0 / det);
        u.c[1] = (Mtr1 * m00 - Mtr0 * m01) * (1.0 / det);
        return u;
    });
}

}  // namespace tg
