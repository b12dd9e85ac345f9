#include "tg/curvature.hpp"

#include <algorithm>
#include <cmath>

namespace tg {

JTensor christoffel_at(const JTensor& g) {
    const int n = g.dim;
    const JetConfig lo{jconfig(g).dim, jconfig(g).order - 1};
    if (lo.order < 0) throw CurvatureError("christoffel: insufficient jet order");
    Jet dg0 = det(g);
    if (std::abs(dg0.value()) < 1e-10) throw CurvatureError("christoffel: degenerate metric");
    JTensor ginv = truncate(inverse(g), lo.order);
    JTensor dg = tensor_derivative(g);  // (a, b, c) = d_a g_{bc}
    JTensor gam(n, 3, lo);              // (c, a, b) = Gamma^c_{ab}
    for (int c = 0; c < n; ++c)
        for (int a = 0; a < n; ++a)
            for (int b = a; b < n; ++b) {
                Jet s = constant(0.0, lo);
                for (int d = 0; d < n; ++d)
                    s += ginv.at({c, d}) *
                         (dg.at({a, d, b}) + dg.at({b, d, a}) - dg.at({d, a, b}));
                s *= 0.5;
                gam.at({c, a, b}) = s;
                gam.at({c, b, a}) = s;
            }
    return gam;
}

ConnectionField levi_civita(const MetricField& g) {
    MetricField gc = g;
    ConnectionField conn;
    conn.chart = g.base.chart;
    conn.symbols = tensorfield_from_evaluator(
        g.base.chart, "ull", [gc](const Point& p, int order) {
            return christoffel_at(gc.base.at(p, order + 1));
        });
    return conn;
}

JTensor riemann_at(const JTensor& gamma) {
    const int n = gamma.dim;
    const JetConfig lo{jconfig(gamma).dim, jconfig(gamma).order - 1};
    if (lo.order < 0) throw CurvatureError("riemann: insufficient jet order");
    JTensor dG = tensor_derivative(gamma);  // (e, c, a, b) = d_e Gamma^c_{ab}
    JTensor G = truncate(gamma, lo.order);
    JTensor r(n, 4, lo);  // (a, b, c, d) = R_{abc}^d
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            if (a == b) continue;
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                    Jet s = dG.at({a, d, b, c}) - dG.at({b, d, a, c});
                    for (int e = 0; e < n; ++e)
                        s += G.at({d, a, e}) * G.at({e, b, c}) -
                             G.at({d, b, e}) * G.at({e, a, c});
                    r.at({a, b, c, d}) = s;
                }
        }
    return r;
}

JTensor ricci_at(const JTensor& gamma) { return contract(riemann_at(gamma), 0, 3); }

Jet scalar_curvature_at(const JTensor& g, const JTensor& ricci) {
    JTensor ginv = truncate(inverse(g), jconfig(ricci).order);
    return contract(contract(tensor_product(ginv, ricci), 1, 3), 0, 1).c[0];
}

JTensor covariant_derivative(const JTensor& gamma, const JTensor& t,
                             const std::string& variance) {
    const int ord = jconfig(t).order - 1;
    if (ord < 0) throw CurvatureError("covariant_derivative: insufficient jet order");
    JTensor r = tensor_derivative(t);  // (e, i...)
    JTensor G = truncate(gamma, ord);
    JTensor tl = truncate(t, ord);
    std::vector<int> idx, jdx;
    for (int f = 0; f < r.size(); ++f) {
        r.unflatten(f, idx);  // idx[0] = e, idx[1..] = tensor slots
        for (size_t s = 0; s < variance.size(); ++s) {
            jdx.assign(idx.begin() + 1, idx.end());
            Jet acc = constant(0.0, jconfig(r));
            for (int fidx = 0; fidx < t.dim; ++fidx) {
                jdx[s] = fidx;
                if (variance[s] == 'u')
                    acc += G.at({static_cast<int>(idx[1 + s]), idx[0], fidx}) * tl.at(jdx);
                else
                    acc -= G.at({fidx, idx[0], static_cast<int>(idx[1 + s])}) * tl.at(jdx);
            }
            r.c[f] += acc;
        }
    }
    return r;
}

JTensor riemann_lower_at(const JTensor& g, const JTensor& riem) {
    const int n = g.dim;
    JTensor gl = truncate(g, jconfig(riem).order);
    JTensor L(n, 4, jconfig(riem));  // standard ordering: L_{rsmn}
    for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s)
            for (int m = 0; m < n; ++m)
                for (int nn = 0; nn < n; ++nn) {
                    Jet acc = constant(0.0, jconfig(riem));
                    for (int e = 0; e < n; ++e)
                        acc += gl.at({r, e}) * riem.at({m, nn, s, e});
                    L.at({r, s, m, nn}) = acc;
                }
    return L;
}

JTensor weyl_lower_at(const JTensor& g, const JTensor& riem_lower,
                      const JTensor& ricci, const Jet& scalar) {
    const int n = g.dim;
    if (n < 3) throw CurvatureError("weyl: dimension must be >= 3");
    const int ord = jconfig(riem_lower).order;
    JTensor gl = truncate(g, ord);
    JTensor rl = truncate(ricci, ord);
    Jet sl = truncate(scalar, ord);
    JTensor C = riem_lower;
    const double k1 = 1.0 / (n - 2);
    const double k2 = 1.0 / ((n - 1.0) * (n - 2.0));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                    Jet t = (gl.at({a, c}) * rl.at({b, d}) - gl.at({a, d}) * rl.at({b, c}) +
                             gl.at({b, d}) * rl.at({a, c}) - gl.at({b, c}) * rl.at({a, d})) *
                            k1;
                    Jet u = (gl.at({a, c}) * gl.at({b, d}) - gl.at({a, d}) * gl.at({b, c})) *
                            sl * k2;
                    C.at({a, b, c, d}) -= t;
                    C.at({a, b, c, d}) += u;
                }
    return C;
}

std::pair<JTensor, JTensor> sd_asd_split_at(const JTensor& g, int orientation,
                                            const JTensor& F) {
    if (g.dim != 4 || F.rank != 2) throw CurvatureError("sd_asd_split: need a 2-form in 4D");
    JTensor gl = truncate(g, jconfig(F).order);
    JTensor sF = hodge_star(gl, orientation, F);
    JTensor plus = (F + sF) * 0.5;
    JTensor minus = (F - sF) * 0.5;
    return {plus, minus};
}

std::pair<JTensor, JTensor> sd_asd_split(const MetricField& g, const TensorField& F,
                                         const Point& p, int order) {
    return sd_asd_split_at(g.base.at(p, order), g.orientation, F.at(p, order));
}

namespace {

// Pairs (a<b) indexing the 6-dim space of 2-form components in 4D.
constexpr int kPairs[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};

using Mat6 = std::array<std::array<double, 6>, 6>;

Mat6 matmul(const Mat6& A, const Mat6& B) {
    Mat6 C{};
    for (int i = 0; i < 6; ++i)
        for (int k = 0; k < 6; ++k)
            for (int j = 0; j < 6; ++j) C[i][j] += A[i][k] * B[k][j];
    return C;
}

double fro(const Mat6& A) {
    double s = 0;
    for (auto& row : A)
        for (double x : row) s += x * x;
    return std::sqrt(s);
}

// Endomorphism of 2-forms from a (0,4) tensor T antisymmetric in both pairs:
// M[I][J] = T_{ab ef} g^{ec} g^{fd}, I=(ab), J=(cd), a<b, c<d (values only).
Mat6 two_form_operator(const JTensor& T, const JTensor& ginv) {
    Mat6 M{};
    for (int I = 0; I < 6; ++I)
        for (int J = 0; J < 6; ++J) {
            const int a = kPairs[I][0], b = kPairs[I][1];
            const int c = kPairs[J][0], d = kPairs[J][1];
            double s = 0;
            for (int e = 0; e < 4; ++e)
                for (int f = 0; f < 4; ++f)
                    s += T.at({a, b, e, f}).value() * ginv.at({e, c}).value() *
                         ginv.at({f, d}).value();
            M[I][J] = s;
        }
    return M;
}

Mat6 star_operator(const JTensor& g, int orientation) {
    // (star F)_{ab} = orientation * sqrt|det g| eps_{abmn} g^{mc} g^{nd} F_{cd}, c<d
    JTensor ginv = inverse(g);
    double vol = orientation * std::sqrt(std::abs(det(g).value()));
    auto eps = [](int a, int b, int c, int d) -> int {
        int p[4] = {a, b, c, d};
        int sign = 1;
        for (int i = 0; i < 4; ++i)
            for (int j = i + 1; j < 4; ++j) {
                if (p[i] == p[j]) return 0;
                if (p[i] > p[j]) sign = -sign;
            }
        return sign;
    };
    Mat6 S{};
    for (int I = 0; I < 6; ++I)
        for (int J = 0; J < 6; ++J) {
            const int a = kPairs[I][0], b = kPairs[I][1];
            const int c = kPairs[J][0], d = kPairs[J][1];
            double s = 0;
            for (int m = 0; m < 4; ++m)
                for (int n = 0; n < 4; ++n) {
                    int e = eps(a, b, m, n);
                    if (!e) continue;
                    // antisymmetrized over the (c,d) pair: F_{dc} = -F_{cd}
                    s += e * (ginv.at({m, c}).value() * ginv.at({n, d}).value() -
                              ginv.at({m, d}).value() * ginv.at({n, c}).value());
                }
            S[I][J] = vol * s * 0.5;
        }
    return S;
}

}  // namespace

double asd_weyl_residual(const MetricField& g, const Point& p) {
    JTensor gj = g.base.at(p, 2);
    if (gj.dim != 4) throw CurvatureError("asd_weyl_residual: need a 4D metric");
    JTensor gam = christoffel_at(gj);
    JTensor riem = riemann_at(gam);
    JTensor ric = ricci_at(gam);
    Jet scal = scalar_curvature_at(gj, ric);
    JTensor L = riemann_lower_at(gj, riem);
    JTensor C = weyl_lower_at(gj, L, ric, scal);
    JTensor ginv = inverse(gj);
    Mat6 W = two_form_operator(C, ginv);
    Mat6 R = two_form_operator(L, ginv);
    Mat6 S = star_operator(gj, g.orientation);
    Mat6 P{};  // (1 + S)/2
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) P[i][j] = 0.5 * (S[i][j] + (i == j ? 1.0 : 0.0));
    Mat6 Wp = matmul(P, matmul(W, P));
    double nC = fro(W), nP = fro(Wp), nR = fro(R);
    if (nC > 1e-9 * std::max(1.0, nR)) return nP / nC;
    return nP / std::max(nR, 1.0);
}

EinsteinReport einstein_residual(const MetricField& g, const Point& p) {
    JTensor gj = g.base.at(p, 2);
    const int n = gj.dim;
    JTensor gam = christoffel_at(gj);
    JTensor ric = ricci_at(gam);
    Jet scal = scalar_curvature_at(gj, ric);
    JTensor tf = ric - truncate(gj, jconfig(ric).order) * (scal.value() / n);
    EinsteinReport rep;
    rep.scalar = scal.value();
    rep.residual = fro_norm(tf) / std::max(fro_norm(ric), fro_norm(gj));
    return rep;
}

}  // namespace tg
