#include "tg/einstein_weyl.hpp"

#include <cmath>

namespace tg {

namespace {

JTensor lower_index(const JTensor& g, const JTensor& v) {
    int n = g.dim;
    JTensor out(n, 1, jconfig(g));
    for (int a = 0; a < n; ++a) {
        Jet acc = constant(0.0, jconfig(g));
        for (int b = 0; b < n; ++b) acc += g.at({a, b}) * v.at({b});
        out.at({a}) = acc;
    }
    return out;
}

Jet dot(const JTensor& a, const JTensor& b) {
    Jet acc = constant(0.0, jconfig(a));
    for (int i = 0; i < a.dim; ++i) acc += a.at({i}) * b.at({i});
    return acc;
}

}  // namespace

JTensor weyl_connection_at(const WeylStructure& ws, const Point& p, int order) {
    const int n = ws.chart.dim;
    JTensor G = ws.h.base.at(p, order + 1);
    JTensor lc = christoffel_at(G);
    JTensor g = truncate(G, order);
    JTensor w = truncate(ws.omega.at(p, order), order);
    JTensor gi = inverse(g);
    JTensor wu(n, 1, jconfig(g));
    for (int i = 0; i < n; ++i) {
        Jet acc = constant(0.0, jconfig(g));
        for (int j = 0; j < n; ++j) acc += gi.at({i, j}) * w.at({j});
        wu.at({i}) = acc;
    }
    JTensor out = lc;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                Jet corr = g.at({j, k}) * wu.at({i}) * 0.5;
                if (i == k) corr -= w.at({j}) * 0.5;
                if (i == j) corr -= w.at({k}) * 0.5;
                out.at({i, j, k}) += corr;
            }
    return out;
}

double weyl_compat_residual(const WeylStructure& ws, const Point& p) {
    JTensor gam = weyl_connection_at(ws, p, 1);
    JTensor g = truncate(ws.h.base.at(p, 2), 2);
    JTensor dh = covariant_derivative(gam, g, "ll");
    JTensor want = tensor_product(truncate(ws.omega.at(p, 1), 1), truncate(g, 1));
    return max_abs(dh - want);
}

double ew_residual(const WeylStructure& ws, const Point& p) {
    const int n = ws.chart.dim;
    JTensor gam = weyl_connection_at(ws, p, 2);
    JTensor ric = ricci_at(gam);
    JTensor S = symmetrize(ric);
    JTensor g = truncate(ws.h.base.at(p, 1), 1);
    JTensor gi = inverse(g);
    Jet tr = contract(contract(tensor_product(gi, S), 1, 2), 0, 1).c[0];
    JTensor tf = S - truncate(g, 1) * (tr / static_cast<double>(n));
    return fro_norm(tf) / std::max(fro_norm(S), 1.0);
}

double invariant_coords_residual(const InvariantChart& ic, const Point& p4) {
    auto xs = seed_point(p4, 1);
    JTensor kv = ic.k.eval(xs);
    double worst = 0;
    for (const auto& u : ic.coords) {
        Jet uj = u(xs);
        double acc = 0;
        for (int m = 0; m < ic.source.dim; ++m)
            acc += kv.at({m}).value() * derivative(uj, m).value();
        worst = std::max(worst, std::abs(acc));
    }
    return worst;
}

namespace {

// Quotient pair (h or omega) at a target point, as jets in the target
// variables, by evaluating the 4D expressions at the section image and
// re-expanding through the section map.
JTensor reduce_eval(const MetricField& g4, const InvariantChart& ic, int star_orientation,
                    const Point& u, int order, bool want_h) {
    const int sd = ic.target.dim;
    const int n4 = ic.source.dim;
    auto us = seed_point(u, order + 1);
    std::vector<Jet> sig;
    sig.reserve(n4);
    for (const auto& f : ic.section) sig.push_back(f(us));
    Point p4(n4);
    for (int m = 0; m < n4; ++m) p4[m] = sig[m].value();

    auto xs4 = seed_point(p4, order + 2);
    JTensor G = g4.base.eval(xs4);
    JTensor kv = ic.k.eval(xs4);
    JTensor Kl = lower_index(G, kv);
    Jet k2 = dot(Kl, kv);
    if (std::abs(k2.value()) < 1e-8) throw EwError("null symmetry vector at sample");

    JTensor T4;
    if (want_h) {
        T4 = truncate(G * (1.0 / k2) - tensor_product(Kl, Kl) * (1.0 / (k2 * k2)),
                      order + 1);
    } else {
        JTensor Kt = truncate(Kl, order + 1);
        JTensor dK = ext_d(Kt);
        JTensor KdK = wedge(truncate(Kt, order), truncate(dK, order));
        JTensor st = hodge_star(truncate(G, order), star_orientation, KdK);
        T4 = st * (2.0 / truncate(k2, order));
    }
    const int r = T4.rank;
    const int ord4 = T4.c[0].config().order;

    // Re-expand the 4D jets in the target variables.
    std::vector<Jet> delta;
    delta.reserve(n4);
    for (int m = 0; m < n4; ++m) {
        Jet d = truncate(sig[m], ord4);
        d -= p4[m];
        delta.push_back(d);
    }
    std::vector<Jet> tv(T4.size(), Jet());
    for (int f = 0; f < T4.size(); ++f) tv[f] = truncate(compose(T4.c[f], delta), order);

    JetConfig lo{sd, order};
    std::vector<std::vector<Jet>> J(n4, std::vector<Jet>(sd, constant(0.0, lo)));
    for (int m = 0; m < n4; ++m)
        for (int i = 0; i < sd; ++i) J[m][i] = truncate(derivative(sig[m], i), order);

    JTensor out(sd, r, lo);
    std::vector<int> oidx(r), sidx(r);
    for (int f = 0; f < out.size(); ++f) {
        out.unflatten(f, oidx);
        Jet acc = constant(0.0, lo);
        int total = 1;
        for (int i = 0; i < r; ++i) total *= n4;
        JTensor dummy(n4, r, lo);
        for (int s = 0; s < total; ++s) {
            dummy.unflatten(s, sidx);
            Jet term = tv[s];
            for (int i = 0; i < r; ++i) term = term * J[sidx[i]][oidx[i]];
            acc += term;
        }
        out.c[f] = acc;
    }
    return out;
}

}  // namespace

WeylStructure jones_tod_reduce(const MetricField& g4, const InvariantChart& ic,
                               int star_orientation) {
    const int so = star_orientation == 0 ? g4.orientation : star_orientation;
    WeylStructure ws;
    ws.chart = ic.target;
    MetricField g4c = g4;
    InvariantChart icc = ic;
    ws.h.base = tensorfield_from_evaluator(
        ic.target, "ll", [g4c, icc, so](const Point& u, int order) {
            return reduce_eval(g4c, icc, so, u, order, true);
        });
    ws.h.orientation = +1;
    ws.omega = tensorfield_from_evaluator(
        ic.target, "l", [g4c, icc, so](const Point& u, int order) {
            return reduce_eval(g4c, icc, so, u, order, false);
        });
    return ws;
}

GaugeReport gauge_equivalent(const WeylStructure& a, const WeylStructure& b,
                             const std::vector<Point>& pts, double tol) {
    GaugeReport rep;
    rep.verdict = true;
    for (const auto& p : pts) {
        JTensor H1 = a.h.base.at(p, 1);
        JTensor H2 = b.h.base.at(p, 1);
        Jet num = constant(0.0, jconfig(H1));
        Jet den = constant(0.0, jconfig(H1));
        for (int f = 0; f < H1.size(); ++f) {
            num += H1.c[f] * H2.c[f];
            den += H2.c[f] * H2.c[f];
        }
        Jet r2 = num / den;
        double conf = fro_norm(H1 - H2 * r2) / std::max(fro_norm(H1), 1e-300);
        Jet r2a = r2.value() < 0 ? -r2 : r2;
        Jet lr = log(r2a);
        const int n = a.chart.dim;
        JTensor dln(n, 1, JetConfig{n, 0});
        for (int i = 0; i < n; ++i) dln.at({i}) = derivative(lr, i);
        JTensor w1 = truncate(a.omega.at(p, 0), 0);
        JTensor w2 = truncate(b.omega.at(p, 0), 0);
        double om = max_abs(w1 - w2 - dln);
        rep.conf_misfit = std::max(rep.conf_misfit, conf);
        rep.omega_misfit = std::max(rep.omega_misfit, om);
        rep.rho2.push_back(r2.value());
        if (conf > tol || om > tol) rep.verdict = false;
    }
    return rep;
}

double monopole_residual(const WeylStructure& ws, const ScalarField& V,
                         const TensorField& alpha, const Point& p) {
    const int n = ws.chart.dim;
    auto xs = seed_point(p, 2);
    Jet v = V(xs);
    JTensor dV(n, 1, JetConfig{n, 1});
    for (int i = 0; i < n; ++i) dV.at({i}) = derivative(v, i);
    JTensor w = truncate(ws.omega.at(p, 1), 1);
    JTensor dal = ext_d(truncate(alpha.at(p, 2), 2));
    JTensor g = truncate(ws.h.base.at(p, 1), 1);
    JTensor st = hodge_star(g, ws.h.orientation, dal);
    JTensor lhs = dV + w * (truncate(v, 1) * 0.5);
    return max_abs(lhs - st);
}

SymmetryReport ew_symmetry_residual(const WeylStructure& ws, const TensorField& K,
                                    const Point& p) {
    SymmetryReport rep;
    const int n = ws.chart.dim;
    JTensor H = ws.h.base.at(p, 3);
    JTensor Kv = K.at(p, 3);
    JTensor lkh = lie_derivative(Kv, H, "ll");
    JTensor h2 = truncate(H, 2);
    JTensor gi = inverse(h2);
    Jet f = contract(contract(tensor_product(gi, lkh), 1, 2), 0, 1).c[0] /
            static_cast<double>(n);
    rep.f = f.value();
    rep.res_h = fro_norm(lkh - h2 * f) / std::max(fro_norm(h2), 1e-300);

    Jet lndet = log(abs_sqrt(det(H)) * abs_sqrt(det(H)));
    JTensor dld(n, 1, JetConfig{n, 2});
    for (int i = 0; i < n; ++i) dld.at({i}) = derivative(lndet, i);
    Jet s = dot(dld, truncate(Kv, 2));
    JTensor dKd(n, 1, JetConfig{n, 1});
    for (int i = 0; i < n; ++i) dKd.at({i}) = derivative(s, i);
    JTensor w = truncate(ws.omega.at(p, 2), 2);
    JTensor lkw = lie_derivative(truncate(Kv, 2), w, "l");
    rep.res_omega = max_abs(lkw - dKd * (1.0 / static_cast<double>(n)));
    return rep;
}

namespace {

// Normal components of the invariant-curve deformation at curve parameter l:
// with D = uv/t + (1-v)l, n = u - tl - 1, m-differential dm = -dv/t + v dt/t^2,
// the one-form (-l - a v/t)(D dn - n dD) - (1-a)[(n - tl)D - l n (1-v)] dm.
// Cubic in l with an exact root at l = -v/t.
JTensor curve_normal_form(const Jet& u, const Jet& v, const Jet& t, double a,
                          double l, const JetConfig& cfg) {
    Jet D = u * v / t + (1.0 - v) * l;
    Jet n = u - t * l - 1.0;
    Jet pre = -1.0 * (l + a * v / t);
    Jet s = (n - t * l) * D - l * (1.0 - v) * n;
    Jet dn[3] = {constant(1.0, cfg), constant(0.0, cfg), constant(-l, cfg)};
    Jet dD[3] = {v / t, u / t - l, -1.0 * u * v / (t * t)};
    Jet dm[3] = {constant(0.0, cfg), -1.0 / t, v / (t * t)};
    JTensor out(3, 1, cfg);
    for (int i = 0; i < 3; ++i)
        out.at({i}) = pre * (D * dn[i] - n * dD[i]) - (1.0 - a) * s * dm[i];
    return out;
}

}  // namespace

JTensor discriminant_h(double a, const Point& p, int order) {
    auto xs = seed_point(p, order);
    const Jet &u = xs[0], &v = xs[1], &t = xs[2];
    JetConfig cfg = u.config();
    // Divide out the fixed root, then solve for the quadratic coefficients
    // A l^2 + B l + C from three samples of the quotient.
    const double ls[3] = {0.4, 0.9, 1.5};
    JTensor q[3];
    for (int k = 0; k < 3; ++k)
        q[k] = curve_normal_form(u, v, t, a, ls[k], cfg) * (1.0 / (ls[k] + v / t));
    double M[3][3];
    for (int k = 0; k < 3; ++k) {
        M[k][0] = ls[k] * ls[k];
        M[k][1] = ls[k];
        M[k][2] = 1.0;
    }
    double dM = M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) -
                M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
                M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
    JTensor abc[3];
    for (int c = 0; c < 3; ++c) {
        JTensor s(3, 1, cfg);
        for (int r = 0; r < 3; ++r) {
            double minor[2][2];
            int rr = 0;
            for (int r2 = 0; r2 < 3; ++r2) {
                if (r2 == r) continue;
                int cc = 0;
                for (int c2 = 0; c2 < 3; ++c2) {
                    if (c2 == c) continue;
                    minor[rr][cc++] = M[r2][c2];
                }
                ++rr;
            }
            double cof = minor[0][0] * minor[1][1] - minor[0][1] * minor[1][0];
            if ((r + c) % 2 != 0) cof = -cof;
            s = s + q[r] * cof;
        }
        abc[c] = s * (1.0 / dM);
    }
    const JTensor &A = abc[0], &B = abc[1], &C = abc[2];
    JTensor disc = tensor_product(B, B) -
                   (tensor_product(A, C) + tensor_product(C, A)) * 2.0;
    // Rescale so the du^2 coefficient is -t^2.
    return disc * (-1.0 * t * t);
}

WeylStructure translation_reduction_pair(ScalarField A, ScalarField B) {
    // coordinates (p, q, y)
    auto Ac = A;
    auto Bc = B;
    ScalarField denom{3, [Bc](const std::vector<Jet>& xs) {
                          return Bc(xs) + xs[0] * xs[0] + xs[1];
                      }};
    Chart chart = make_chart({"p", "q", "y"},
                             {{0.3, 1.2}, {0.3, 1.2}, {0.2, 1.0}},
                             {Guard{denom, 1e-2}});
    WeylStructure ws;
    ws.chart = chart;
    ws.h.base = make_tensor(
        chart, "ll", [Ac, Bc](const std::vector<Jet>& xs, const std::vector<int>& idx) {
            const Jet &p = xs[0], &q = xs[1];
            Jet a = Ac(xs), b = Bc(xs);
            int i = idx[0], j = idx[1];
            if (i > j) std::swap(i, j);
            if (i == 2 && j == 2)
                return (b + p * p + q) * (b * q - a * p + q * q) -
                       (p * q + a) * (p * q + a);
            if (i == 1 && j == 2) return (b + p * p + q) * 0.5;
            if (i == 0 && j == 2) return (p * q + a) * (-0.5);
            if (i == 0 && j == 0) return constant(-0.25, xs[0].config());
            return constant(0.0, xs[0].config());
        });
    ws.h.orientation = +1;
    ws.omega = make_tensor(
        chart, "l", [Ac, Bc](const std::vector<Jet>& xs, const std::vector<int>& idx) {
            const Jet &p = xs[0], &q = xs[1];
            Jet V = 1.0 / (Bc(xs) + p * p + q);
            if (idx[0] == 0) return V * p * 2.0;
            if (idx[0] == 1) return V * 4.0;
            return constant(0.0, xs[0].config());
        });
    return ws;
}

WeylStructure cubic_reduction_pair() {
    // det h = 4 (u - w + 4)^2 / u, so one guard suffices (u > 0 on the box).
    ScalarField e{3, [](const std::vector<Jet>& xs) { return xs[0] - xs[2] + 4.0; }};
    Chart chart = make_chart({"u", "v", "w"},
                             {{0.2, 1.5}, {-1.0, 1.0}, {0.3, 1.2}},
                             {Guard{e, 1e-2}});
    WeylStructure ws;
    ws.chart = chart;
    ws.h.base = make_tensor(
        chart, "ll", [](const std::vector<Jet>& xs, const std::vector<int>& idx) {
            const Jet &u = xs[0], &w = xs[2];
            int i = idx[0], j = idx[1];
            if (i > j) std::swap(i, j);
            if (i == 0 && j == 0) return -1.0 / u;
            if (i == 0 && j == 1) return -1.0 * w;
            if (i == 1 && j == 1) return -w * (w * w + u - 5.0 * w + 4.0);
            if (i == 1 && j == 2) return (u - w + 4.0) * 2.0;
            return constant(0.0, xs[0].config());
        });
    ws.h.orientation = +1;
    ws.omega = make_tensor(
        chart, "l", [](const std::vector<Jet>& xs, const std::vector<int>& idx) {
            const Jet &u = xs[0], &w = xs[2];
            Jet V = 1.0 / (u - w + 4.0);
            if (idx[0] == 0) return V;
            if (idx[0] == 1) return V * w * (-3.0);
            return V * (-4.0);
        });
    return ws;
}

}  // namespace tg
