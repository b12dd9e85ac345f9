#include "tg/toda.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>

#include "tg/curvature.hpp"

namespace tg {

namespace {

// ---- polynomial-in-w plumbing for implicit branches ----

// Coefficients of poly(w, X, Y, Z) as a polynomial in w at a fixed point.
std::vector<double> wpoly_coeffs(const ImplicitTodaSolution& sol, const Point& x) {
    JetConfig cfg{1, kMaxOrder};
    std::vector<Jet> args{seed(0, 0.0, cfg), constant(x[0], cfg),
                          constant(x[1], cfg), constant(x[2], cfg)};
    return sol.poly(args).coeffs();
}

double peval(const std::vector<double>& c, int deg, double w) {
    double v = 0;
    for (int i = deg; i >= 0; --i) v = v * w + c[i];
    return v;
}

double pder(const std::vector<double>& c, int deg, double w) {
    double v = 0;
    for (int i = deg; i >= 1; --i) v = v * w + i * c[i];
    return v;
}

std::vector<std::complex<double>> poly_roots(const std::vector<double>& c, int deg) {
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
    for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -c[i] / c[deg];
    for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp);
    std::vector<std::complex<double>> roots(deg);
    for (int i = 0; i < deg; ++i) roots[i] = es.eigenvalues()(i);
    return roots;
}

// One continuation step: the root of poly(., x) nearest to w, with the
// separation and reality monitors.
double step_root(const ImplicitTodaSolution& sol, const Point& x, double w) {
    auto c = wpoly_coeffs(sol, x);
    double m = 0;
    for (double v : c) m = std::max(m, std::abs(v));
    if (m == 0) throw TodaError("relation identically zero in w at a path point");
    int deg = static_cast<int>(c.size()) - 1;
    while (deg > 0 && std::abs(c[deg]) < 1e-13 * m) --deg;
    if (deg == 0) throw TodaError("relation has no root in w at a path point");
    auto roots = poly_roots(c, deg);
    int best = 0;
    double bestd = std::abs(roots[0] - std::complex<double>(w, 0.0));
    for (int i = 1; i < deg; ++i) {
        double d = std::abs(roots[i] - std::complex<double>(w, 0.0));
        if (d < bestd) { bestd = d; best = i; }
    }
    if (std::abs(roots[best].imag()) > 1e-6 * (1.0 + std::abs(roots[best].real())))
        throw TodaError("lost the real branch during continuation");
    double sep = 1e300;
    for (int i = 0; i < deg; ++i)
        if (i != best) sep = std::min(sep, std::abs(roots[i] - roots[best]));
    if (sep < 1e-8) throw TodaError("branch collision during continuation");
    double r = roots[best].real();
    for (int it = 0; it < 40; ++it) {
        double f = peval(c, deg, r), fp = pder(c, deg, r);
        if (fp == 0) break;
        double rn = r - f / fp;
        if (std::abs(rn - r) < 1e-15 * (1.0 + std::abs(r))) { r = rn; break; }
        r = rn;
    }
    if (std::abs(pder(c, deg, r)) < 1e-10 * std::max(1.0, m))
        throw TodaError("vanishing w-derivative at the root");
    return r;
}

double track_branch(const ImplicitTodaSolution& sol, const Point& p) {
    const int steps = 64;
    double w = step_root(sol, sol.seed, sol.seed_w);
    for (int t = 1; t <= steps; ++t) {
        Point x(3);
        for (int i = 0; i < 3; ++i)
            x[i] = sol.seed[i] + (p[i] - sol.seed[i]) * t / steps;
        w = step_root(sol, x, w);
    }
    return w;
}

// ---- 3x3 linear algebra on doubles ----

double det3(const double j[3][3]) {
    return j[0][0] * (j[1][1] * j[2][2] - j[1][2] * j[2][1]) -
           j[0][1] * (j[1][0] * j[2][2] - j[1][2] * j[2][0]) +
           j[0][2] * (j[1][0] * j[2][1] - j[1][1] * j[2][0]);
}

void inv3(const double j[3][3], double a[3][3]) {
    double d = det3(j);
    a[0][0] = (j[1][1] * j[2][2] - j[1][2] * j[2][1]) / d;
    a[0][1] = (j[0][2] * j[2][1] - j[0][1] * j[2][2]) / d;
    a[0][2] = (j[0][1] * j[1][2] - j[0][2] * j[1][1]) / d;
    a[1][0] = (j[1][2] * j[2][0] - j[1][0] * j[2][2]) / d;
    a[1][1] = (j[0][0] * j[2][2] - j[0][2] * j[2][0]) / d;
    a[1][2] = (j[0][2] * j[1][0] - j[0][0] * j[1][2]) / d;
    a[2][0] = (j[1][0] * j[2][1] - j[1][1] * j[2][0]) / d;
    a[2][1] = (j[0][1] * j[2][0] - j[0][0] * j[2][1]) / d;
    a[2][2] = (j[0][0] * j[1][1] - j[0][1] * j[1][0]) / d;
}

// ---- adaptive Simpson quadrature ----

double simpson_rec(const std::function<double(double)>& f, double a, double b,
                   double fa, double fm, double fb, double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

double quad(const std::function<double(double)>& f, double a, double b, double tol) {
    if (a == b) return 0.0;
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 48);
}

// ---- the rescaled self-dual derivative of the symmetry ----

struct ThetaJet {
    Jet c;
    JTensor theta;
};

ThetaJet theta_at(const MetricField& g4, const TensorField& k, const Point& p,
                  int order, int so) {
    if (so == 0) so = g4.orientation;
    int dim = g4.chart().dim;
    JTensor G = g4.base.at(p, order + 1);
    JTensor K = k.at(p, order + 1);
    JTensor Kl = contract(tensor_product(G, K), 1, 2);
    JTensor dK = ext_d(Kl);
    JTensor Gn = truncate(G, order);
    JTensor Gi = inverse(Gn);
    JTensor F = dK + hodge_star(Gn, so, dK);
    Jet N = constant(0.0, jconfig(F));
    for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b)
            for (int cc = 0; cc < dim; ++cc)
                for (int d = 0; d < dim; ++d)
                    N += Gi.at({a, cc}) * Gi.at({b, d}) * F.at({a, b}) * F.at({cc, d});
    if (std::abs(N.value()) < 1e-10)
        throw TodaError("vanishing self-dual derivative of the symmetry");
    Jet c = 4.0 / abs_sqrt(N);
    ThetaJet out;
    out.c = c;
    out.theta = F * (c * c * c * 0.5);
    return out;
}

// dZ_a = theta_{ba} K^b (the symmetry slotted into the first index).
JTensor moment_form(const MetricField& g4, const TensorField& k, const Point& p,
                    int order, int so) {
    auto th = theta_at(g4, k, p, order, so);
    return interior(truncate(k.at(p, order), order), th.theta) * (-1.0);
}

// Assemble an order-n jet from its value and the jets (order n-1) of its
// gradient: Taylor coefficient at alpha = grad_i coefficient at alpha - e_i,
// divided by alpha_i.
Jet jet_from_gradient(double value, const JTensor& grad, int n) {
    JetConfig cfg{grad.dim, n};
    Jet out = constant(value, cfg);
    const JetTables& tab = tables(cfg);
    for (int f = 1; f < tab.size(); ++f) {
        MultiIndex a = tab.idx[f];
        int i = 0;
        while (a[i] == 0) ++i;
        MultiIndex b = a;
        b[i] -= 1;
        int pos = grad.c[0].tab().position(b);
        out[f] = grad.at({i})[pos] / a[i];
    }
    return out;
}

}  // namespace

double toda_residual(const ScalarField& U, double epsilon, const Point& p) {
    if (U.dim != 3) throw TodaError("toda_residual expects a scalar of (X, Y, Z)");
    Jet u = U.at(p, 2);
    double uxx = partial(u, {2, 0, 0});
    double uyy = partial(u, {0, 2, 0});
    double euzz = partial(exp(u), {0, 0, 2});
    return std::abs(uxx + uyy - epsilon * euzz) /
           (1.0 + std::abs(uxx) + std::abs(uyy) + std::abs(euzz));
}

Jet implicit_eval(const ImplicitTodaSolution& sol, const Point& p, int order) {
    if (!sol.box.admits(p)) throw TodaError("point outside the sampling box");
    if (order + 1 > kMaxOrder) throw TodaError("implicit_eval order too high");
    double w = track_branch(sol, p);
    if (w <= 0) throw TodaError("no positive real root on the branch");
    JetConfig cfg4{4, order + 1};
    std::vector<Jet> args{seed(3, w, cfg4), seed(0, p[0], cfg4),
                          seed(1, p[1], cfg4), seed(2, p[2], cfg4)};
    Jet F = sol.poly(args);
    Jet Fw = derivative(F, 3);
    JetConfig cfg3{3, order};
    std::vector<Jet> delta{seed(0, 0.0, cfg3), seed(1, 0.0, cfg3),
                           seed(2, 0.0, cfg3), constant(0.0, cfg3)};
    for (int it = 0; it <= order; ++it) {
        Jet num = compose(F, delta);
        Jet den = compose(Fw, delta);
        Jet corr = num / den;
        // keep the constant term of delta at exactly zero: w already carries
        // the root value to machine precision, so the constant correction is
        // roundoff and dropping it only avoids tripping compose's check
        corr -= constant(corr.value(), corr.config());
        delta[3] -= corr;
    }
    return log(delta[3] + w);
}

ScalarField implicit_field(const ImplicitTodaSolution& sol) {
    return field_from_evaluator(3, [sol](const Point& p, int order) {
        return implicit_eval(sol, p, order);
    });
}

double parametric_residual(const ParametricTodaSolution& sol, double epsilon,
                           const Point& t) {
    Jet jx = sol.x.at(t, 2), jy = sol.y.at(t, 2), jz = sol.z.at(t, 2);
    Jet ju = sol.u.at(t, 2);
    const Jet* maps[3] = {&jx, &jy, &jz};
    double J[3][3];
    for (int i = 0; i < 3; ++i)
        for (int kk = 0; kk < 3; ++kk) {
            MultiIndex a{};
            a[kk] = 1;
            J[i][kk] = partial(*maps[i], a);
        }
    double scale = 0;
    for (auto& row : J)
        for (double v : row) scale = std::max(scale, std::abs(v));
    if (std::abs(det3(J)) < 1e-10 * std::max(1.0, scale * scale * scale))
        throw TodaError("singular parametrization Jacobian");
    double A[3][3];  // A[k][i] = dt_k / dx_i
    inv3(J, A);
    auto p2 = [](const Jet& f, int k, int l) {
        MultiIndex a{};
        a[k] += 1;
        a[l] += 1;
        return partial(f, a);
    };
    double gu[3];  // du/dt_k
    for (int k = 0; k < 3; ++k) {
        MultiIndex a{};
        a[k] = 1;
        gu[k] = partial(ju, a);
    }
    double gx[3];  // du/dx_i
    for (int i = 0; i < 3; ++i) {
        gx[i] = 0;
        for (int k = 0; k < 3; ++k) gx[i] += gu[k] * A[k][i];
    }
    auto hess = [&](int a, int b) {
        double s = 0;
        for (int k = 0; k < 3; ++k)
            for (int l = 0; l < 3; ++l) {
                double inner = p2(ju, k, l);
                for (int m = 0; m < 3; ++m) inner -= gx[m] * p2(*maps[m], k, l);
                s += A[k][a] * A[l][b] * inner;
            }
        return s;
    };
    double uxx = hess(0, 0), uyy = hess(1, 1), uzz = hess(2, 2);
    double euzz = std::exp(ju.value()) * (uzz + gx[2] * gx[2]);
    return std::abs(uxx + uyy - epsilon * euzz) /
           (1.0 + std::abs(uxx) + std::abs(uyy) + std::abs(euzz));
}

ParametricTodaSolution toda_family(const ScalarField& IB, const ScalarField& I2) {
    ParametricTodaSolution sol;
    sol.params = make_chart({"y", "p", "Z"}, {{-0.8, 0.8}, {0.25, 1.4}, {0.6, 1.6}});
    auto ib = IB.fn, i2 = I2.fn;
    sol.x = {3, [ib](const std::vector<Jet>& xs) {
                 Jet E = exp(ib(xs) * (-2.0));
                 Jet D = xs[2] * xs[2] * xs[1] * xs[1] + 4.0;
                 return -8.0 * E * xs[2] * xs[2] * xs[2] * xs[1] / (D * D);
             }};
    sol.y = {3, [ib, i2](const std::vector<Jet>& xs) {
                 Jet E = exp(ib(xs) * (-2.0));
                 Jet Z2 = xs[2] * xs[2];
                 Jet D = Z2 * xs[1] * xs[1] + 4.0;
                 return i2(xs) + E * (8.0 * Z2 - 2.0 * Z2 * Z2 * xs[1] * xs[1]) / (D * D);
             }};
    sol.z = {3, [](const std::vector<Jet>& xs) { return xs[2]; }};
    sol.u = {3, [ib](const std::vector<Jet>& xs) {
                 Jet D = xs[2] * xs[2] * xs[1] * xs[1] + 4.0;
                 return 3.0 * log(D) - std::log(64.0) - 2.0 * log(xs[2]) + 4.0 * ib(xs);
             }};
    return sol;
}

ScalarField antiderivative(std::function<Jet(const Jet&)> integrand, double y0,
                           double base, int dim, int slot) {
    return field_from_evaluator(dim, [integrand, y0, base, slot, dim](const Point& p, int n) {
        double y = p[slot];
        auto f0 = [&integrand](double t) {
            return integrand(constant(t, JetConfig{1, 0})).value();
        };
        double value = base + quad(f0, y0, y, 1e-12);
        std::vector<double> t(n + 1);
        t[0] = value;
        if (n >= 1) {
            Jet f1 = integrand(seed(0, y, JetConfig{1, n - 1}));
            for (int k = 1; k <= n; ++k) t[k] = f1[k - 1] / k;
        }
        return compose_univariate(t, seed(slot, y, JetConfig{dim, n}));
    });
}

WeylStructure build_toda_ew(const ScalarField& U, double epsilon, const Chart& chart) {
    if (chart.dim != 3 || U.dim != 3)
        throw TodaError("build_toda_ew expects a 3D chart with slots (X, Y, Z)");
    WeylStructure ws;
    ws.chart = chart;
    auto u = U.fn;
    ws.h.base = make_tensor(chart, "ll",
                            [u, epsilon](const std::vector<Jet>& xs, const std::vector<int>& idx) {
                                if (idx[0] != idx[1]) return constant(0.0, xs[0].config());
                                if (idx[0] == 2) return constant(-epsilon, xs[0].config());
                                return exp(u(xs));
                            });
    ws.h.orientation = +1;
    ScalarField uz = field_from_evaluator(3, [U](const Point& p, int n) {
        return derivative(U.at(p, n + 1), 2);
    });
    auto uzfn = uz.fn;
    ws.omega = make_tensor(chart, "l",
                           {sf_constant(3, 0.0), sf_constant(3, 0.0),
                            {3, [uzfn](const std::vector<Jet>& xs) { return uzfn(xs) * 2.0; }}});
    return ws;
}

double dstar_du_residual(const WeylStructure& ws, const ScalarField& U, const Point& p) {
    MetricField h = ws.h;
    TensorField star = tensorfield_from_evaluator(
        ws.chart, "ll", [h, U](const Point& q, int n) {
            JTensor H = h.base.at(q, n);
            Jet u = U.at(q, n + 1);
            JTensor du(3, 1, JetConfig{3, n});
            for (int i = 0; i < 3; ++i) du.at({i}) = derivative(u, i);
            return hodge_star(H, h.orientation, du);
        });
    return fro_norm(ext_d(star.at(p, 1)));
}

TodStep1 tod_step1(const MetricField& g4, const TensorField& k, const Point& p,
                   int star_orientation) {
    auto th = theta_at(g4, k, p, 2, star_orientation);
    JTensor ghat = truncate(g4.base.at(p, 2), 2) * (th.c * th.c);
    JTensor gam = christoffel_at(ghat);
    JTensor theta1 = truncate(th.theta, 1);
    JTensor cd = covariant_derivative(gam, theta1, "ll");
    TodStep1 out;
    out.c = th.c.value();
    out.theta = theta1;
    out.parallel_res = fro_norm(cd) / std::max(fro_norm(theta1), 1.0);
    JTensor K = k.at(p, 0);
    Jet lkc = constant(0.0, JetConfig{g4.chart().dim, 0});
    for (int i = 0; i < g4.chart().dim; ++i)
        lkc += K.at({i}) * truncate(derivative(th.c, i), 0);
    out.lkc = std::abs(lkc.value());
    return out;
}

MomentReport tod_step2_moment(const MetricField& g4, const TensorField& k,
                              const std::vector<Point>& polyline, double z0,
                              int star_orientation) {
    if (polyline.empty()) throw TodaError("empty polyline");
    MomentReport rep;
    rep.z.push_back(z0);
    int dim = g4.chart().dim;
    for (size_t s = 1; s < polyline.size(); ++s) {
        const Point& a = polyline[s - 1];
        const Point& b = polyline[s];
        auto f = [&](double t) {
            Point x(dim);
            for (int i = 0; i < dim; ++i) x[i] = a[i] + t * (b[i] - a[i]);
            JTensor mu = moment_form(g4, k, x, 0, star_orientation);
            double v = 0;
            for (int i = 0; i < dim; ++i) v += mu.at({i}).value() * (b[i] - a[i]);
            return v;
        };
        rep.z.push_back(rep.z.back() + quad(f, 0.0, 1.0, 1e-12));
    }
    for (const Point& v : polyline) {
        JTensor mu = moment_form(g4, k, v, 1, star_orientation);
        rep.closedness = std::max(rep.closedness, fro_norm(ext_d(mu)));
    }
    return rep;
}

ScalarField moment_map_field(const MetricField& g4, const TensorField& k,
                             const Point& base, double z_base, int star_orientation) {
    int dim = g4.chart().dim;
    return field_from_evaluator(dim, [g4, k, base, z_base, star_orientation,
                                      dim](const Point& q, int n) {
        auto f = [&](double t) {
            Point x(dim);
            for (int i = 0; i < dim; ++i) x[i] = base[i] + t * (q[i] - base[i]);
            JTensor mu = moment_form(g4, k, x, 0, star_orientation);
            double v = 0;
            for (int i = 0; i < dim; ++i) v += mu.at({i}).value() * (q[i] - base[i]);
            return v;
        };
        double value = z_base + quad(f, 0.0, 1.0, 1e-12);
        if (n == 0) return constant(value, JetConfig{dim, 0});
        JTensor grad = moment_form(g4, k, q, n - 1, star_orientation);
        return jet_from_gradient(value, grad, n);
    });
}

double toda_form_check(const MetricField& g4, const TensorField& k,
                       const ScalarField& X, const ScalarField& Y,
                       const ScalarField& Z, const ScalarField& U,
                       double epsilon, const Point& p, int star_orientation,
                       int y_sign) {
    int dim = g4.chart().dim;
    auto th = theta_at(g4, k, p, 1, star_orientation);
    JTensor G = truncate(g4.base.at(p, 1), 1);
    JTensor gh = G * (th.c * th.c);
    JTensor K = k.at(p, 1);
    JTensor Kh = contract(tensor_product(gh, K), 1, 2);
    Jet k2 = contract(tensor_product(Kh, K), 0, 1).c[0];
    JTensor P = truncate(gh * k2 - tensor_product(Kh, Kh), 0);
    auto diff = [dim, &p](const ScalarField& f) {
        Jet j = f.at(p, 1);
        JTensor d(dim, 1, JetConfig{dim, 0});
        for (int i = 0; i < dim; ++i) d.at({i}) = derivative(j, i);
        return d;
    };
    JTensor dX = diff(X), dY = diff(Y), dZ = diff(Z);
    double eu = std::exp(U.value(p));
    JTensor rhs = (tensor_product(dX, dX) + tensor_product(dY, dY) * double(y_sign)) * eu +
                  tensor_product(dZ, dZ) * (-epsilon);
    return fro_norm(P - rhs) / std::max(fro_norm(P), 1e-12);
}

MetricField gibbons_hawking() {
    auto chart = make_chart({"x", "y", "z", "t"},
                            {{-1.2, 1.2}, {-1.2, 1.2}, {0.5, 2.2}, {-1.0, 1.0}});
    MetricField g;
    g.base = make_tensor(chart, "ll",
                         [](const std::vector<Jet>& xs, const std::vector<int>& idx) {
                             const Jet &x = xs[0], &y = xs[1], &z = xs[2];
                             int a = std::min(idx[0], idx[1]), b = std::max(idx[0], idx[1]);
                             if (a == 0 && b == 0) return z + y * y / (4.0 * z);
                             if (a == 1 && b == 1) return z + x * x / (4.0 * z);
                             if (a == 2 && b == 2) return z + 0.0;
                             if (a == 3 && b == 3) return 1.0 / z;
                             if (a == 0 && b == 1) return -1.0 * x * y / (4.0 * z);
                             if (a == 0 && b == 3) return -1.0 * y / (2.0 * z);
                             if (a == 1 && b == 3) return x / (2.0 * z);
                             return constant(0.0, xs[0].config());
                         });
    g.orientation = +1;
    return g;
}

}  // namespace tg
