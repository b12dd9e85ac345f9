#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "tg/projective.hpp"

using namespace tg;

namespace {

Chart plane(double lo = -1.0, double hi = 1.0) {
    return make_chart({"x", "y"}, {{lo, hi}, {lo, hi}});
}

// Representative connection of the structure whose geodesics solve
// y'' = -(y - x y')^3: symbols cubic in (x, y).
ProjectiveStructure cubic_structure() {
    ProjectiveStructure ps;
    ps.chart = plane();
    ps.gamma = make_tensor(ps.chart, "ull",
                           [](const std::vector<Jet>& xs, const std::vector<int>& idx) {
                               const Jet& x = xs[0];
                               const Jet& y = xs[1];
                               int c = idx[0], a = idx[1], b = idx[2];
                               if (a > b) std::swap(a, b);
                               if (c == 0 && a == 0 && b == 0) return x * y * y;
                               if (c == 1 && a == 0 && b == 0) return y * y * y;
                               if (c == 0 && a == 0 && b == 1) return -1.0 * x * x * y;
                               if (c == 1 && a == 0 && b == 1) return -1.0 * x * y * y;
                               if (c == 0 && a == 1 && b == 1) return x * x * x;
                               if (c == 1 && a == 1 && b == 1) return x * x * y;
                               return constant(0.0, xs[0].config());
                           });
    return ps;
}

TensorField one_form(const Chart& chart, std::function<Jet(const std::vector<Jet>&)> u0,
                     std::function<Jet(const std::vector<Jet>&)> u1) {
    return make_tensor(chart, "l", {{2, u0}, {2, u1}});
}

TensorField vec(const Chart& chart, std::function<Jet(const std::vector<Jet>&)> v0,
                std::function<Jet(const std::vector<Jet>&)> v1) {
    return make_tensor(chart, "u", {{2, v0}, {2, v1}});
}

ScalarField of_y(std::function<Jet(const Jet&)> f) {
    return {2, [f](const std::vector<Jet>& xs) { return f(xs[1]); }};
}

}  // namespace

TEST_CASE("ode coefficients") {
    auto flat = flat_structure(plane());
    auto c = ode_coefficients(flat);
    Point p = {0.3, -0.4};
    CHECK(c.a0.value(p) == 0.0);
    CHECK(c.a1.value(p) == 0.0);
    CHECK(c.a2.value(p) == 0.0);
    CHECK(c.a3.value(p) == 0.0);

    double bval = 0.7;
    auto nf = normal_form_structure(of_y([](const Jet& y) { return sin(y); }),
                                    of_y([bval](const Jet& y) { return constant(bval, y.config()); }),
                                    plane());
    auto cn = ode_coefficients(nf);
    CHECK(cn.a0.value(p) == doctest::Approx(-1.0));
    CHECK(cn.a1.value(p) == doctest::Approx(0.0));
    CHECK(cn.a2.value(p) == doctest::Approx(-bval / 3.0));
    CHECK(cn.a3.value(p) == doctest::Approx(-std::sin(p[1])));

    // projective invariance of the coefficients
    auto ups = one_form(plane(),
                        [](const std::vector<Jet>& xs) { return 0.5 * xs[0] + xs[1] * xs[1]; },
                        [](const std::vector<Jet>& xs) { return cos(xs[0]) * xs[1]; });
    auto shifted = apply_upsilon(nf, ups);
    auto cs = ode_coefficients(shifted);
    std::mt19937_64 rng(3);
    for (int t = 0; t < 20; ++t) {
        auto q = plane().sample(rng);
        CHECK(std::abs(cs.a0.value(q) - cn.a0.value(q)) < 1e-12);
        CHECK(std::abs(cs.a1.value(q) - cn.a1.value(q)) < 1e-12);
        CHECK(std::abs(cs.a2.value(q) - cn.a2.value(q)) < 1e-12);
        CHECK(std::abs(cs.a3.value(q) - cn.a3.value(q)) < 1e-12);
    }
}

TEST_CASE("change of representative connection") {
    auto flat = flat_structure(plane());
    auto zero = one_form(plane(),
                         [](const std::vector<Jet>& xs) { return constant(0.0, xs[0].config()); },
                         [](const std::vector<Jet>& xs) { return constant(0.0, xs[0].config()); });
    auto same = apply_upsilon(flat, zero);
    Point p = {0.2, 0.5};
    CHECK(fro_norm(same.gamma.at(p, 1) - flat.gamma.at(p, 1)) == 0.0);

    auto dy = one_form(plane(),
                       [](const std::vector<Jet>& xs) { return constant(0.0, xs[0].config()); },
                       [](const std::vector<Jet>& xs) { return constant(1.0, xs[0].config()); });
    auto shifted = apply_upsilon(flat, dy);
    auto gj = shifted.gamma.at(p, 0);
    for (int c = 0; c < 2; ++c)
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                double want = 0;
                if (c == 0 && ((a == 0 && b == 1) || (a == 1 && b == 0))) want = 1;
                if (c == 1 && a == 1 && b == 1) want = 2;
                CHECK(gj.at({c, a, b}).value() == doctest::Approx(want));
            }
}

TEST_CASE("Schouten transformation under change of representative") {
    auto ps = cubic_structure();
    auto ups = one_form(ps.chart,
                        [](const std::vector<Jet>& xs) { return xs[0] * xs[1] - 0.3; },
                        [](const std::vector<Jet>& xs) { return sin(xs[0]) + 0.2 * xs[1]; });
    auto shifted = apply_upsilon(ps, ups);
    std::mt19937_64 rng(5);
    for (int t = 0; t < 20; ++t) {
        auto p = ps.chart.sample(rng);
        auto P = schouten_at(ps.gamma.at(p, 2), 2);
        auto Ph = schouten_at(shifted.gamma.at(p, 2), 2);
        auto u = ups.at(p, 1);
        auto gradu = covariant_derivative(ps.gamma.at(p, 1), u, "l");  // (A, B)
        auto want = truncate(P, 0) + tensor_product(truncate(u, 0), truncate(u, 0)) -
                    truncate(gradu, 0);
        CHECK(fro_norm(truncate(Ph, 0) - want) < 1e-10);
    }
}

TEST_CASE("Schouten against a finite-difference Ricci oracle") {
    auto nf = normal_form_structure(
        of_y([](const Jet& y) { return constant(0.0, y.config()); }),
        of_y([](const Jet& y) { return constant(0.8, y.config()); }), plane());
    std::mt19937_64 rng(7);
    for (int t = 0; t < 5; ++t) {
        auto p = nf.chart.sample(rng);
        auto P = schouten_at(nf.gamma.at(p, 1), 2);
        const double h = 1e-5;
        auto G = [&](const Point& q, int c, int a, int b) {
            return nf.gamma.at(q, 0).at({c, a, b}).value();
        };
        double ric[2][2];
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                double s = 0;
                for (int c = 0; c < 2; ++c) {
                    Point pp = p, pm = p;
                    pp[c] += h;
                    pm[c] -= h;
                    s += (G(pp, c, a, b) - G(pm, c, a, b)) / (2 * h);
                    Point qp = p, qm = p;
                    qp[a] += h;
                    qm[a] -= h;
                    s -= (G(qp, c, c, b) - G(qm, c, c, b)) / (2 * h);
                    for (int e = 0; e < 2; ++e)
                        s += G(p, c, c, e) * G(p, e, a, b) - G(p, c, a, e) * G(p, e, c, b);
                }
                ric[a][b] = s;
            }
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                double want = 0.5 * (ric[a][b] + ric[b][a]) + (ric[a][b] - ric[b][a]) / 6.0;
                CHECK(P.at({a, b}).value() == doctest::Approx(want).epsilon(1e-6));
            }
    }
}

TEST_CASE("cubic structure has symmetric Schouten tensor") {
    auto ps = cubic_structure();
    auto ode = ode_coefficients(ps);
    std::mt19937_64 rng(9);
    for (int t = 0; t < 20; ++t) {
        auto p = ps.chart.sample(rng);
        // coefficients of y'' = -(y - x y')^3
        CHECK(ode.a0.value(p) == doctest::Approx(std::pow(p[1], 3)));
        CHECK(ode.a1.value(p) == doctest::Approx(-p[0] * p[1] * p[1]));
        CHECK(ode.a2.value(p) == doctest::Approx(p[0] * p[0] * p[1]));
        CHECK(ode.a3.value(p) == doctest::Approx(-std::pow(p[0], 3)));
        auto P = schouten_at(ps.gamma.at(p, 1), 2);
        CHECK(std::abs(P.at({0, 1}).value() - P.at({1, 0}).value()) < 1e-11);
    }
}

TEST_CASE("Cotton residual detects flatness") {
    auto flat = flat_structure(plane());
    std::mt19937_64 rng(11);
    CHECK(cotton_residual(flat, plane().sample(rng)) == 0.0);

    auto nf_const = normal_form_structure(
        of_y([](const Jet& y) { return constant(0.4, y.config()); }),
        of_y([](const Jet& y) { return constant(-1.2, y.config()); }), plane());
    for (int t = 0; t < 50; ++t)
        CHECK(cotton_residual(nf_const, plane().sample(rng)) < 1e-11);

    auto nf_ay = normal_form_structure(of_y([](const Jet& y) { return y; }),
                                       of_y([](const Jet& y) { return constant(0.0, y.config()); }),
                                       plane());
    int big = 0;
    for (int t = 0; t < 20; ++t)
        if (cotton_residual(nf_ay, plane().sample(rng)) > 1e-4) ++big;
    CHECK(big == 20);

    // flatness is projectively invariant
    auto ups = one_form(plane(),
                        [](const std::vector<Jet>& xs) { return xs[0] - 0.1 * xs[1]; },
                        [](const std::vector<Jet>& xs) { return xs[1] * xs[0]; });
    auto shifted_flat = apply_upsilon(nf_const, ups);
    auto shifted_curved = apply_upsilon(nf_ay, ups);
    for (int t = 0; t < 10; ++t) {
        auto p = plane().sample(rng);
        CHECK(cotton_residual(shifted_flat, p) < 1e-11);
        CHECK(cotton_residual(shifted_curved, p) > 1e-4);
    }
}

TEST_CASE("projective vector certification") {
    auto nf = normal_form_structure(of_y([](const Jet& y) { return y * y; }),
                                    of_y([](const Jet& y) { return sin(y); }), plane());
    auto dx = vec(plane(), [](const std::vector<Jet>& xs) { return constant(1.0, xs[0].config()); },
                  [](const std::vector<Jet>& xs) { return constant(0.0, xs[0].config()); });
    std::mt19937_64 rng(13);
    for (int t = 0; t < 10; ++t) {
        auto p = plane().sample(rng);
        auto rep = projective_vector_residual(nf, dx, p);
        CHECK(rep.residual < 1e-11);
        CHECK(std::abs(rep.upsilon[0]) < 1e-11);
        CHECK(std::abs(rep.upsilon[1]) < 1e-11);
    }

    auto ps = cubic_structure();
    auto ydx = vec(ps.chart, [](const std::vector<Jet>& xs) { return xs[1]; },
                   [](const std::vector<Jet>& xs) { return constant(0.0, xs[0].config()); });
    for (int t = 0; t < 10; ++t) {
        auto p = ps.chart.sample(rng);
        auto rep = projective_vector_residual(ps, ydx, p);
        CHECK(rep.residual < 1e-10);
    }

    auto nf_ay = normal_form_structure(of_y([](const Jet& y) { return y; }),
                                       of_y([](const Jet& y) { return constant(0.0, y.config()); }),
                                       plane());
    auto x2dy = vec(plane(), [](const std::vector<Jet>& xs) { return constant(0.0, xs[0].config()); },
                    [](const std::vector<Jet>& xs) { return xs[0] * xs[0]; });
    int big = 0;
    for (int t = 0; t < 10; ++t)
        if (projective_vector_residual(nf_ay, x2dy, plane().sample(rng)).residual > 1e-3) ++big;
    CHECK(big == 10);

    // the fitted one-form field agrees with the pointwise fit
    auto uf = upsilon_field(ps, ydx);
    auto p = ps.chart.sample(rng);
    auto u = uf.at(p, 1);
    auto rep = projective_vector_residual(ps, ydx, p);
    CHECK(u.c[0].value() == doctest::Approx(rep.upsilon[0]).epsilon(1e-12));
    CHECK(u.c[1].value() == doctest::Approx(rep.upsilon[1]).epsilon(1e-12));
    const double h = 1e-5;
    Point pp = p, pm = p;
    pp[0] += h;
    pm[0] -= h;
    double fd = (projective_vector_residual(ps, ydx, pp).upsilon[1] -
                 projective_vector_residual(ps, ydx, pm).upsilon[1]) /
                (2 * h);
    CHECK(derivative(u.c[1], 0).value() == doctest::Approx(fd).epsilon(1e-5));
}
