#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "tg/dm_einstein.hpp"

using namespace tg;

namespace {

Chart plane(double lo = -1.0, double hi = 1.0) {
    return make_chart({"x", "y"}, {{lo, hi}, {lo, hi}});
}

ScalarField of_y(std::function<Jet(const Jet&)> f) {
    return {2, [f](const std::vector<Jet>& xs) { return f(xs[1]); }};
}

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

// Generic 2D connection with non-symmetric Ricci (exercises both Schouten parts).
ProjectiveStructure generic_structure() {
    ProjectiveStructure ps;
    ps.chart = plane();
    ps.gamma = make_tensor(ps.chart, "ull",
                           [](const std::vector<Jet>& xs, const std::vector<int>& idx) {
                               const Jet& x = xs[0];
                               const Jet& y = xs[1];
                               int c = idx[0], a = idx[1], b = idx[2];
                               if (a > b) std::swap(a, b);
                               double w = 0.1 * (1 + c + 2 * a + 4 * b);
                               return w * (x * x * y + (c ? sin(x) : cos(y)) - 0.3 * x);
                           });
    return ps;
}

TensorField zero_gamma(const Chart& chart, int n) {
    return make_tensor(chart, "ull", [](const std::vector<Jet>& xs, const std::vector<int>&) {
        return constant(0.0, xs[0].config());
    });
}

double max_coeff_abs(const JTensor& a) {
    double m = 0;
    for (const auto& x : a.c)
        for (double cc : x.coeffs()) m = std::max(m, std::abs(cc));
    return m;
}

}  // namespace

TEST_CASE("flat structure reproduces the model metric and symplectic form") {
    auto dm = build_dm(flat_structure(plane()), 1.0);
    std::mt19937_64 rng(3);
    for (int t = 0; t < 10; ++t) {
        auto pt = dm.chart.sample(rng);
        double p = pt[2], q = pt[3];
        auto g = dm.metric.base.at(pt, 0);
        CHECK(g.at({0, 0}).value() == doctest::Approx(p * p).epsilon(1e-13));
        CHECK(g.at({0, 1}).value() == doctest::Approx(p * q).epsilon(1e-13));
        CHECK(g.at({1, 1}).value() == doctest::Approx(q * q).epsilon(1e-13));
        CHECK(g.at({0, 2}).value() == doctest::Approx(0.5));
        CHECK(g.at({1, 3}).value() == doctest::Approx(0.5));
        CHECK(g.at({0, 3}).value() == 0.0);
        CHECK(g.at({2, 2}).value() == 0.0);
        auto w = dm.omega.at(pt, 0);
        CHECK(w.at({2, 0}).value() == 1.0);
        CHECK(w.at({3, 1}).value() == 1.0);
        CHECK(w.at({0, 1}).value() == 0.0);
        // potential is z_A dx^A for the flat structure
        auto A = dm.potential.at(pt, 0);
        CHECK(A.c[0].value() == doctest::Approx(p));
        CHECK(A.c[1].value() == doctest::Approx(q));
        CHECK(A.c[2].value() == 0.0);
    }
    CHECK_THROWS_AS(build_dm(flat_structure(plane()), 0.0), DmError);
}

TEST_CASE("normal-form structure reproduces the displayed metric") {
    auto A = of_y([](const Jet& y) { return sin(y); });
    auto B = of_y([](const Jet& y) { return y * y; });
    auto dm = build_dm(normal_form_structure(A, B, plane()), 1.0);
    std::mt19937_64 rng(5);
    for (int t = 0; t < 10; ++t) {
        auto pt = dm.chart.sample(rng);
        double y = pt[1], p = pt[2], q = pt[3];
        double Av = std::sin(y), Bv = y * y;
        auto g = dm.metric.base.at(pt, 0);
        CHECK(g.at({0, 0}).value() == doctest::Approx(Bv + p * p + q).epsilon(1e-12));
        CHECK(g.at({0, 1}).value() == doctest::Approx(p * q + Av).epsilon(1e-12));
        CHECK(g.at({1, 1}).value() == doctest::Approx(-Av * p + Bv * q + q * q).epsilon(1e-12));
        CHECK(g.at({0, 2}).value() == doctest::Approx(0.5));
        CHECK(g.at({1, 3}).value() == doctest::Approx(0.5));
    }
}

TEST_CASE("potential is a primitive of the symplectic form") {
    std::mt19937_64 rng(7);
    for (auto make : {+[]() { return build_dm(generic_structure(), 1.0); },
                      +[]() { return build_dm(generic_structure(), -0.7); },
                      +[]() { return build_dm(cubic_structure(), 2.0); }}) {
        auto dm = make();
        for (int t = 0; t < 5; ++t) {
            auto pt = dm.chart.sample(rng);
            auto A = dm.potential.at(pt, 2);
            auto w = dm.omega.at(pt, 1);
            CHECK(max_coeff_abs(ext_d(A) - w) < 1e-11);
            CHECK(max_coeff_abs(ext_d(w)) < 1e-11);
        }
    }
}

TEST_CASE("Einstein property with scalar 4n(n+1)L") {
    std::mt19937_64 rng(11);
    {
        auto A = of_y([](const Jet& y) { return sin(y); });
        auto B = of_y([](const Jet& y) { return y * y; });
        auto dm = build_dm(normal_form_structure(A, B, plane()), 1.0);
        auto rep = einstein_check(dm, 10, rng, 1e-9);
        CHECK(rep.expected_scalar == doctest::Approx(24.0));
        CHECK(rep.max_scalar_err < 1e-8);
        CHECK(rep.max_residual < 1e-9);
    }
    {
        auto base = make_chart({"x0", "x1", "x2"},
                               std::vector<std::pair<double, double>>(3, {-1.0, 1.0}));
        auto dm = build_dm(base, zero_gamma(base, 3), 3, 1.0);
        auto rep = einstein_check(dm, 5, rng, 1e-9);
        CHECK(rep.expected_scalar == doctest::Approx(48.0));
        CHECK(rep.max_scalar_err < 1e-8);
        CHECK(rep.max_residual < 1e-9);
    }
    {
        auto dm = build_dm(flat_structure(plane()), 2.0);
        auto rep = einstein_check(dm, 5, rng, 1e-9);
        CHECK(rep.expected_scalar == doctest::Approx(48.0));
        CHECK(rep.max_scalar_err < 1e-8);
        CHECK(rep.max_residual < 1e-9);
    }
}

TEST_CASE("Killing lifts of projective vector fields") {
    std::mt19937_64 rng(13);
    auto check_killing = [&](const DmSpace& dm, const TensorField& K, int npts = 5) {
        for (int t = 0; t < npts; ++t) {
            auto pt = dm.chart.sample(rng);
            auto Kj = K.at(pt, 2);
            auto gj = dm.metric.base.at(pt, 2);
            CHECK(max_coeff_abs(lie_derivative(Kj, gj, "ll")) < 1e-10);
            auto wj = dm.omega.at(pt, 2);
            CHECK(max_coeff_abs(lie_derivative(Kj, wj, "ll")) < 1e-10);
        }
    };

    // flat structure, translation: lift is the same translation
    {
        auto ps = flat_structure(plane());
        auto dm = build_dm(ps, 1.0);
        auto k = make_tensor(ps.chart, "u",
                             [](const std::vector<Jet>& xs, const std::vector<int>& idx) {
                                 return constant(idx[0] == 0 ? 1.0 : 0.0, xs[0].config());
                             });
        auto K = killing_lift(dm, k, upsilon_field(ps, k));
        auto pt = dm.chart.sample(rng);
        auto Kj = K.at(pt, 1);
        CHECK(Kj.c[0].value() == doctest::Approx(1.0));
        for (int i = 1; i < 4; ++i) CHECK(std::abs(Kj.c[i].value()) < 1e-12);
        check_killing(dm, K);
    }

    // cubic structure: y d/dx lifts to y d/dx - p d/dq
    {
        auto ps = cubic_structure();
        auto dm = build_dm(ps, 1.0);
        auto k = make_tensor(ps.chart, "u",
                             [](const std::vector<Jet>& xs, const std::vector<int>& idx) {
                                 if (idx[0] == 0) return xs[1];
                                 return constant(0.0, xs[0].config());
                             });
        auto rep = projective_vector_residual(ps, k, {0.3, 0.4});
        REQUIRE(rep.residual < 1e-10);
        auto K = killing_lift(dm, k, upsilon_field(ps, k));
        auto pt = dm.chart.sample(rng);
        auto Kj = K.at(pt, 1);
        CHECK(Kj.c[0].value() == doctest::Approx(pt[1]).epsilon(1e-12));
        CHECK(std::abs(Kj.c[1].value()) < 1e-11);
        CHECK(std::abs(Kj.c[2].value()) < 1e-11);
        CHECK(Kj.c[3].value() == doctest::Approx(-pt[2]).epsilon(1e-11));
        check_killing(dm, K);

        // x d/dx - y d/dy lifts to x d/dx - p d/dp - y d/dy + q d/dq
        auto k1 = make_tensor(ps.chart, "u",
                              [](const std::vector<Jet>& xs, const std::vector<int>& idx) {
                                  return idx[0] == 0 ? xs[0] : -1.0 * xs[1];
                              });
        auto K1 = killing_lift(dm, k1, upsilon_field(ps, k1));
        auto K1j = K1.at(pt, 1);
        CHECK(K1j.c[0].value() == doctest::Approx(pt[0]).epsilon(1e-12));
        CHECK(K1j.c[1].value() == doctest::Approx(-pt[1]).epsilon(1e-12));
        CHECK(K1j.c[2].value() == doctest::Approx(-pt[2]).epsilon(1e-11));
        CHECK(K1j.c[3].value() == doctest::Approx(pt[3]).epsilon(1e-11));
        check_killing(dm, K1);
    }
}

TEST_CASE("parallel two-form identities") {
    std::mt19937_64 rng(17);
    auto dm = build_dm(flat_structure(plane()), 1.0);
    for (int t = 0; t < 50; ++t) {
        auto pt = dm.chart.sample(rng);
        auto rep = parallel_structure_residuals(dm, pt);
        CHECK(rep.hh < 1e-10);
        CHECK(rep.beta < 1e-10);
        auto wrong = parallel_structure_residuals(dm, pt, 5.0);
        CHECK(wrong.beta > 1e-3);
    }
    // the covariant-derivative identity holds for curved structures too
    auto A = of_y([](const Jet& y) { return cos(y); });
    auto B = of_y([](const Jet& y) { return y; });
    auto dm2 = build_dm(normal_form_structure(A, B, plane()), 1.0);
    for (int t = 0; t < 10; ++t) {
        auto rep = parallel_structure_residuals(dm2, dm2.chart.sample(rng));
        CHECK(rep.beta < 1e-10);
    }
}

TEST_CASE("circle-bundle lift is Einstein with scalar 2n(2n+1)L") {
    std::mt19937_64 rng(19);
    {
        auto kk = kk_lift(build_dm(flat_structure(plane()), 1.0));
        auto pt = kk.chart.sample(rng);
        auto rep = einstein_residual(kk.metric, pt);
        CHECK(rep.scalar == doctest::Approx(20.0).epsilon(1e-9));
        CHECK(rep.residual < 1e-9);
    }
    {
        auto A = of_y([](const Jet& y) { return y; });
        auto B = of_y([](const Jet& y) { return constant(1.0, y.config()); });
        auto kk = kk_lift(build_dm(normal_form_structure(A, B, plane()), 1.0));
        for (int t = 0; t < 5; ++t) {
            auto rep = einstein_residual(kk.metric, kk.chart.sample(rng));
            CHECK(rep.scalar == doctest::Approx(20.0).epsilon(1e-8));
            CHECK(rep.residual < 1e-8);
        }
    }
    {
        auto base = make_chart({"x0", "x1", "x2"},
                               std::vector<std::pair<double, double>>(3, {-1.0, 1.0}));
        auto kk = kk_lift(build_dm(base, zero_gamma(base, 3), 3, -1.0));
        auto rep = einstein_residual(kk.metric, kk.chart.sample(rng));
        CHECK(rep.scalar == doctest::Approx(-42.0).epsilon(1e-9));
        CHECK(rep.residual < 1e-9);
    }
    // random draws over (A, B, L)
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int t = 0; t < 5; ++t) {
        double a = u(rng), b = u(rng), L = 0.5 + 0.5 * std::abs(u(rng));
        auto A = of_y([a](const Jet& y) { return a * sin(y); });
        auto B = of_y([b](const Jet& y) { return b * y * y; });
        auto kk = kk_lift(build_dm(normal_form_structure(A, B, plane()), L));
        auto rep = einstein_residual(kk.metric, kk.chart.sample(rng));
        CHECK(rep.scalar == doctest::Approx(20.0 * L).epsilon(1e-8));
        CHECK(rep.residual < 1e-8);
    }
}

TEST_CASE("symplectic form is divergence-free") {
    std::mt19937_64 rng(23);
    auto dm = build_dm(flat_structure(plane()), 1.0);
    for (int t = 0; t < 5; ++t) CHECK(omega_divergence(dm, dm.chart.sample(rng)) < 1e-11);

    auto A = of_y([](const Jet& y) { return cos(y); });
    auto B = of_y([](const Jet& y) { return y * y * y; });
    auto dm2 = build_dm(normal_form_structure(A, B, plane()), 1.0);
    for (int t = 0; t < 5; ++t) CHECK(omega_divergence(dm2, dm2.chart.sample(rng)) < 1e-10);

    // control: a generic (non-closed) 2-form is not divergence-free
    auto junk = make_tensor(dm2.chart, "ll",
                            [](const std::vector<Jet>& xs, const std::vector<int>& idx) {
                                if (idx[0] == idx[1]) return constant(0.0, xs[0].config());
                                Jet v = sin(xs[0] + 0.3 * xs[2]) + xs[1] * xs[3];
                                return idx[0] < idx[1] ? v : -1.0 * v;
                            });
    int big = 0;
    for (int t = 0; t < 5; ++t)
        if (omega_divergence_of(dm2, junk, dm2.chart.sample(rng)) > 1e-3) ++big;
    CHECK(big == 5);
}

TEST_CASE("flat quadric embedding") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(-0.8, 0.8);
    for (int t = 0; t < 5; ++t) {
        Point p = {u(rng), u(rng), u(rng), u(rng), u(rng)};
        auto rep = quadric_embedding_check(2, 1.0, p);
        CHECK(rep.metric_residual < 1e-11);
        CHECK(rep.constraint_residual < 1e-13);
    }
    for (int t = 0; t < 3; ++t) {
        Point p = {u(rng), u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
        auto rep = quadric_embedding_check(3, 0.5, p);
        CHECK(rep.metric_residual < 1e-11);
        CHECK(rep.constraint_residual < 1e-13);
    }
}

TEST_CASE("incidence metric of the point-line model") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    // affine parametrization recovers the model metric
    for (int t = 0; t < 5; ++t) {
        Point pt = {u(rng), u(rng), u(rng), u(rng)};
        auto xs = seed_point(pt, 2);
        std::vector<Jet> P = {xs[0], xs[1], constant(1.0, xs[0].config())};
        std::vector<Jet> L = {xs[2], xs[3], 1.0 - xs[0] * xs[2] - xs[1] * xs[3]};
        auto g = incidence_metric(P, L);
        double p = pt[2], q = pt[3];
        CHECK(g.at({0, 0}).value() == doctest::Approx(p * p).epsilon(1e-13));
        CHECK(g.at({0, 1}).value() == doctest::Approx(p * q).epsilon(1e-13));
        CHECK(g.at({1, 1}).value() == doctest::Approx(q * q).epsilon(1e-13));
        CHECK(g.at({0, 2}).value() == doctest::Approx(0.5));
        CHECK(g.at({1, 3}).value() == doctest::Approx(0.5));
        CHECK(g.at({2, 3}).value() == 0.0);
    }
    // displacements along a common line are null
    for (int t = 0; t < 10; ++t) {
        double x0 = u(rng), x1 = u(rng), z0 = u(rng), z1 = u(rng);
        double Pv[3] = {x0, x1, 1.0};
        double Lv[3] = {z0, z1, 1.0 - x0 * z0 - x1 * z1};
        // a line M through P, a direction V inside it, and L-pencil member M
        double M[3] = {u(rng), u(rng), 0.0};
        M[2] = -(M[0] * Pv[0] + M[1] * Pv[1]);  // M . P = 0
        double V[3] = {M[1], -M[0], 0.0};       // M . V = 0; V not through P generically
        V[2] = u(rng) * 0.0;
        double s = 0.3 * u(rng), w = 0.3 * u(rng);
        // finite polarization vanishes exactly for P~P+sV, L~L+wM
        double PL = 1.0;
        double PtLt = 0, PtL = 0, PLt = 0;
        for (int a = 0; a < 3; ++a) {
            PtLt += (Pv[a] + s * V[a]) * (Lv[a] + w * M[a]);
            PtL += (Pv[a] + s * V[a]) * Lv[a];
            PLt += Pv[a] * (Lv[a] + w * M[a]);
        }
        CHECK(std::abs(PL * PtLt - PtL * PLt) < 1e-13);
        // infinitesimal version: null with respect to the incidence metric.
        // Use a 1-parameter curve through (P, L) with velocity (V, M).
        JetConfig cfg{1, 2};
        auto tj = seed(0, 0.0, cfg);
        std::vector<Jet> Pj, Lj;
        for (int a = 0; a < 3; ++a) {
            Pj.push_back(Pv[a] + tj * V[a]);
            Lj.push_back(Lv[a] + tj * M[a]);
        }
        // renormalize so P.L = 1 along the curve
        Jet norm = Pj[0] * Lj[0] + Pj[1] * Lj[1] + Pj[2] * Lj[2];
        for (int a = 0; a < 3; ++a) Lj[a] = Lj[a] / norm;
        auto g = incidence_metric(Pj, Lj);
        CHECK(std::abs(g.at({0, 0}).value()) < 1e-12);
        // zero displacement is trivially null
        std::vector<Jet> P0, L0;
        for (int a = 0; a < 3; ++a) {
            P0.push_back(constant(Pv[a], cfg));
            L0.push_back(constant(Lv[a], cfg));
        }
        Jet n0 = P0[0] * L0[0] + P0[1] * L0[1] + P0[2] * L0[2];
        for (int a = 0; a < 3; ++a) L0[a] = L0[a] / n0;
        auto g0 = incidence_metric(P0, L0);
        CHECK(max_coeff_abs(g0) == 0.0);
    }
    // unnormalized input is rejected
    JetConfig cfg{1, 2};
    std::vector<Jet> Pbad = {constant(1.0, cfg), constant(0.0, cfg), constant(0.0, cfg)};
    std::vector<Jet> Lbad = {constant(3.0, cfg), constant(0.0, cfg), constant(0.0, cfg)};
    CHECK_THROWS_AS(incidence_metric(Pbad, Lbad), DmError);
}

TEST_CASE("projective invariance at L=1 under the fibre shift") {
    auto ps = generic_structure();
    auto ups = make_tensor(ps.chart, "l",
                           [](const std::vector<Jet>& xs, const std::vector<int>& idx) {
                               if (idx[0] == 0) return xs[0] * xs[1] - 0.2;
                               return sin(xs[0]) + 0.3 * xs[1];
                           });
    auto dm = build_dm(ps, 1.0);
    auto dm_shift = build_dm(apply_upsilon(ps, ups), 1.0);
    auto u0 = ups.comps[0];
    auto u1 = ups.comps[1];
    std::vector<ScalarField> map = {
        sf_coord(4, 0), sf_coord(4, 1),
        {4, [u0](const std::vector<Jet>& xs) {
             return xs[2] + u0({xs[0], xs[1]});
         }},
        {4, [u1](const std::vector<Jet>& xs) {
             return xs[3] + u1({xs[0], xs[1]});
         }}};
    std::mt19937_64 rng(37);
    for (int t = 0; t < 10; ++t) {
        auto pt = dm.chart.sample(rng);
        auto g_pb = pullback_at(map, dm_shift.metric.base, pt, 2);
        auto g0 = truncate(dm.metric.base.at(pt, 1), 1);
        CHECK(max_coeff_abs(g_pb - g0) < 1e-10);
        auto w_pb = pullback_at(map, dm_shift.omega, pt, 2);
        auto w0 = truncate(dm.omega.at(pt, 1), 1);
        CHECK(max_coeff_abs(w_pb - w0) < 1e-10);
    }
}

TEST_CASE("built metrics are anti-self-dual at n=2, L=1") {
    std::mt19937_64 rng(41);
    auto A = of_y([](const Jet& y) { return y * y; });
    auto B = of_y([](const Jet& y) { return sin(y); });
    for (auto make : {+[]() { return build_dm(flat_structure(plane()), 1.0); },
                      +[]() { return build_dm(cubic_structure(), 1.0); },
                      +[]() { return build_dm(generic_structure(), 1.0); }}) {
        auto dm = make();
        for (int t = 0; t < 5; ++t)
            CHECK(asd_weyl_residual(dm.metric, dm.chart.sample(rng)) < 1e-9);
    }
    auto dm = build_dm(normal_form_structure(A, B, plane()), 1.0);
    for (int t = 0; t < 50; ++t)
        CHECK(asd_weyl_residual(dm.metric, dm.chart.sample(rng)) < 1e-9);
}
