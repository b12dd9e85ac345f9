#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "tg/fields.hpp"

using namespace tg;

namespace {

double max_coeff_diff(const JTensor& a, const JTensor& b) {
    double m = 0;
    for (size_t i = 0; i < a.c.size(); ++i) {
        const auto& ca = a.c[i].coeffs();
        const auto& cb = b.c[i].coeffs();
        for (size_t j = 0; j < ca.size(); ++j) m = std::max(m, std::abs(ca[j] - cb[j]));
    }
    return m;
}

double max_coeff_abs(const JTensor& a) {
    double m = 0;
    for (const auto& x : a.c)
        for (double cc : x.coeffs()) m = std::max(m, std::abs(cc));
    return m;
}

// Random polynomial jet built from coordinate jets so derivatives are
// consistent (a genuine function germ, not independent coefficients).
Jet random_germ(std::mt19937_64& rng, const std::vector<Jet>& xs) {
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    Jet f = constant(u(rng), xs[0].config());
    for (size_t i = 0; i < xs.size(); ++i) {
        f += u(rng) * xs[i];
        for (size_t j = i; j < xs.size(); ++j) {
            f += u(rng) * xs[i] * xs[j];
            f += u(rng) * xs[i] * xs[j] * xs[(i + j) % xs.size()];
        }
    }
    return f;
}

JTensor random_form(std::mt19937_64& rng, const std::vector<Jet>& xs, int rank) {
    JTensor t(static_cast<int>(xs.size()), rank, xs[0].config());
    for (auto& c : t.c) c = random_germ(rng, xs);
    return antisymmetrize(t);
}

JTensor flat_metric(int n, JetConfig cfg) {
    JTensor g(n, 2, cfg);
    for (int i = 0; i < n; ++i) g.at({i, i}) = constant(1.0, cfg);
    return g;
}

}  // namespace

TEST_CASE("chart sampling respects box and guards") {
    auto chart = make_chart({"x", "y"}, {{-1.0, 1.0}, {0.5, 2.0}},
                            {{sf_coord(2, 0), 0.3}});
    std::mt19937_64 rng(5);
    long res = 0;
    for (int t = 0; t < 200; ++t) {
        auto p = chart.sample(rng, &res);
        CHECK(p[0] > -1.0);
        CHECK(p[0] < 1.0);
        CHECK(std::abs(p[0]) > 0.3);
        CHECK(p[1] > 0.5);
        CHECK(p[1] < 2.0);
        CHECK(chart.admits(p));
    }
    CHECK(res > 0);  // the guard must have rejected something over 200 draws
    CHECK_FALSE(chart.admits({0.1, 1.0}));
    CHECK_FALSE(chart.admits({0.5, 3.0}));

    auto hopeless = make_chart({"x"}, {{0.0, 0.1}}, {{sf_coord(1, 0), 10.0}});
    CHECK_THROWS_AS(hopeless.sample(rng), FieldError);
}

TEST_CASE("tensor product, contraction, transpose") {
    JetConfig cfg{3, 2};
    auto xs = seed_point({1.0, 2.0, 3.0}, 2);
    JTensor v(3, 1, cfg), w(3, 1, cfg);
    for (int i = 0; i < 3; ++i) {
        v.c[i] = xs[i];
        w.c[i] = constant(i + 1.0, cfg);
    }
    auto vw = tensor_product(v, w);
    CHECK(vw.at({2, 1}).value() == doctest::Approx(6.0));
    auto tr = contract(vw, 0, 1);  // v . w = 1 + 4 + 9
    CHECK(tr.c[0].value() == doctest::Approx(14.0));
    auto vwT = transpose(vw, 0, 1);
    CHECK(vwT.at({1, 2}).value() == doctest::Approx(vw.at({2, 1}).value()));
}

TEST_CASE("inverse and det on jets") {
    std::mt19937_64 rng(9);
    JetConfig cfg{2, 3};
    auto xs = seed_point({0.4, -0.7}, 3);
    JTensor g(2, 2, cfg);
    g.at({0, 0}) = 2.0 + xs[0] * xs[0];
    g.at({0, 1}) = xs[0] * xs[1];
    g.at({1, 0}) = xs[0] * xs[1];
    g.at({1, 1}) = 1.0 + exp(xs[1]);
    auto gi = inverse(g);
    auto id = contract(tensor_product(g, gi), 1, 2);
    JTensor eye = flat_metric(2, cfg);
    CHECK(max_coeff_diff(id, eye) < 1e-13);
    // det = g00 g11 - g01^2
    auto d = det(g);
    auto dref = g.at({0, 0}) * g.at({1, 1}) - g.at({0, 1}) * g.at({0, 1});
    for (size_t i = 0; i < d.coeffs().size(); ++i)
        CHECK(d.coeffs()[i] == doctest::Approx(dref.coeffs()[i]).epsilon(1e-13));
}

TEST_CASE("d of x dy in both conventions") {
    auto xs = seed_point({0.3, 0.8}, 3);
    JTensor a(2, 1, xs[0].config());
    a.at({1}) = xs[0];  // x dy
    auto da = ext_d(a);  // classical: dx ^ dy
    CHECK(da.at({0, 1}).value() == doctest::Approx(1.0));
    CHECK(da.at({1, 0}).value() == doctest::Approx(-1.0));
    auto da_raw = ext_d(a, FormConv::Raw);
    CHECK(da_raw.at({0, 1}).value() == doctest::Approx(0.5));
    CHECK(da_raw.at({1, 0}).value() == doctest::Approx(-0.5));
    CHECK(max_coeff_diff(to_classical(da_raw, FormConv::Raw), da) < 1e-14);
    CHECK(max_coeff_diff(to_raw(da, FormConv::Classical), da_raw) < 1e-14);
}

TEST_CASE("d compose d vanishes") {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 10; ++t) {
        auto xs = seed_point({0.5, -0.2, 1.1}, 4);
        auto a = random_form(rng, xs, 1);
        CHECK(max_coeff_abs(ext_d(ext_d(a))) < 1e-12);
        auto b = random_form(rng, xs, 2);
        CHECK(max_coeff_abs(ext_d(ext_d(b))) < 1e-12);
        CHECK(max_coeff_abs(ext_d(ext_d(b, FormConv::Raw), FormConv::Raw)) < 1e-12);
    }
}

TEST_CASE("wedge graded commutativity and Leibniz") {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 5; ++t) {
        auto xs = seed_point({0.5, -0.2, 1.1, 0.4}, 3);
        auto a1 = random_form(rng, xs, 1);
        auto b1 = random_form(rng, xs, 1);
        auto b2 = random_form(rng, xs, 2);
        // 1-forms anticommute, 1 ^ 2 commutes
        CHECK(max_coeff_diff(wedge(a1, b1), wedge(b1, a1) * -1.0) < 1e-12);
        CHECK(max_coeff_diff(wedge(a1, b2), wedge(b2, a1)) < 1e-12);
        // d(a ^ b) = da ^ b - a ^ db for a of degree 1
        auto lhs = ext_d(wedge(a1, b2));
        auto a1l = truncate(a1, 2);
        auto b2l = truncate(b2, 2);
        auto rhs = wedge(ext_d(a1), b2l) - wedge(a1l, ext_d(b2));
        CHECK(max_coeff_diff(lhs, rhs) < 1e-11);
        // same identities in the raw convention
        CHECK(max_coeff_diff(wedge(a1, b2, FormConv::Raw), wedge(b2, a1, FormConv::Raw)) < 1e-12);
    }
}

TEST_CASE("interior product against the two-form formula") {
    std::mt19937_64 rng(41);
    auto xs = seed_point({0.5, -0.2, 1.1}, 3);
    auto a = random_form(rng, xs, 1);
    auto b = random_form(rng, xs, 1);
    JTensor k(3, 1, xs[0].config());
    for (int i = 0; i < 3; ++i) k.c[i] = random_germ(rng, xs);
    // K . (a ^ b) = a(K) b - b(K) a
    auto aK = contract(tensor_product(k, a), 0, 1);
    auto bK = contract(tensor_product(k, b), 0, 1);
    auto rhs = b * aK.c[0] - a * bK.c[0];
    CHECK(max_coeff_diff(interior_normalized(k, wedge(a, b), FormConv::Classical), rhs) < 1e-12);
    auto w_raw = wedge(a, b, FormConv::Raw);
    CHECK(max_coeff_diff(interior_normalized(k, w_raw, FormConv::Raw), rhs) < 1e-12);
}

TEST_CASE("Cartan formula for forms") {
    std::mt19937_64 rng(51);
    for (int t = 0; t < 5; ++t) {
        auto xs = seed_point({0.5, -0.2, 1.1}, 4);
        auto w = random_form(rng, xs, 2);
        JTensor v(3, 1, xs[0].config());
        for (int i = 0; i < 3; ++i) v.c[i] = random_germ(rng, xs);
        auto lie = lie_derivative(v, w, "ll");
        auto cartan = ext_d(interior(v, w)) + interior(truncate(v, 3), ext_d(w));
        CHECK(max_coeff_diff(lie, cartan) < 1e-11);
    }
}

TEST_CASE("Lie derivative kills the flat metric along a rotation") {
    auto xs = seed_point({0.7, -0.4}, 3);
    JTensor g = flat_metric(2, xs[0].config());
    JTensor v(2, 1, xs[0].config());
    v.c[0] = -1.0 * xs[1];
    v.c[1] = xs[0];
    CHECK(max_coeff_abs(lie_derivative(v, g, "ll")) < 1e-13);
    // and acts as the commutator on vectors: [x d/dx, d/dx] = -d/dx
    JTensor e(2, 1, xs[0].config()), s(2, 1, xs[0].config());
    e.c[0] = constant(1.0, xs[0].config());
    s.c[0] = xs[0];
    auto lie = lie_derivative(s, e, "u");
    CHECK(lie.c[0].value() == doctest::Approx(-1.0));
    CHECK(std::abs(lie.c[1].value()) < 1e-15);
}

TEST_CASE("hodge star on flat four-space") {
    auto xs = seed_point({0.1, 0.2, 0.3, 0.4}, 2);
    JetConfig cfg = xs[0].config();
    JTensor g = flat_metric(4, cfg);
    // star(dx0 ^ dx1) = dx2 ^ dx3
    JTensor w(4, 2, cfg);
    w.at({0, 1}) = constant(1.0, cfg);
    w.at({1, 0}) = constant(-1.0, cfg);
    auto sw = hodge_star(g, +1, w);
    CHECK(sw.at({2, 3}).value() == doctest::Approx(1.0));
    CHECK(sw.at({3, 2}).value() == doctest::Approx(-1.0));
    CHECK(std::abs(sw.at({0, 1}).value()) < 1e-15);
    // Euclidean signature: star is an involution on 2-forms
    std::mt19937_64 rng(61);
    auto f = random_form(rng, xs, 2);
    CHECK(max_coeff_diff(hodge_star(g, +1, hodge_star(g, +1, f)), f) < 1e-12);
    // orientation reversal flips the sign once
    CHECK(max_coeff_diff(hodge_star(g, -1, f), hodge_star(g, +1, f) * -1.0) < 1e-13);
}

TEST_CASE("mid-degree hodge star is conformally invariant in four dimensions") {
    std::mt19937_64 rng(71);
    for (int t = 0; t < 5; ++t) {
        auto xs = seed_point({0.1, 0.2, 0.3, 0.4}, 3);
        JetConfig cfg = xs[0].config();
        JTensor g(4, 2, cfg);
        // random symmetric positive-ish metric: flat + small symmetric germ
        for (int i = 0; i < 4; ++i)
            for (int j = i; j < 4; ++j) {
                Jet gij = 0.15 * random_germ(rng, xs);
                if (i == j) gij += 2.0;
                g.at({i, j}) = gij;
                g.at({j, i}) = gij;
            }
        Jet omega2 = exp(random_germ(rng, xs) * 0.3);
        auto f = random_form(rng, xs, 2);
        auto s1 = hodge_star(g, +1, f);
        auto s2 = hodge_star(g * omega2, +1, f);
        CHECK(max_coeff_diff(s1, s2) < 1e-11);
    }
}

TEST_CASE("hodge star with split signature squares to plus one on two-forms") {
    auto xs = seed_point({0.1, 0.2, 0.3, 0.4}, 2);
    JetConfig cfg = xs[0].config();
    JTensor g(4, 2, cfg);
    g.at({0, 0}) = constant(1.0, cfg);
    g.at({1, 1}) = constant(1.0, cfg);
    g.at({2, 2}) = constant(-1.0, cfg);
    g.at({3, 3}) = constant(-1.0, cfg);
    std::mt19937_64 rng(81);
    auto f = random_form(rng, xs, 2);
    CHECK(max_coeff_diff(hodge_star(g, +1, hodge_star(g, +1, f)), f) < 1e-12);
}

TEST_CASE("pullback along a chart map") {
    auto target = make_chart({"x", "y"}, {{-2.0, 2.0}, {-2.0, 2.0}});
    auto src = make_chart({"t"}, {{0.1, 1.0}});
    // map t -> (cos t, sin t); pull back dx, expect -sin t dt
    std::vector<ScalarField> map = {
        {1, [](const std::vector<Jet>& u) { return cos(u[0]); }},
        {1, [](const std::vector<Jet>& u) { return sin(u[0]); }},
    };
    auto dx = make_tensor(target, "l", {sf_constant(2, 1.0), sf_constant(2, 0.0)});
    auto pb = pullback_at(map, dx, {0.6}, 3);
    CHECK(pb.c[0].value() == doctest::Approx(-std::sin(0.6)));
    CHECK(partial(pb.c[0], {1}) == doctest::Approx(-std::cos(0.6)));
    // identity pullback reproduces the field
    std::vector<ScalarField> ident = {sf_coord(2, 0), sf_coord(2, 1)};
    auto w = make_tensor(target, "ll",
                         [](const std::vector<Jet>& xs, const std::vector<int>& idx) {
                             return xs[idx[0]] * xs[idx[1]] + (idx[0] == idx[1] ? 1.0 : 0.0);
                         });
    auto direct = w.at({0.3, -0.5}, 2);
    auto viaid = pullback_at(ident, w, {0.3, -0.5}, 3);
    CHECK(max_coeff_diff(truncate(direct, 2), viaid) < 1e-13);
    // field version agrees with pointwise version
    auto pbf = pullback_field(src, map, dx);
    auto pb2 = pbf.at({0.6}, 3);
    CHECK(pb2.c[0].value() == doctest::Approx(-std::sin(0.6)));
    CHECK(partial(pb2.c[0], {1}) == doctest::Approx(-std::cos(0.6)));
}

TEST_CASE("evaluator lifting preserves derivatives through composition") {
    // Pointwise pipeline computing f = exp(x y), lifted back into a field,
    // then composed with x = t^2, y = t + 1.
    auto lifted = field_from_evaluator(2, [](const Point& p, int order) {
        auto xs = seed_point(p, order);
        return exp(xs[0] * xs[1]);
    });
    JetConfig cfg{1, 3};
    auto t = seed(0, 0.5, cfg);
    auto f = lifted({t * t, t + 1.0});
    auto ref = exp((t * t) * (t + 1.0));
    for (size_t i = 0; i < f.coeffs().size(); ++i)
        CHECK(f.coeffs()[i] == doctest::Approx(ref.coeffs()[i]).epsilon(1e-12));

    auto chart = make_chart({"x", "y"}, {{-1.0, 1.0}, {-1.0, 1.0}});
    auto tf = tensorfield_from_evaluator(chart, "l", [](const Point& p, int order) {
        auto xs = seed_point(p, order);
        JTensor r(2, 1, xs[0].config());
        r.c[0] = sin(xs[0] + xs[1]);
        r.c[1] = xs[0] * xs[1];
        return r;
    });
    auto v = tf.at({0.2, 0.3}, 2);
    CHECK(v.c[0].value() == doctest::Approx(std::sin(0.5)));
    CHECK(partial(v.c[0], {1, 0}) == doctest::Approx(std::cos(0.5)));
    CHECK(partial(v.c[1], {1, 1}) == doctest::Approx(1.0));
}
