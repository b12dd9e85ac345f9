#include "tg/catalog.hpp"

namespace tg {

namespace {

Jet example1_poly(const std::vector<Jet>& a) {
    const Jet &w = a[0], &X = a[1], &Z = a[3];
    return w * ipow(w * X * X - Z * Z, 3) + ipow(Z, 4);
}

Jet weighted_quartic_poly(const std::vector<Jet>& a) {
    const Jet &w = a[0], &X = a[1], &Y = a[2], &Z = a[3];
    Jet t = 2.0 * w * w * ipow(X, 4) - 3.0 * w * X * X * Z * Z + ipow(Z, 4) + 2.0 * Z * Z;
    return 4.0 * Y * Y * w * ipow(w * X * X - Z * Z, 3) + t * t;
}

Jet sextic_poly(const std::vector<Jet>& a) {
    const Jet &w = a[0], &X = a[1], &Y = a[2], &Z = a[3];
    Jet X2 = X * X, Y2 = Y * Y, Z2 = Z * Z;
    Jet M3 = ipow(X2 - Y2, 3);
    Jet q4 = 5.0 * ipow(X2, 3) * Z2 - 14.0 * ipow(X2, 2) * Y2 * Z2 +
             13.0 * X2 * Y2 * Z2 - 4.0 * Y2 * Y2 * Z2 + 9.0 * X2 * X2 + 27.0 * X2;
    Jet q3 = -20.0 * ipow(X2, 3) * Z2 + 48.0 * ipow(X2, 2) * Y2 * Z2 -
             36.0 * X2 * Y2 * Y2 * Z2 + 8.0 * ipow(Y2, 3) * Z2 - 81.0 * X2 * X2 -
             243.0 * X2 * Y2;
    Jet q2 = 20.0 * X2 * X2 * Z2 * Z2 - 36.0 * X2 * Y2 * Z2 * Z2 +
             16.0 * Y2 * Y2 * Z2 * Z2 + 108.0 * X2 * Z2 + 216.0 * Y2 * Z2 + 243.0;
    Jet q1 = -2.0 * X2 * Z2 + 2.0 * Y2 * Z2 - 9.0;
    return 64.0 * ipow(w, 6) * ipow(X2, 3) * M3 -
           92.0 * ipow(w, 5) * ipow(X2, 2) * Z2 * M3 +
           48.0 * ipow(w, 4) * X2 * Z2 * q4 + 8.0 * ipow(w, 3) * Z2 * Z2 * q3 +
           3.0 * ipow(w, 2) * Z2 * Z2 * q2 + 6.0 * w * ipow(Z2, 4) * q1 + ipow(Z2, 6);
}

// e^U = cbrt(T) + 4Y^2/cbrt(T) + 2Y with T = 8Y^3 + 9Z^2 + 3 sqrt(16 Z^2 Y^3 + 9 Z^4);
// U is constant on the parabolic cylinders (e^U/6 - Y) e^{2U} = 3 Z^2.
Jet parabolic_cylinder_u(const std::vector<Jet>& xs) {
    const Jet &Y = xs[1], &Z = xs[2];
    Jet T = 8.0 * ipow(Y, 3) + 9.0 * Z * Z +
            3.0 * sqrt(16.0 * Z * Z * ipow(Y, 3) + 9.0 * ipow(Z, 4));
    Jet r = exp(log(T) * (1.0 / 3.0));
    return log(r + 4.0 * Y * Y / r + 2.0 * Y);
}

std::vector<TodaCatalogEntry> build_catalog() {
    std::vector<TodaCatalogEntry> out;

    {
        TodaCatalogEntry e;
        e.name = "constant";
        e.epsilon = 1.0;
        e.box = make_chart({"X", "Y", "Z"}, {{-1.0, 1.0}, {-1.0, 1.0}, {0.5, 1.5}});
        e.u = sf_constant(3, 0.0);
        e.note = "U = 0; both sides of the equation vanish";
        out.push_back(e);
    }
    {
        TodaCatalogEntry e;
        e.name = "log-slice";
        e.epsilon = 1.0;
        e.box = make_chart({"X", "Y", "Z"}, {{-1.0, 1.0}, {-1.0, 1.0}, {0.5, 2.0}});
        e.u = {3, [](const std::vector<Jet>& xs) { return log(xs[2]); }};
        e.note = "U = ln Z; e^U linear in Z and harmonic in (X, Y), any epsilon";
        out.push_back(e);
    }
    {
        TodaCatalogEntry e;
        e.name = "quartic-basic";
        e.epsilon = 1.0;
        // the branch exists only for |X| < (9/(16 sqrt 3)) Z^2; the box stays
        // inside that region, and the guard additionally rejects samples where
        // the margin (9/(16 sqrt 3))^2 Z^4 - X^2 is within 1e-3 of vanishing
        ScalarField root_margin{3, [](const std::vector<Jet>& xs) {
                                    double b = 81.0 / 768.0;  // (9/(16 sqrt 3))^2
                                    return b * ipow(xs[2], 4) - xs[0] * xs[0];
                                }};
        e.box = make_chart({"X", "Y", "Z"}, {{0.02, 0.26}, {-1.0, 1.0}, {0.95, 1.3}},
                           {Guard{root_margin, 1e-3}});
        e.implicit = true;
        e.relation.poly = example1_poly;
        e.relation.epsilon = 1.0;
        e.relation.box = e.box;
        // on the branch: X = -8 Z^3 p / D^2, w = D^3/(64 Z^2) at (p, Z) = (-0.2, 1)
        e.relation.seed = {1.6 / 16.3216, 0.0, 1.0};
        e.relation.seed_w = 65.939264 / 64.0;
        e.u = implicit_field(e.relation);
        e.note = "w (w X^2 - Z^2)^3 + Z^4 = 0, the basic quartic branch";
        out.push_back(e);
    }
    {
        TodaCatalogEntry e;
        e.name = "quartic-weighted";
        e.epsilon = 1.0;
        e.box = make_chart({"X", "Y", "Z"},
                           {{0.12, 0.28}, {1.3, 1.62}, {0.9, 1.15}});
        e.implicit = true;
        e.relation.poly = weighted_quartic_poly;
        e.relation.epsilon = 1.0;
        e.relation.box = e.box;
        // image of the exponential-profile family at (y, p, Z) = (0, -0.5, 1)
        e.relation.seed = {4.0 / 18.0625, 1.0 + 7.5 / 18.0625, 1.0};
        e.relation.seed_w = 76.765625 / 64.0;
        e.u = implicit_field(e.relation);
        e.note = "4 Y^2 e^U (e^U X^2 - Z^2)^3 + (2 e^{2U} X^4 - 3 e^U X^2 Z^2 + Z^4 + 2 Z^2)^2 = 0";
        out.push_back(e);
    }
    {
        TodaCatalogEntry e;
        e.name = "sextic";
        e.epsilon = 1.0;
        e.box = make_chart({"X", "Y", "Z"},
                           {{0.22, 0.27}, {0.28, 0.33}, {0.88, 0.93}});
        e.implicit = true;
        e.relation.poly = sextic_poly;
        e.relation.epsilon = 1.0;
        e.relation.box = e.box;
        e.relation.seed = {0.25, 0.3, 0.9};
        e.relation.seed_w = 3628.6;
        e.u = implicit_field(e.relation);
        e.expect_pass = false;
        e.note =
            "degree-six relation kept as a corruption-detection control: no "
            "positive regular branch satisfies the equation (best residual ~8e-3 "
            "over a broad scan, and single-term repairs also fail)";
        out.push_back(e);
    }
    {
        TodaCatalogEntry e;
        e.name = "parabolic-cylinder";
        e.epsilon = -1.0;
        e.box = make_chart({"X", "Y", "Z"}, {{-1.0, 1.0}, {0.1, 1.2}, {0.05, 1.5}});
        e.u = {3, parabolic_cylinder_u};
        e.note = "closed form with (e^U/6 - Y) e^{2U} = 3 Z^2; epsilon = -1";
        out.push_back(e);
    }
    return out;
}

}  // namespace

const std::vector<TodaCatalogEntry>& toda_catalog() {
    static const std::vector<TodaCatalogEntry> c = build_catalog();
    return c;
}

const TodaCatalogEntry& catalog_entry(const std::string& name) {
    for (const auto& e : toda_catalog())
        if (e.name == name) return e;
    throw TodaError("unknown catalog entry: " + name);
}

}  // namespace tg
