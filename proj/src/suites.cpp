#include "tg/suites.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tg/dm_einstein.hpp"
#include "tg/projective.hpp"

namespace tg {

namespace {

// ---- shared reference constructions -------------------------------------

Chart plane(double lo = -1.0, double hi = 1.0) {
    return make_chart({"x", "y"}, {{lo, hi}, {lo, hi}});
}

ScalarField of_y2(std::function<Jet(const Jet&)> f) {
    return {2, [f](const std::vector<Jet>& xs) { return f(xs[1]); }};
}

ScalarField of_y3(std::function<Jet(const Jet&)> f) {
    return {3, [f](const std::vector<Jet>& xs) { return f(xs[2]); }};
}

ScalarField sf3(std::function<Jet(const Jet&, const Jet&, const Jet&)> f) {
    return {3, [f](const std::vector<Jet>& xs) { return f(xs[0], xs[1], xs[2]); }};
}

TensorField vec(const Chart& ch,
                std::vector<std::function<Jet(const std::vector<Jet>&)>> f) {
    std::vector<ScalarField> comps;
    for (auto& fi : f) comps.push_back({ch.dim, fi});
    return make_tensor(ch, "u", comps);
}

Jet zero_of(const std::vector<Jet>& xs) { return constant(0.0, xs[0].config()); }
Jet one_of(const std::vector<Jet>& xs) { return constant(1.0, xs[0].config()); }

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

TensorField zero_gamma(const Chart& chart) {
    return make_tensor(chart, "ull", [](const std::vector<Jet>& xs, const std::vector<int>&) {
        return constant(0.0, xs[0].config());
    });
}

Chart cube_chart(int n) {
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back("x" + std::to_string(i));
    return make_chart(names, std::vector<std::pair<double, double>>(n, {-1.0, 1.0}));
}

double max_coeff_abs(const JTensor& a) {
    double m = 0;
    for (const auto& x : a.c)
        for (double cc : x.coeffs()) m = std::max(m, std::abs(cc));
    return m;
}

double max_value_abs(const JTensor& a) {
    double m = 0;
    for (const auto& x : a.c) m = std::max(m, std::abs(x.value()));
    return m;
}

// Random low-degree polynomial/trig profile of y on the 2D chart.
ScalarField random_profile(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double c1 = u(rng), c2 = u(rng), c3 = u(rng);
    return {2, [c1, c2, c3](const std::vector<Jet>& xs) {
                const Jet& y = xs[1];
                return c1 * y + 0.5 * c2 * y * y + c3 * sin(y);
            }};
}

WeylStructure scaled(const WeylStructure& ws, ScalarField rho, TensorField dln) {
    WeylStructure o;
    o.chart = ws.chart;
    o.h.orientation = ws.h.orientation;
    auto hb = ws.h.base;
    auto om = ws.omega;
    auto dl = dln;
    o.h.base = make_tensor(ws.chart, "ll",
                           [hb, rho](const std::vector<Jet>& xs, const std::vector<int>& idx) {
                               Jet r = rho(xs);
                               int n = hb.chart.dim;
                               return hb.comps[idx[0] * n + idx[1]](xs) * r * r;
                           });
    o.omega = make_tensor(ws.chart, "l",
                          [om, dl](const std::vector<Jet>& xs, const std::vector<int>& idx) {
                              return om.comps[idx[0]](xs) + dl.comps[idx[0]](xs) * 2.0;
                          });
    return o;
}

TensorField one_form_3(const Chart& chart,
                       std::function<Jet(const std::vector<Jet>&, int)> f) {
    return make_tensor(chart, "l",
                       [f](const std::vector<Jet>& xs, const std::vector<int>& idx) {
                           return f(xs, idx[0]);
                       });
}

InvariantChart translation_ic(const DmSpace& dm, const Chart& target, double x0) {
    InvariantChart ic;
    ic.source = dm.chart;
    ic.k = make_tensor(dm.chart, "u",
                       [](const std::vector<Jet>& xs, const std::vector<int>& idx) {
                           return constant(idx[0] == 0 ? 1.0 : 0.0, xs[0].config());
                       });
    ic.coords = {sf_coord(4, 2), sf_coord(4, 3), sf_coord(4, 1)};  // (p, q, y)
    ic.section = {sf_constant(3, x0), sf_coord(3, 2), sf_coord(3, 0), sf_coord(3, 1)};
    ic.target = target;
    return ic;
}

InvariantChart cubic_ic(const DmSpace& dm, const Chart& target) {
    InvariantChart ic;
    ic.source = dm.chart;
    // K = y d/dx - p d/dq
    ic.k = make_tensor(dm.chart, "u",
                       [](const std::vector<Jet>& xs, const std::vector<int>& idx) {
                           if (idx[0] == 0) return xs[1];
                           if (idx[0] == 3) return -1.0 * xs[2];
                           return constant(0.0, xs[0].config());
                       });
    ic.coords = {
        {4, [](const std::vector<Jet>& xs) { return xs[2] * xs[2] / (xs[1] * xs[1]); }},
        {4, [](const std::vector<Jet>& xs) { return 2.0 * log(xs[1] * xs[1]); }},
        {4, [](const std::vector<Jet>& xs) { return xs[0] * xs[2] + xs[1] * xs[3]; }}};
    ic.section = {sf_constant(3, 0.0),
                  {3, [](const std::vector<Jet>& xs) { return exp(xs[1] / 4.0); }},
                  {3, [](const std::vector<Jet>& xs) { return exp(xs[1] / 4.0) * sqrt(xs[0]); }},
                  {3, [](const std::vector<Jet>& xs) { return xs[2] * exp(-xs[1] / 4.0); }}};
    ic.target = target;
    return ic;
}

InvariantChart model_ic(const DmSpace& dm, double a) {
    InvariantChart ic;
    ic.source = dm.chart;
    ic.k = make_tensor(dm.chart, "u",
                       [a](const std::vector<Jet>& xs, const std::vector<int>& idx) {
                           if (idx[0] == 0) return xs[0];
                           if (idx[0] == 1) return a * xs[1];
                           if (idx[0] == 2) return -1.0 * xs[2];
                           return -a * xs[3];
                       });
    ic.coords = {{4, [](const std::vector<Jet>& xs) { return xs[0] * xs[2]; }},
                 {4, [](const std::vector<Jet>& xs) { return xs[1] * xs[3]; }},
                 {4, [a](const std::vector<Jet>& xs) { return pow(xs[0], a) * xs[3]; }}};
    ic.section = {sf_constant(3, 1.0),
                  {3, [](const std::vector<Jet>& xs) { return xs[1] / xs[2]; }},
                  sf_coord(3, 0), sf_coord(3, 2)};
    auto k2 = sf3([a](const Jet& u, const Jet& v, const Jet& t) {
        Jet s = u + a * v;
        return s * s - u - a * a * v + 0.0 * t;
    });
    ic.target = make_chart({"u", "v", "t"}, {{0.4, 1.2}, {0.4, 1.2}, {0.5, 1.3}},
                           {Guard{k2, 0.05}});
    return ic;
}

// Trivial normal-form cotangent space with its translation symmetry.
DmSpace normal_form_space() {
    auto ps = normal_form_structure(sf_constant(2, 0.0), sf_constant(2, 0.0), plane());
    return build_dm(ps, 1.0);
}

TensorField dx_symmetry(const DmSpace& dm) {
    return vec(dm.chart, {one_of, zero_of, zero_of, zero_of});
}

// Closed-form scalars of the split quotient of the trivial normal form.
ScalarField nf_A() {
    return {4, [](const std::vector<Jet>& xs) {
                Jet S = xs[2] * xs[2] + 4.0 * xs[3];
                return xs[1] - (S - 2.0 * xs[3]) / (4.0 * xs[3] * xs[3]);
            }};
}
ScalarField nf_B() {
    return {4, [](const std::vector<Jet>& xs) {
                Jet S = xs[2] * xs[2] + 4.0 * xs[3];
                return xs[2] * sqrt(S) / (4.0 * xs[3] * xs[3]);
            }};
}
ScalarField nf_Z() {
    return {4, [](const std::vector<Jet>& xs) {
                return 0.5 / sqrt(xs[2] * xs[2] + 4.0 * xs[3]);
            }};
}
ScalarField nf_U() {
    return {4, [](const std::vector<Jet>& xs) {
                Jet S = xs[2] * xs[2] + 4.0 * xs[3];
                return log(ipow(xs[3], 3) / (S * S));
            }};
}

TensorField gh_rotation(const MetricField& gh) {
    return vec(gh.chart(), {[](const std::vector<Jet>& xs) { return -1.0 * xs[1]; },
                            [](const std::vector<Jet>& xs) { return xs[0] + 0.0; },
                            zero_of, zero_of});
}

double k23() { return std::cbrt(4.0 / 9.0); }

// ---- report plumbing ------------------------------------------------------

struct Ctx {
    SuiteSpec spec;
    Report rep;
    std::mt19937_64 rng;

    explicit Ctx(const SuiteSpec& s) : spec(s), rng(s.seed) {
        rep.suite = s.name;
        rep.seed = s.seed;
        rep.samples = s.samples;
    }

    double tol_for(const std::string& id, double def) const {
        auto it = spec.tol.find(id);
        if (it != spec.tol.end()) return it->second;
        auto slash = id.find('/');
        if (slash != std::string::npos) {
            it = spec.tol.find(id.substr(0, slash));
            if (it != spec.tol.end()) return it->second;
        }
        it = spec.tol.find("*");
        if (it != spec.tol.end()) return it->second;
        return def;
    }

    void check(const std::string& id, const Point& p, std::vector<double> res,
               double def_tol, long resamples = 0) {
        CheckRecord r;
        r.id = id;
        r.point = p;
        r.residuals = std::move(res);
        r.threshold = tol_for(id, def_tol);
        double m = 0;
        for (double v : r.residuals) m = std::max(m, v);
        r.pass = m <= r.threshold;
        r.resamples = resamples;
        rep.checks.push_back(std::move(r));
    }

    // control check: the residual must EXCEED the threshold (detection).
    void detect(const std::string& id, const Point& p, double value, double def_thr) {
        CheckRecord r;
        r.id = id;
        r.point = p;
        r.residuals = {value};
        r.threshold = tol_for(id, def_thr);
        r.detect = true;
        r.pass = value > r.threshold;
        rep.checks.push_back(std::move(r));
    }

    int share(int k) const { return std::max(1, spec.samples / k); }
};

std::string num_tag(double v) {
    std::ostringstream ss;
    ss << v;
    return ss.str();
}

// ---- suites ---------------------------------------------------------------

void suite_projective(Ctx& c) {
    auto ups = make_tensor(plane(), "l",
                           [](const std::vector<Jet>& xs, const std::vector<int>& idx) {
                               if (idx[0] == 0) return xs[0] * xs[1] - 0.2;
                               return sin(xs[0]) + 0.3 * xs[1];
                           });
    int per = c.share(5);
    std::vector<std::pair<std::string, ProjectiveStructure>> structures = {
        {"cubic", cubic_structure()}, {"generic", generic_structure()}};
    for (auto& [nm, ps] : structures) {
        auto ps2 = apply_upsilon(ps, ups);
        auto co = ode_coefficients(ps);
        auto co2 = ode_coefficients(ps2);
        for (int t = 0; t < per; ++t) {
            long rs = 0;
            auto p = ps.chart.sample(c.rng, &rs);
            double res = 0;
            res = std::max(res, std::abs(co.a0.value(p) - co2.a0.value(p)));
            res = std::max(res, std::abs(co.a1.value(p) - co2.a1.value(p)));
            res = std::max(res, std::abs(co.a2.value(p) - co2.a2.value(p)));
            res = std::max(res, std::abs(co.a3.value(p) - co2.a3.value(p)));
            c.check("ode-invariance/" + nm, p, {res}, 1e-10, rs);
        }
    }
    auto flat = flat_structure(plane());
    auto sch = schouten_field(flat);
    for (int t = 0; t < per; ++t) {
        auto p = flat.chart.sample(c.rng);
        c.check("cotton-flat", p, {cotton_residual(flat, p)}, 1e-12);
        c.check("schouten-flat", p, {max_coeff_abs(sch.at(p, 0))}, 1e-12);
    }
    auto cs = cubic_structure();
    auto k = make_tensor(cs.chart, "u",
                         [](const std::vector<Jet>& xs, const std::vector<int>& idx) {
                             if (idx[0] == 0) return xs[1];
                             return constant(0.0, xs[0].config());
                         });
    for (int t = 0; t < per; ++t) {
        auto p = cs.chart.sample(c.rng);
        c.check("projective-vector/cubic", p,
                {projective_vector_residual(cs, k, p).residual}, 1e-10);
    }
}

void suite_dm_einstein(Ctx& c) {
    int per = c.share(5);
    for (int k = 0; k < 5; ++k) {
        auto A = random_profile(c.rng);
        auto B = random_profile(c.rng);
        auto dm = build_dm(normal_form_structure(A, B, plane()), 1.0);
        auto r = einstein_check(dm, per, c.rng, 1e-9);
        std::string tag = "/draw" + std::to_string(k);
        c.check("einstein-residual" + tag, {}, {r.max_residual}, 1e-8, r.resamples);
        c.check("scalar-24" + tag, {}, {r.max_scalar_err}, 1e-6);
    }
}

void suite_asd_weyl(Ctx& c) {
    int per = c.share(5);
    for (int k = 0; k < 5; ++k) {
        auto A = random_profile(c.rng);
        auto B = random_profile(c.rng);
        auto dm = build_dm(normal_form_structure(A, B, plane()), 1.0);
        for (int t = 0; t < per; ++t) {
            long rs = 0;
            auto p = dm.chart.sample(c.rng, &rs);
            c.check("asd-weyl/draw" + std::to_string(k), p,
                    {asd_weyl_residual(dm.metric, p)}, 1e-8, rs);
        }
    }
}

void suite_kk_lift(Ctx& c) {
    struct Cfg {
        std::string name;
        KkSpace kk;
        double expected;
    };
    std::vector<Cfg> cfgs;
    cfgs.push_back({"flat-L1", kk_lift(build_dm(flat_structure(plane()), 1.0)), 20.0});
    {
        auto A = of_y2([](const Jet& y) { return y; });
        auto B = of_y2([](const Jet& y) { return constant(1.0, y.config()); });
        cfgs.push_back({"normal-form-L1",
                        kk_lift(build_dm(normal_form_structure(A, B, plane()), 1.0)), 20.0});
    }
    {
        auto base = cube_chart(3);
        cfgs.push_back({"n3-L-1", kk_lift(build_dm(base, zero_gamma(base), 3, -1.0)), -42.0});
    }
    {
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        double L = 0.5 + 0.5 * std::abs(u(c.rng));
        auto A = random_profile(c.rng);
        auto B = random_profile(c.rng);
        cfgs.push_back({"random-draw",
                        kk_lift(build_dm(normal_form_structure(A, B, plane()), L)),
                        20.0 * L});
    }
    int per = c.share(8);
    for (auto& cf : cfgs) {
        for (int t = 0; t < per; ++t) {
            long rs = 0;
            auto p = cf.kk.chart.sample(c.rng, &rs);
            auto rep = einstein_residual(cf.kk.metric, p);
            c.check("kk-einstein/" + cf.name, p, {rep.residual}, 1e-8, rs);
            c.check("kk-scalar/" + cf.name, p, {std::abs(rep.scalar - cf.expected)}, 1e-6);
        }
    }
}

void suite_appendix_a(Ctx& c) {
    int per = c.share(12);
    for (int n : {2, 3})
        for (double L : {1.0, -1.0, 0.5}) {
            auto base = cube_chart(n);
            auto dm = build_dm(base, zero_gamma(base), n, L);
            std::string tag = "/n" + std::to_string(n) + "-L" + num_tag(L);
            double expected = 4.0 * n * (n + 1) * L;
            for (int t = 0; t < per; ++t) {
                long rs = 0;
                auto p = dm.chart.sample(c.rng, &rs);
                auto er = einstein_residual(dm.metric, p);
                c.check("model-scalar" + tag, p, {std::abs(er.scalar - expected)}, 1e-6, rs);
                c.check("model-einstein" + tag, p, {er.residual}, 1e-8);
                c.check("omega-divergence" + tag, p, {omega_divergence(dm, p)}, 1e-9);
            }
        }
}

void suite_jones_tod(Ctx& c) {
    int npts = std::min(c.share(8), 12);
    // translation symmetry of the (A, B) = (y, 1) space
    {
        auto A2 = of_y2([](const Jet& y) { return y; });
        auto B2 = of_y2([](const Jet& y) { return constant(1.0, y.config()); });
        auto dm = build_dm(normal_form_structure(A2, B2, plane()), 1.0);
        auto ref = translation_reduction_pair(
            of_y3([](const Jet& y) { return y; }),
            of_y3([](const Jet& y) { return constant(1.0, y.config()); }));
        auto ic = translation_ic(dm, ref.chart, 0.0);
        for (int t = 0; t < npts; ++t) {
            auto p4 = dm.chart.sample(c.rng);
            c.check("invariant-coords/translation", p4,
                    {invariant_coords_residual(ic, p4)}, 1e-12);
        }
        auto ws = jones_tod_reduce(dm.metric, ic, +1);
        std::vector<Point> pts;
        for (int t = 0; t < npts; ++t) pts.push_back(ref.chart.sample(c.rng));
        for (const auto& p : pts)
            c.check("ew/translation", p, {ew_residual(ws, p)}, 1e-8);
        auto rep = gauge_equivalent(ws, ref, pts, c.tol_for("gauge/translation", 1e-8));
        c.check("gauge/translation", {}, {rep.conf_misfit, rep.omega_misfit}, 1e-8);
    }
    // cubic-connection space with K = y d/dx - p d/dq
    {
        auto dm = build_dm(cubic_structure(), 1.0);
        auto ref = cubic_reduction_pair();
        auto ic = cubic_ic(dm, ref.chart);
        std::uniform_real_distribution<double> u(0.3, 1.0);
        for (int t = 0; t < npts; ++t) {
            Point p4 = {u(c.rng), u(c.rng), u(c.rng), u(c.rng)};
            c.check("invariant-coords/cubic", p4, {invariant_coords_residual(ic, p4)},
                    1e-12);
        }
        auto ws = jones_tod_reduce(dm.metric, ic, +1);
        std::vector<Point> pts;
        for (int t = 0; t < npts; ++t) pts.push_back(ref.chart.sample(c.rng));
        for (const auto& p : pts) c.check("ew/cubic", p, {ew_residual(ws, p)}, 1e-8);
        auto rep = gauge_equivalent(ws, ref, pts, c.tol_for("gauge/cubic", 1e-8));
        c.check("gauge/cubic", {}, {rep.conf_misfit, rep.omega_misfit}, 1e-8);
    }
}

void suite_ew_residuals(Ctx& c) {
    int per = c.share(6);
    using YF = std::function<Jet(const Jet&)>;
    std::vector<std::pair<YF, YF>> draws = {
        {[](const Jet& y) { return constant(0.0, y.config()); },
         [](const Jet& y) { return constant(0.0, y.config()); }},
        {[](const Jet& y) { return y; },
         [](const Jet& y) { return constant(1.0, y.config()); }},
        {[](const Jet& y) { return cos(y); }, [](const Jet& y) { return y * y; }}};
    int k = 0;
    for (auto& [af, bf] : draws) {
        auto ws = translation_reduction_pair(of_y3(af), of_y3(bf));
        for (int t = 0; t < per; ++t) {
            long rs = 0;
            auto p = ws.chart.sample(c.rng, &rs);
            c.check("ew/pair" + std::to_string(k), p, {ew_residual(ws, p)}, 1e-8, rs);
            c.check("compat/pair" + std::to_string(k), p, {weyl_compat_residual(ws, p)},
                    1e-11);
        }
        ++k;
    }
    auto cu = cubic_reduction_pair();
    auto rho = sf3([](const Jet& u, const Jet&, const Jet&) { return exp(0.3 * u); });
    auto dln = one_form_3(cu.chart, [](const std::vector<Jet>& xs, int i) {
        return constant(i == 0 ? 0.3 : 0.0, xs[0].config());
    });
    auto cu2 = scaled(cu, rho, dln);
    for (int t = 0; t < per; ++t) {
        auto p = cu.chart.sample(c.rng);
        c.check("ew/cubic-pair", p, {ew_residual(cu, p)}, 1e-8);
        c.check("gauge-invariance/cubic-pair", p,
                {std::abs(ew_residual(cu, p) - ew_residual(cu2, p))}, 1e-9);
    }
}

void suite_monopoles(Ctx& c) {
    int per = c.share(6);
    using YF = std::function<Jet(const Jet&)>;
    std::vector<std::pair<YF, YF>> draws = {
        {[](const Jet& y) { return constant(0.0, y.config()); },
         [](const Jet& y) { return constant(0.0, y.config()); }},
        {[](const Jet& y) { return y; },
         [](const Jet& y) { return constant(1.0, y.config()); }},
        {[](const Jet& y) { return cos(y); }, [](const Jet& y) { return y * y; }}};
    int k = 0;
    for (auto& [af, bf] : draws) {
        auto A = of_y3(af);
        auto B = of_y3(bf);
        auto ws = translation_reduction_pair(A, B);
        auto V = ScalarField{3, [A, B](const std::vector<Jet>& xs) {
                                 return 1.0 / (B(xs) + xs[0] * xs[0] + xs[1]);
                             }};
        auto alpha = one_form_3(ws.chart, [A, V](const std::vector<Jet>& xs, int i) {
            if (i == 0) return V(xs) * 0.5;
            if (i == 2) return V(xs) * (xs[0] * xs[1] + A(xs));
            return constant(0.0, xs[0].config());
        });
        auto Vm = ScalarField{3, [V](const std::vector<Jet>& xs) {
                                  return -1.0 * xs[0] * V(xs);
                              }};
        auto alpham = one_form_3(ws.chart, [A, V](const std::vector<Jet>& xs, int i) {
            const Jet& p = xs[0];
            if (i == 0) return -1.0 * p * V(xs) * 0.5;
            if (i == 2) return xs[1] - p * V(xs) * (p * xs[1] + A(xs));
            return constant(0.0, xs[0].config());
        });
        for (int t = 0; t < per; ++t) {
            long rs = 0;
            auto p = ws.chart.sample(c.rng, &rs);
            std::string tag = "/pair" + std::to_string(k);
            c.check("monopole" + tag, p, {monopole_residual(ws, V, alpha, p)}, 1e-9, rs);
            c.check("monopole-mirror" + tag, p, {monopole_residual(ws, Vm, alpham, p)},
                    1e-9);
        }
        ++k;
    }
}

void suite_symmetry(Ctx& c) {
    auto cu = cubic_reduction_pair();
    auto dv = make_tensor(cu.chart, "u",
                          [](const std::vector<Jet>& xs, const std::vector<int>& idx) {
                              return constant(idx[0] == 1 ? 1.0 : 0.0, xs[0].config());
                          });
    int per = c.share(3);
    for (int t = 0; t < per; ++t) {
        long rs = 0;
        auto p = cu.chart.sample(c.rng, &rs);
        auto rep = ew_symmetry_residual(cu, dv, p);
        c.check("symmetry/cubic-dv", p, {rep.res_h, rep.res_omega, std::abs(rep.f)},
                1e-10, rs);
    }
    // gauge covariance: f shifts by 2 K . dln(rho)
    auto rho = sf3([](const Jet&, const Jet& v, const Jet&) { return exp(v / 4.0); });
    auto dln = one_form_3(cu.chart, [](const std::vector<Jet>& xs, int i) {
        return constant(i == 1 ? 0.25 : 0.0, xs[0].config());
    });
    auto cu2 = scaled(cu, rho, dln);
    for (int t = 0; t < per; ++t) {
        auto p = cu.chart.sample(c.rng);
        auto rep = ew_symmetry_residual(cu2, dv, p);
        c.check("symmetry-gauge-shift", p,
                {rep.res_h, rep.res_omega, std::abs(rep.f - 0.5)}, 1e-9);
    }
    auto du = make_tensor(cu.chart, "u",
                          [](const std::vector<Jet>& xs, const std::vector<int>& idx) {
                              if (idx[0] == 0) return xs[0];
                              return constant(0.0, xs[0].config());
                          });
    for (int t = 0; t < std::min(per, 5); ++t) {
        auto p = cu.chart.sample(c.rng);
        c.detect("symmetry-control", p, ew_symmetry_residual(cu, du, p).res_h, 1e-3);
    }
}

void suite_minitwistor(Ctx& c) {
    auto dm = build_dm(flat_structure(plane()), 1.0);
    std::uniform_real_distribution<double> unif(0.4, 1.2);
    int per = c.share(6);
    for (double a : {0.5, 1.0, 2.0}) {
        std::string tag = "/a" + num_tag(a);
        for (int t = 0; t < per; ++t) {
            Point p = {unif(c.rng), unif(c.rng), unif(c.rng)};
            auto h = discriminant_h(a, p, 0);
            c.check("disc-normalization" + tag, p,
                    {std::abs(h.at({0, 0}).value() + p[2] * p[2]),
                     max_coeff_abs(h - transpose(h, 0, 1))},
                    1e-10);
        }
        auto ic = model_ic(dm, a);
        auto ws = jones_tod_reduce(dm.metric, ic, +1);
        for (int t = 0; t < std::min(per, 8); ++t) {
            long rs = 0;
            auto p = ic.target.sample(c.rng, &rs);
            auto H1 = discriminant_h(a, p, 0);
            auto H2 = truncate(ws.h.base.at(p, 0), 0);
            double num = 0, den = 0;
            for (int f = 0; f < H1.size(); ++f) {
                num += H1.c[f].value() * H2.c[f].value();
                den += H2.c[f].value() * H2.c[f].value();
            }
            double mis = fro_norm(H1 - H2 * (num / den)) / fro_norm(H1);
            c.check("disc-conformal" + tag, p, {mis}, 1e-8, rs);
        }
    }
}

void suite_toda_catalog(Ctx& c) {
    for (const auto& e : toda_catalog()) {
        Chart box = e.box;
        if (c.spec.box) {
            if (static_cast<int>(c.spec.box->size()) != box.dim)
                throw SuiteError("box override dimension mismatch");
            for (int i = 0; i < box.dim; ++i) {
                box.box[i].first = std::max(box.box[i].first, (*c.spec.box)[i].first);
                box.box[i].second = std::min(box.box[i].second, (*c.spec.box)[i].second);
                if (box.box[i].first >= box.box[i].second)
                    throw SuiteError("box override does not intersect the sampling region");
            }
        }
        if (e.expect_pass) {
            for (int t = 0; t < c.spec.samples; ++t) {
                long rs = 0;
                auto p = box.sample(c.rng, &rs);
                c.check("toda/" + e.name, p, {toda_residual(e.u, e.epsilon, p)}, 1e-7, rs);
            }
        } else {
            // kept for honest reporting: the branch genuinely fails the
            // equation, and the suite verifies that the failure is detected
            double best = 1e300;
            Point argbest;
            for (int t = 0; t < c.spec.samples; ++t) {
                auto p = box.sample(c.rng);
                double r = toda_residual(e.u, e.epsilon, p);
                if (r < best) {
                    best = r;
                    argbest = p;
                }
            }
            c.detect("corruption-detected/" + e.name, argbest, best, 1e-3);
        }
    }
    // the two-function parametric family
    ScalarField IB0 = antiderivative([](const Jet& y) { return 0.0 * y; }, 0.0, 0.0, 3, 0);
    ScalarField I20 = antiderivative([](const Jet& y) { return exp(0.0 * y); }, 0.0, 0.0, 3, 0);
    ScalarField IBy = antiderivative([](const Jet& y) { return y; }, 0.0, 0.0, 3, 0);
    ScalarField I2y =
        antiderivative([](const Jet& y) { return exp(-1.0 * y * y); }, 0.0, 0.0, 3, 0);
    ScalarField IBs = antiderivative([](const Jet& y) { return sin(y); }, 0.0, 0.0, 3, 0);
    ScalarField I2s =
        antiderivative([](const Jet& y) { return exp(-2.0 * (1.0 - cos(y))); }, 0.0, 0.0, 3, 0);
    std::vector<std::pair<std::string, ParametricTodaSolution>> fams;
    fams.push_back({"B-zero", toda_family(IB0, I20)});
    fams.push_back({"B-linear", toda_family(IBy, I2y)});
    fams.push_back({"B-sine", toda_family(IBs, I2s)});
    auto params = make_chart({"y", "p", "Z"}, {{-0.8, 0.8}, {-0.9, 0.9}, {0.6, 1.6}});
    int per = c.share(3);
    for (auto& [nm, fam] : fams)
        for (int t = 0; t < per; ++t) {
            auto q = params.sample(c.rng);
            c.check("parametric/" + nm, q, {parametric_residual(fam, 1.0, q)}, 1e-8);
        }
}

void suite_tod_steps(Ctx& c) {
    auto dm = normal_form_space();
    auto Kx = dx_symmetry(dm);
    auto box4 = make_chart({"x", "y", "p", "q"},
                           {{-0.9, 0.9}, {-0.9, 0.9}, {0.3, 1.1}, {0.4, 1.3}});
    int per = c.share(4);
    for (int t = 0; t < per; ++t) {
        auto p = box4.sample(c.rng);
        auto s1 = tod_step1(dm.metric, Kx, p);
        double S = p[2] * p[2] + 4.0 * p[3];
        c.check("step1-scale", p, {std::abs(s1.c - 1.0 / std::sqrt(S))}, 1e-12);
        c.check("step1-parallel", p, {s1.parallel_res}, 1e-9);
        c.check("step1-symmetry-invariance", p, {s1.lkc}, 1e-11);
    }
    // moment map of the rotational symmetry of the linear-potential metric
    MetricField gh = gibbons_hawking();
    auto K = gh_rotation(gh);
    auto zref = [](const Point& p) { return 0.5 * p[2] * (p[0] * p[0] + p[1] * p[1]); };
    Point base = gh.chart().sample(c.rng);
    ScalarField Z = moment_map_field(gh, K, base, zref(base));
    for (int t = 0; t < per; ++t) {
        auto p = gh.chart().sample(c.rng);
        c.check("step2-moment/rotation", p, {std::abs(Z.value(p) - zref(p))}, 1e-9);
    }
    std::vector<Point> poly = {base};
    for (int t = 0; t < 3; ++t) poly.push_back(gh.chart().sample(c.rng));
    auto mr = tod_step2_moment(gh, K, poly, zref(poly[0]));
    c.check("step2-closedness/rotation", {}, {mr.closedness}, 1e-10);
    // normal-form certificate for the split closed-form candidates
    for (int t = 0; t < per; ++t) {
        auto p = box4.sample(c.rng);
        c.check("form-check/split", p,
                {toda_form_check(dm.metric, Kx, nf_A(), nf_B(), nf_Z(), nf_U(), 1.0, p,
                                 0, -1)},
                1e-8);
    }
    // shear control: mixing the isothermal pair must break the identity
    {
        ScalarField Ash{4, [](const std::vector<Jet>& xs) {
                            Jet S = xs[2] * xs[2] + 4.0 * xs[3];
                            return xs[1] - (S - 2.0 * xs[3]) / (4.0 * xs[3] * xs[3]) +
                                   xs[2] * sqrt(S) / (4.0 * xs[3] * xs[3]);
                        }};
        Point p = box4.sample(c.rng);
        c.detect("form-check-shear-control", p,
                 toda_form_check(dm.metric, Kx, Ash, nf_B(), nf_Z(), nf_U(), 1.0, p, 0, -1),
                 1e-3);
    }
}

void suite_appendix_b(Ctx& c) {
    MetricField gh = gibbons_hawking();
    int per = c.share(6);
    for (int t = 0; t < per; ++t) {
        auto p = gh.chart().sample(c.rng);
        auto er = einstein_residual(gh, p);
        c.check("ricci-flat", p, {er.residual, std::abs(er.scalar)}, 1e-10);
        c.check("asd", p, {asd_weyl_residual(gh, p)}, 1e-9);
    }
    std::vector<TensorField> ks;
    ks.push_back(vec(gh.chart(), {zero_of, zero_of, zero_of, one_of}));
    ks.push_back(vec(gh.chart(), {one_of, zero_of, zero_of, [](const std::vector<Jet>& xs) {
                                      return -0.5 * xs[1];
                                  }}));
    ks.push_back(vec(gh.chart(), {zero_of, one_of, zero_of, [](const std::vector<Jet>& xs) {
                                      return 0.5 * xs[0];
                                  }}));
    ks.push_back(gh_rotation(gh));
    for (size_t i = 0; i < ks.size(); ++i)
        for (int t = 0; t < std::min(per, 5); ++t) {
            auto p = gh.chart().sample(c.rng);
            c.check("killing/k" + std::to_string(i), p,
                    {max_value_abs(lie_derivative(ks[i].at(p, 2), gh.base.at(p, 2), "ll"))},
                    1e-10);
        }
    const auto& pc = catalog_entry("parabolic-cylinder");
    for (int t = 0; t < per; ++t) {
        auto p = pc.box.sample(c.rng);
        c.check("toda/parabolic-cylinder", p, {toda_residual(pc.u, pc.epsilon, p)}, 1e-7);
    }
    // rotational quotient matches the closed-form Toda structure
    InvariantChart ic;
    ic.source = gh.chart();
    ic.k = gh_rotation(gh);
    ic.coords = {{4, [](const std::vector<Jet>& xs) {
                      return sqrt(xs[0] * xs[0] + xs[1] * xs[1]);
                  }},
                 sf_coord(4, 2), sf_coord(4, 3)};
    ic.section = {sf_coord(3, 0), sf_constant(3, 0.0), sf_coord(3, 1), sf_coord(3, 2)};
    ic.target = make_chart({"rho", "z", "t"}, {{1.05, 1.19}, {0.55, 0.72}, {-0.9, 0.9}});
    std::vector<ScalarField> map3 = {
        {3, [](const std::vector<Jet>& xs) { return std::cbrt(2.0 / 3.0) * xs[2]; }},
        {3, [](const std::vector<Jet>& xs) {
             Jet Z = 0.5 * xs[1] * xs[0] * xs[0];
             return Z / (3.0 * k23() * xs[1]) - 0.75 * k23() * k23() * xs[1] * xs[1];
         }},
        {3, [](const std::vector<Jet>& xs) { return 0.5 * xs[1] * xs[0] * xs[0]; }}};
    WeylStructure wt = build_toda_ew(pc.u, -1.0, pc.box);
    WeylStructure wp;
    wp.chart = ic.target;
    wp.h.base = pullback_field(ic.target, map3, wt.h.base);
    wp.h.orientation = +1;
    wp.omega = pullback_field(ic.target, map3, wt.omega);
    WeylStructure w1 = jones_tod_reduce(gh, ic, -1);
    std::vector<Point> pts;
    for (int t = 0; t < 3; ++t) pts.push_back(ic.target.sample(c.rng));
    for (const auto& q : pts)
        c.check("quotient-ew", q, {ew_residual(w1, q)}, 1e-9);
    auto rep = gauge_equivalent(w1, wp, pts, c.tol_for("quotient-gauge", 1e-8));
    c.check("quotient-gauge", {}, {rep.conf_misfit, rep.omega_misfit}, 1e-8);
}

void suite_quadric(Ctx& c) {
    std::uniform_real_distribution<double> u(-0.8, 0.8);
    int per = c.share(2);
    for (int t = 0; t < per; ++t) {
        Point p(5);
        for (auto& x : p) x = u(c.rng);
        auto rep = quadric_embedding_check(2, 1.0, p);
        c.check("quadric/n2-L1", p, {rep.metric_residual, rep.constraint_residual}, 1e-10);
    }
    for (int t = 0; t < per; ++t) {
        Point p(7);
        for (auto& x : p) x = u(c.rng);
        auto rep = quadric_embedding_check(3, 0.5, p);
        c.check("quadric/n3-L0.5", p, {rep.metric_residual, rep.constraint_residual},
                1e-10);
    }
}

void suite_incidence(Ctx& c) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int per = c.share(2);
    for (int t = 0; t < per; ++t) {
        Point pt = {u(c.rng), u(c.rng), u(c.rng), u(c.rng)};
        auto xs = seed_point(pt, 2);
        std::vector<Jet> P = {xs[0], xs[1], constant(1.0, xs[0].config())};
        std::vector<Jet> L = {xs[2], xs[3], 1.0 - xs[0] * xs[2] - xs[1] * xs[3]};
        auto g = incidence_metric(P, L);
        double p = pt[2], q = pt[3];
        double res = 0;
        res = std::max(res, std::abs(g.at({0, 0}).value() - p * p));
        res = std::max(res, std::abs(g.at({0, 1}).value() - p * q));
        res = std::max(res, std::abs(g.at({1, 1}).value() - q * q));
        res = std::max(res, std::abs(g.at({0, 2}).value() - 0.5));
        res = std::max(res, std::abs(g.at({1, 3}).value() - 0.5));
        res = std::max(res, std::abs(g.at({2, 3}).value()));
        c.check("affine-model", pt, {res}, 1e-12);
    }
    for (int t = 0; t < per; ++t) {
        double x0 = u(c.rng), x1 = u(c.rng), z0 = u(c.rng), z1 = u(c.rng);
        double Pv[3] = {x0, x1, 1.0};
        double Lv[3] = {z0, z1, 1.0 - x0 * z0 - x1 * z1};
        double M[3] = {u(c.rng), u(c.rng), 0.0};
        M[2] = -(M[0] * Pv[0] + M[1] * Pv[1]);
        double V[3] = {M[1], -M[0], 0.0};
        JetConfig cfg{1, 2};
        auto tj = seed(0, 0.0, cfg);
        std::vector<Jet> Pj, Lj;
        for (int a = 0; a < 3; ++a) {
            Pj.push_back(Pv[a] + tj * V[a]);
            Lj.push_back(Lv[a] + tj * M[a]);
        }
        Jet norm = Pj[0] * Lj[0] + Pj[1] * Lj[1] + Pj[2] * Lj[2];
        for (int a = 0; a < 3; ++a) Lj[a] = Lj[a] / norm;
        auto g = incidence_metric(Pj, Lj);
        c.check("null-pencil-displacement", {x0, x1, z0, z1},
                {std::abs(g.at({0, 0}).value())}, 1e-12);
    }
}

void suite_hyperhermitian(Ctx& c) {
    auto dm = build_dm(flat_structure(plane()), 1.0);
    int per = c.share(3);
    for (int t = 0; t < per; ++t) {
        long rs = 0;
        auto p = dm.chart.sample(c.rng, &rs);
        auto rep = parallel_structure_residuals(dm, p);
        c.check("lie-form/model", p, {rep.hh}, 1e-10, rs);
        c.check("beta/model", p, {rep.beta}, 1e-10);
    }
    auto A = of_y2([](const Jet& y) { return cos(y); });
    auto B = of_y2([](const Jet& y) { return y; });
    auto dm2 = build_dm(normal_form_structure(A, B, plane()), 1.0);
    for (int t = 0; t < per; ++t) {
        auto p = dm2.chart.sample(c.rng);
        c.check("beta/curved", p, {parallel_structure_residuals(dm2, p).beta}, 1e-10);
    }
    for (int t = 0; t < std::min(per, 5); ++t) {
        auto p = dm.chart.sample(c.rng);
        c.detect("beta-control", p, parallel_structure_residuals(dm, p, 5.0).beta, 1e-3);
    }
}

using SuiteFn = void (*)(Ctx&);

const std::vector<std::pair<std::string, SuiteFn>>& registry() {
    static const std::vector<std::pair<std::string, SuiteFn>> r = {
        {"projective-invariance", suite_projective},
        {"dm-einstein", suite_dm_einstein},
        {"asd-weyl", suite_asd_weyl},
        {"kk-lift", suite_kk_lift},
        {"appendix-a", suite_appendix_a},
        {"jones-tod", suite_jones_tod},
        {"ew-residuals", suite_ew_residuals},
        {"monopoles", suite_monopoles},
        {"symmetry-criterion", suite_symmetry},
        {"minitwistor", suite_minitwistor},
        {"toda-catalog", suite_toda_catalog},
        {"tod-steps", suite_tod_steps},
        {"appendix-b", suite_appendix_b},
        {"quadric", suite_quadric},
        {"incidence", suite_incidence},
        {"hyperhermitian", suite_hyperhermitian},
    };
    return r;
}

}  // namespace

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& [nm, fn] : registry()) n.push_back(nm);
        return n;
    }();
    return names;
}

Report run_suite(const SuiteSpec& spec) {
    if (spec.samples < 1) throw SuiteError("sample count must be >= 1");
    const SuiteFn* fn = nullptr;
    for (const auto& [nm, f] : registry())
        if (nm == spec.name) fn = &f;
    if (!fn) throw SuiteError("unknown suite: " + spec.name);
    Ctx ctx(spec);
    (*fn)(ctx);
    Report& rep = ctx.rep;
    int passes = 0;
    for (const auto& ch : rep.checks) {
        if (ch.pass) ++passes;
        if (!ch.detect)
            for (double v : ch.residuals) rep.max_residual = std::max(rep.max_residual, v);
        rep.all_pass = rep.all_pass && ch.pass;
    }
    rep.pass_rate = rep.checks.empty()
                        ? 1.0
                        : static_cast<double>(passes) / static_cast<double>(rep.checks.size());
    return rep;
}

std::string report_json(const Report& rep) {
    nlohmann::json j;
    j["suite"] = rep.suite;
    j["seed"] = rep.seed;
    j["samples"] = rep.samples;
    j["jet_order"] = rep.jet_order;
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& ch : rep.checks) {
        nlohmann::json rec;
        rec["id"] = ch.id;
        rec["point"] = ch.point;
        rec["residuals"] = ch.residuals;
        rec["threshold"] = ch.threshold;
        rec["detect"] = ch.detect;
        rec["pass"] = ch.pass;
        rec["resamples"] = ch.resamples;
        checks.push_back(std::move(rec));
    }
    j["checks"] = std::move(checks);
    j["summary"] = {{"checks", rep.checks.size()},
                    {"pass_rate", rep.pass_rate},
                    {"max_residual", rep.max_residual},
                    {"all_pass", rep.all_pass}};
    return j.dump(2) + "\n";
}

std::string report_text(const Report& rep) {
    std::ostringstream os;
    os << std::setprecision(17);
    int passes = 0;
    for (const auto& ch : rep.checks) passes += ch.pass ? 1 : 0;
    os << "suite " << rep.suite << " seed " << rep.seed << " samples " << rep.samples
       << ": " << passes << "/" << rep.checks.size() << " checks passed, max residual "
       << rep.max_residual << "\n";
    int shown = 0;
    for (const auto& ch : rep.checks) {
        if (ch.pass) continue;
        if (++shown > 25) {
            os << "  ... more failures omitted\n";
            break;
        }
        os << "  FAIL " << ch.id << (ch.detect ? " (control not detected)" : "")
           << " threshold " << ch.threshold << " residuals";
        for (double v : ch.residuals) os << " " << v;
        os << "\n";
    }
    os << (rep.all_pass ? "PASS" : "FAIL") << "\n";
    return os.str();
}

// ---- level-set export -------------------------------------------------------

LevelsetReport export_levelset(const std::string& entry, double u0, int grid) {
    const auto& e = catalog_entry(entry);
    if (grid < 2) throw SuiteError("grid resolution must be >= 2");
    LevelsetReport rep;
    rep.entry = entry;
    rep.u0 = u0;
    rep.grid = grid;
    const auto& box = e.box.box;
    auto eval = [&](const Point& p) -> double {
        return e.u.value(p);  // may throw on branch loss / guard regions
    };
    auto node = [&](int axis, int i) {
        return box[axis].first + (box[axis].second - box[axis].first) * i / grid;
    };
    for (int axis = 0; axis < 3; ++axis) {
        int t1 = (axis + 1) % 3, t2 = (axis + 2) % 3;
        for (int i = 0; i <= grid; ++i)
            for (int j = 0; j <= grid; ++j) {
                Point p(3);
                p[t1] = node(t1, i);
                p[t2] = node(t2, j);
                bool have_prev = false;
                double prev_x = 0, prev_f = 0;
                for (int k = 0; k <= grid; ++k) {
                    p[axis] = node(axis, k);
                    double f;
                    try {
                        f = eval(p) - u0;
                    } catch (const std::exception&) {
                        have_prev = false;
                        continue;
                    }
                    if (have_prev) {
                        ++rep.scanned;
                        if ((prev_f < 0) != (f < 0) || prev_f == 0.0) {
                            // bisect the bracket down to machine width
                            double a = prev_x, b = p[axis], fa = prev_f;
                            double mid = a, fm = fa;
                            bool ok = true;
                            for (int it = 0; it < 80 && b - a > 1e-15; ++it) {
                                mid = 0.5 * (a + b);
                                Point q = p;
                                q[axis] = mid;
                                try {
                                    fm = eval(q) - u0;
                                } catch (const std::exception&) {
                                    ok = false;
                                    break;
                                }
                                if (fm == 0.0) break;
                                if ((fa < 0) != (fm < 0))
                                    b = mid;
                                else {
                                    a = mid;
                                    fa = fm;
                                }
                            }
                            if (ok && std::abs(fm) <= 1e-6) {
                                Point q = p;
                                q[axis] = mid;
                                rep.points.push_back({q[0], q[1], q[2], u0 + fm});
                            }
                        }
                    }
                    have_prev = true;
                    prev_x = p[axis];
                    prev_f = f;
                }
            }
    }
    return rep;
}

void write_levelset_csv(const LevelsetReport& r, std::ostream& os) {
    os << "X,Y,Z,U\n" << std::setprecision(17);
    for (const auto& row : r.points)
        os << row[0] << "," << row[1] << "," << row[2] << "," << row[3] << "\n";
}

void write_levelset_obj(const LevelsetReport& r, std::ostream& os) {
    os << "# level set U = " << r.u0 << " of catalog entry " << r.entry << "\n"
       << std::setprecision(17);
    for (const auto& row : r.points)
        os << "v " << row[0] << " " << row[1] << " " << row[2] << "\n";
}

std::string conventions_text() {
    return
        "curvature sign: R_{abc}^d = d_a G^d_{bc} - d_b G^d_{ac} + G G terms, "
        "R_{ab} = R_{cab}^c; the unit round 2-sphere has scalar +2\n"
        "cotangent-bundle family: R = 4n(n+1)Λ (n = 2 gives scalar 24 at "
        "Λ = 1); circle-bundle lift: R = 2n(2n+1)Λ\n"
        "wedge conventions: classical (dx^a ^ dx^b has components +1/-1) and raw "
        "(plain antisymmetrization, 1/k! of the classical components); both are "
        "carried explicitly by the exterior-calculus layer, internal math is "
        "classical\n"
        "orientation: cotangent-bundle metrics carry orientation -1 w.r.t. "
        "(x0, x1, z0, z1) (the side on which the Weyl tensor is anti-self-dual); "
        "the linear-potential hyper-Kaehler metric carries +1\n"
        "Killing reductions: the 4D star orientation is a per-example choice "
        "(the opposite choice flips the sign of omega); the reference quotients "
        "use +1, the rotational quotient of the hyper-Kaehler metric uses -1\n"
        "Toda equation: U_XX + U_YY = eps (e^U)_ZZ; the eps = -1 Einstein-Weyl "
        "convention note: h = e^U (dX^2 + dY^2) - eps dZ^2 with omega = 2 U_Z dZ, "
        "so eps = -1 flips the sign of the dZ^2 term (indefinite branch)\n"
        "moment map: dZ_a = Theta_{ba} K^b with Theta = c^3 (dK + star dK)/2 and "
        "c = 4 / sqrt|F_ab F^ab|\n";
}

// ---- command line ----------------------------------------------------------

namespace {

bool parse_tols(const std::vector<std::string>& tols, std::map<std::string, double>& out,
                std::ostream& err) {
    for (const auto& t : tols) {
        auto eq = t.find('=');
        try {
            if (eq == std::string::npos) {
                out["*"] = std::stod(t);
            } else {
                std::string key = t.substr(0, eq);
                if (key.empty()) throw std::invalid_argument("empty id");
                out[key] = std::stod(t.substr(eq + 1));
            }
        } catch (const std::exception&) {
            err << "bad --tol value '" << t << "' (expected value or id=value)\n";
            return false;
        }
    }
    return true;
}

bool parse_box(const std::string& s, std::vector<std::pair<double, double>>& out,
               std::ostream& err) {
    std::istringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto colon = item.find(':');
        try {
            if (colon == std::string::npos) throw std::invalid_argument("no ':'");
            double lo = std::stod(item.substr(0, colon));
            double hi = std::stod(item.substr(colon + 1));
            if (lo >= hi) throw std::invalid_argument("lo >= hi");
            out.push_back({lo, hi});
        } catch (const std::exception&) {
            err << "bad --box interval '" << item << "' (expected lo:hi with lo < hi)\n";
            return false;
        }
    }
    if (out.empty()) {
        err << "empty --box\n";
        return false;
    }
    return true;
}

bool write_output(const std::string& path, const std::string& text, std::ostream& out,
                  std::ostream& err) {
    if (path.empty()) {
        out << text;
        return true;
    }
    std::ofstream f(path);
    if (!f) {
        err << "cannot open output file: " << path << "\n";
        return false;
    }
    f << text;
    return true;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"verification suites and level-set export for the projective-to-Toda "
                 "pipeline"};
    app.require_subcommand(1);

    SuiteSpec spec;
    std::vector<std::string> tols;
    std::string boxstr, run_out, run_format = "text";
    auto* run = app.add_subcommand("run", "run a named verification suite");
    std::string names;
    for (const auto& n : suite_names()) names += (names.empty() ? "" : ", ") + n;
    run->add_option("--suite", spec.name,
                    "suite name (" + names + "); required here or in the config file");
    run->add_option("--seed", spec.seed, "random seed (default 7)");
    run->add_option("--samples", spec.samples, "sample budget per suite (default 200)");
    run->add_option("--tol", tols,
                    "tolerance override: a bare value for all checks, or id=value "
                    "(repeatable; id may be a prefix up to '/')");
    run->add_option("--out", run_out, "write the report to a file instead of stdout");
    run->add_option("--format", run_format, "report format")
        ->check(CLI::IsMember({"json", "text"}));
    run->add_option("--box", boxstr, "sampling box override: lo:hi,lo:hi,...");
    std::string cfg_path;
    run->add_option("--config", cfg_path,
                    "line-oriented key=value config file (suite, seed, samples, tol, "
                    "out, format, box; explicit flags take precedence)");

    std::string entry, ls_out, ls_format = "csv";
    double u0 = 0;
    int grid = 12;
    auto* ls = app.add_subcommand("export-levelset",
                                  "export a U = U0 level-set point cloud of a catalog "
                                  "entry");
    ls->add_option("--entry", entry, "catalog entry name")->required();
    ls->add_option("--u0", u0, "level value U0")->required();
    ls->add_option("--grid", grid, "grid resolution per axis (default 12)");
    ls->add_option("--out", ls_out, "output file (default stdout)");
    ls->add_option("--format", ls_format, "output format")
        ->check(CLI::IsMember({"csv", "obj"}));

    app.add_subcommand("conventions", "print the sign/orientation/normalization ledger");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& ex) {
        err << ex.what() << "\n";
        return 2;
    }

    if (run->parsed()) {
        if (!cfg_path.empty()) {
            std::ifstream f(cfg_path);
            if (!f) {
                err << "cannot open config file: " << cfg_path << "\n";
                return 2;
            }
            std::string line;
            int lineno = 0;
            while (std::getline(f, line)) {
                ++lineno;
                auto first = line.find_first_not_of(" \t\r");
                if (first == std::string::npos || line[first] == '#') continue;
                auto eq = line.find('=');
                if (eq == std::string::npos) {
                    err << cfg_path << ":" << lineno << ": expected key=value\n";
                    return 2;
                }
                auto strip = [](std::string s) {
                    auto a = s.find_first_not_of(" \t\r");
                    auto b = s.find_last_not_of(" \t\r");
                    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
                };
                std::string key = strip(line.substr(0, eq));
                std::string val = strip(line.substr(eq + 1));
                try {
                    // explicit command-line flags take precedence over the file
                    if (key == "suite") {
                        if (!run->count("--suite")) spec.name = val;
                    } else if (key == "seed") {
                        if (!run->count("--seed")) spec.seed = std::stoull(val);
                    } else if (key == "samples") {
                        if (!run->count("--samples")) spec.samples = std::stoi(val);
                    } else if (key == "tol") {
                        tols.push_back(val);  // accumulates with command-line --tol
                    } else if (key == "out") {
                        if (!run->count("--out")) run_out = val;
                    } else if (key == "format") {
                        if (val != "json" && val != "text")
                            throw std::invalid_argument("format must be json or text");
                        if (!run->count("--format")) run_format = val;
                    } else if (key == "box") {
                        if (!run->count("--box")) boxstr = val;
                    } else {
                        throw std::invalid_argument("unknown key");
                    }
                } catch (const std::exception& ex) {
                    err << cfg_path << ":" << lineno << ": bad entry '" << key << "="
                        << val << "' (" << ex.what() << ")\n";
                    return 2;
                }
            }
        }
        if (spec.name.empty()) {
            err << "--suite is required (on the command line or in the config file)\n";
            return 2;
        }
        if (!parse_tols(tols, spec.tol, err)) return 2;
        if (!boxstr.empty()) {
            std::vector<std::pair<double, double>> b;
            if (!parse_box(boxstr, b, err)) return 2;
            spec.box = std::move(b);
        }
        Report rep;
        try {
            rep = run_suite(spec);
        } catch (const std::exception& ex) {
            err << ex.what() << "\n";
            return 2;
        }
        std::string text = run_format == "json" ? report_json(rep) : report_text(rep);
        if (!write_output(run_out, text, out, err)) return 2;
        return rep.all_pass ? 0 : 1;
    }
    if (ls->parsed()) {
        LevelsetReport rep;
        try {
            rep = export_levelset(entry, u0, grid);
        } catch (const std::exception& ex) {
            err << ex.what() << "\n";
            return 2;
        }
        std::ostringstream ss;
        if (ls_format == "obj")
            write_levelset_obj(rep, ss);
        else
            write_levelset_csv(rep, ss);
        if (!write_output(ls_out, ss.str(), out, err)) return 2;
        if (rep.empty())
            err << "empty level set in box (scanned " << rep.scanned << " segments)\n";
        return 0;
    }
    out << conventions_text();
    return 0;
}

}  // namespace tg
