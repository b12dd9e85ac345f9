#include "tg/fields.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

namespace tg {

ScalarField sf_constant(int dim, double v) {
    return {dim, [v](const std::vector<Jet>& xs) { return constant(v, xs[0].config()); }};
}

ScalarField sf_coord(int dim, int i) {
    return {dim, [i](const std::vector<Jet>& xs) { return xs[i]; }};
}

bool Chart::admits(const Point& p) const {
    for (int i = 0; i < dim; ++i)
        if (p[i] <= box[i].first || p[i] >= box[i].second) return false;
    for (const auto& g : guards)
        if (std::abs(g.f.value(p)) <= g.floor) return false;
    return true;
}

Point Chart::sample(std::mt19937_64& rng, long* resamples) const {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int attempt = 0; attempt < 100; ++attempt) {
        Point p(dim);
        for (int i = 0; i < dim; ++i)
            p[i] = box[i].first + (box[i].second - box[i].first) * u(rng);
        bool ok = true;
        for (const auto& g : guards)
            if (std::abs(g.f.value(p)) <= g.floor) { ok = false; break; }
        if (ok) return p;
        if (resamples) ++*resamples;
    }
    throw FieldError("guard exhaustion: cannot find a valid sample in 100x attempts");
}

Chart make_chart(std::vector<std::string> names,
                 std::vector<std::pair<double, double>> box,
                 std::vector<Guard> guards) {
    Chart c;
    c.dim = static_cast<int>(names.size());
    c.names = std::move(names);
    c.box = std::move(box);
    c.guards = std::move(guards);
    if (c.box.size() != static_cast<size_t>(c.dim)) throw FieldError("chart box/names mismatch");
    return c;
}

JTensor::JTensor(int dim_, int rank_, JetConfig cfg) : dim(dim_), rank(rank_) {
    int n = 1;
    for (int i = 0; i < rank; ++i) n *= dim;
    c.assign(n, constant(0.0, cfg));
}

int JTensor::flat(const std::vector<int>& idx) const {
    int f = 0;
    for (int i = 0; i < rank; ++i) f = f * dim + idx[i];
    return f;
}

void JTensor::unflatten(int f, std::vector<int>& idx) const {
    idx.resize(rank);
    for (int i = rank - 1; i >= 0; --i) {
        idx[i] = f % dim;
        f /= dim;
    }
}

JetConfig jconfig(const JTensor& t) { return t.c.at(0).config(); }

JTensor& JTensor::operator+=(const JTensor& o) {
    for (size_t i = 0; i < c.size(); ++i) c[i] += o.c[i];
    return *this;
}

JTensor& JTensor::operator-=(const JTensor& o) {
    for (size_t i = 0; i < c.size(); ++i) c[i] -= o.c[i];
    return *this;
}

JTensor operator*(const JTensor& a, double s) {
    JTensor r = a;
    for (auto& x : r.c) x *= s;
    return r;
}

JTensor operator*(const JTensor& a, const Jet& s) {
    JTensor r = a;
    for (auto& x : r.c) x = x * s;
    return r;
}

JTensor tensor_product(const JTensor& a, const JTensor& b) {
    JTensor r(a.dim, a.rank + b.rank, jconfig(a));
    for (int i = 0; i < a.size(); ++i)
        for (int j = 0; j < b.size(); ++j) r.c[i * b.size() + j] = a.c[i] * b.c[j];
    return r;
}

JTensor contract(const JTensor& t, int s1, int s2) {
    if (s1 > s2) std::swap(s1, s2);
    JTensor r(t.dim, t.rank - 2, jconfig(t));
    std::vector<int> idx, ridx;
    for (int f = 0; f < t.size(); ++f) {
        t.unflatten(f, idx);
        if (idx[s1] != idx[s2]) continue;
        ridx.clear();
        for (int i = 0; i < t.rank; ++i)
            if (i != s1 && i != s2) ridx.push_back(idx[i]);
        r.at(ridx) += t.c[f];
    }
    return r;
}

JTensor tensor_derivative(const JTensor& t) {
    JTensor r(t.dim, t.rank + 1, JetConfig{jconfig(t).dim, jconfig(t).order - 1});
    for (int f = 0; f < t.size(); ++f)
        for (int a = 0; a < t.dim; ++a) r.c[a * t.size() + f] = derivative(t.c[f], a);
    return r;
}

JTensor truncate(const JTensor& t, int order) {
    JTensor r = t;
    for (auto& x : r.c) x = truncate(x, order);
    return r;
}

JTensor transpose(const JTensor& t, int s1, int s2) {
    JTensor r(t.dim, t.rank, jconfig(t));
    std::vector<int> idx;
    for (int f = 0; f < t.size(); ++f) {
        t.unflatten(f, idx);
        std::swap(idx[s1], idx[s2]);
        r.at(idx) = t.c[f];
    }
    return r;
}

namespace {

void for_permutations(int n, const std::function<void(const std::vector<int>&, int sign)>& body) {
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    // Iterate in lexicographic order, computing parity by inversion count.
    do {
        int inv = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (p[i] > p[j]) ++inv;
        body(p, (inv % 2) ? -1 : 1);
    } while (std::next_permutation(p.begin(), p.end()));
}

double factorial(int n) {
    double f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

}  // namespace

JTensor antisymmetrize(const JTensor& t) {
    JTensor r(t.dim, t.rank, jconfig(t));
    std::vector<int> idx, pidx(t.rank);
    const double w = 1.0 / factorial(t.rank);
    for (int f = 0; f < t.size(); ++f) {
        t.unflatten(f, idx);
        Jet acc = constant(0.0, jconfig(t));
        for_permutations(t.rank, [&](const std::vector<int>& p, int sign) {
            for (int i = 0; i < t.rank; ++i) pidx[i] = idx[p[i]];
            if (sign > 0)
                acc += t.at(pidx);
            else
                acc -= t.at(pidx);
        });
        r.c[f] = acc * w;
    }
    return r;
}

JTensor symmetrize(const JTensor& t) {
    JTensor r(t.dim, t.rank, jconfig(t));
    std::vector<int> idx, pidx(t.rank);
    const double w = 1.0 / factorial(t.rank);
    for (int f = 0; f < t.size(); ++f) {
        t.unflatten(f, idx);
        Jet acc = constant(0.0, jconfig(t));
        for_permutations(t.rank, [&](const std::vector<int>& p, int) {
            for (int i = 0; i < t.rank; ++i) pidx[i] = idx[p[i]];
            acc += t.at(pidx);
        });
        r.c[f] = acc * w;
    }
    return r;
}

Jet det(const JTensor& g) {
    const int n = g.dim;
    // LU with partial pivoting on constant terms.
    std::vector<Jet> a = g.c;
    auto at = [&](int i, int j) -> Jet& { return a[i * n + j]; };
    Jet d = constant(1.0, jconfig(g));
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(at(i, k).value()) > std::abs(at(piv, k).value())) piv = i;
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(at(k, j), at(piv, j));
            d *= -1.0;
        }
        if (at(k, k).value() == 0.0) return constant(0.0, jconfig(g));
        d = d * at(k, k);
        for (int i = k + 1; i < n; ++i) {
            Jet m = at(i, k) / at(k, k);
            for (int j = k; j < n; ++j) at(i, j) -= m * at(k, j);
        }
    }
    return d;
}

JTensor inverse(const JTensor& g) {
    const int n = g.dim;
    std::vector<Jet> a = g.c;
    JTensor inv(n, 2, jconfig(g));
    auto at = [&](int i, int j) -> Jet& { return a[i * n + j]; };
    auto bt = [&](int i, int j) -> Jet& { return inv.c[i * n + j]; };
    for (int i = 0; i < n; ++i) bt(i, i) += 1.0;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(at(i, k).value()) > std::abs(at(piv, k).value())) piv = i;
        if (std::abs(at(piv, k).value()) < 1e-300)
            throw FieldError("inverse: degenerate matrix");
        if (piv != k)
            for (int j = 0; j < n; ++j) {
                std::swap(at(k, j), at(piv, j));
                std::swap(bt(k, j), bt(piv, j));
            }
        Jet p = at(k, k);
        for (int j = 0; j < n; ++j) {
            at(k, j) = at(k, j) / p;
            bt(k, j) = bt(k, j) / p;
        }
        for (int i = 0; i < n; ++i) {
            if (i == k) continue;
            Jet m = at(i, k);
            if (m.value() == 0.0) {
                bool zero = true;
                for (double cc : m.coeffs())
                    if (cc != 0.0) { zero = false; break; }
                if (zero) continue;
            }
            for (int j = 0; j < n; ++j) {
                at(i, j) -= m * at(k, j);
                bt(i, j) -= m * bt(k, j);
            }
        }
    }
    return inv;
}

double fro_norm(const JTensor& t) {
    double s = 0;
    for (const auto& x : t.c) s += x.value() * x.value();
    return std::sqrt(s);
}

double max_abs(const JTensor& t) {
    double m = 0;
    for (const auto& x : t.c) m = std::max(m, std::abs(x.value()));
    return m;
}

std::vector<double> values(const JTensor& t) {
    std::vector<double> v(t.c.size());
    for (size_t i = 0; i < t.c.size(); ++i) v[i] = t.c[i].value();
    return v;
}

JTensor TensorField::eval(const std::vector<Jet>& xs) const {
    JTensor r(chart.dim, rank(), xs[0].config());
    for (int i = 0; i < r.size(); ++i) r.c[i] = comps[i](xs);
    return r;
}

TensorField make_tensor(const Chart& chart, std::string variance,
                        std::vector<ScalarField> comps) {
    TensorField t;
    t.chart = chart;
    t.variance = std::move(variance);
    t.comps = std::move(comps);
    int n = 1;
    for (size_t i = 0; i < t.variance.size(); ++i) n *= chart.dim;
    if (t.comps.size() != static_cast<size_t>(n)) throw FieldError("tensor component count mismatch");
    return t;
}

TensorField make_tensor(const Chart& chart, std::string variance,
                        std::function<Jet(const std::vector<Jet>&, const std::vector<int>&)> gen) {
    int rank = static_cast<int>(variance.size());
    int n = 1;
    for (int i = 0; i < rank; ++i) n *= chart.dim;
    std::vector<ScalarField> comps;
    comps.reserve(n);
    for (int f = 0; f < n; ++f) {
        std::vector<int> idx(rank);
        int g = f;
        for (int i = rank - 1; i >= 0; --i) {
            idx[i] = g % chart.dim;
            g /= chart.dim;
        }
        comps.push_back({chart.dim, [gen, idx](const std::vector<Jet>& xs) { return gen(xs, idx); }});
    }
    return make_tensor(chart, std::move(variance), std::move(comps));
}

JTensor to_classical(const JTensor& form, FormConv from) {
    if (from == FormConv::Classical) return form;
    return form * factorial(form.rank);
}

JTensor to_raw(const JTensor& form, FormConv from) {
    if (from == FormConv::Raw) return form;
    return form * (1.0 / factorial(form.rank));
}

JTensor ext_d(const JTensor& form, FormConv cv) {
    const int k = form.rank;
    JTensor grad = tensor_derivative(form);  // (a, i1..ik)
    JTensor r(form.dim, k + 1, jconfig(grad));
    std::vector<int> idx, src(k);
    for (int f = 0; f < r.size(); ++f) {
        r.unflatten(f, idx);
        Jet acc = constant(0.0, jconfig(grad));
        for (int j = 0; j <= k; ++j) {
            // term: (-1)^j d_{idx[j]} form_{idx without j}
            std::vector<int> g;
            g.push_back(idx[j]);
            for (int i = 0; i <= k; ++i)
                if (i != j) g.push_back(idx[i]);
            if (j % 2 == 0)
                acc += grad.at(g);
            else
                acc -= grad.at(g);
        }
        r.c[f] = acc;
    }
    if (cv == FormConv::Raw) r = r * (1.0 / (k + 1));
    return r;
}

JTensor wedge(const JTensor& a, const JTensor& b, FormConv cv) {
    JTensor r = antisymmetrize(tensor_product(a, b));
    if (cv == FormConv::Classical) {
        const int p = a.rank, q = b.rank;
        r = r * (factorial(p + q) / (factorial(p) * factorial(q)));
    }
    return r;
}

JTensor interior(const JTensor& v, const JTensor& form) {
    return contract(tensor_product(v, form), 0, 1);
}

JTensor interior_normalized(const JTensor& v, const JTensor& form, FormConv cv) {
    JTensor r = interior(v, form);
    if (cv == FormConv::Raw) r = r * static_cast<double>(form.rank);
    return r;
}

JTensor lie_derivative(const JTensor& v, const JTensor& t, const std::string& variance) {
    const int ord = std::min(jconfig(v).order, jconfig(t).order) - 1;
    if (ord < 0) throw FieldError("lie_derivative: insufficient jet order");
    JTensor tt = truncate(t, ord + 1);
    JTensor vv = truncate(v, ord + 1);
    JTensor dt = tensor_derivative(tt);       // (c, i...)
    JTensor dv = tensor_derivative(vv);       // dv(a, c) = d_a v^c
    JTensor vl = truncate(vv, ord);
    // v^c d_c T
    JTensor r = contract(tensor_product(vl, dt), 0, 1);
    std::vector<int> idx, jdx;
    for (int f = 0; f < r.size(); ++f) {
        r.unflatten(f, idx);
        for (size_t s = 0; s < variance.size(); ++s) {
            jdx = idx;
            Jet acc = constant(0.0, jconfig(r));
            for (int cidx = 0; cidx < t.dim; ++cidx) {
                jdx[s] = cidx;
                Jet tc = truncate(tt.at(jdx), ord);
                if (variance[s] == 'l') {
                    // + T_{..c..} d_{a_s} v^c
                    acc += tc * dv.at({idx[s], cidx});
                } else {
                    // - T^{..c..} d_c v^{a_s}
                    acc -= tc * dv.at({cidx, idx[s]});
                }
            }
            r.c[f] += acc;
        }
    }
    return r;
}

JTensor hodge_star(const JTensor& g, int orientation, const JTensor& form) {
    const int n = g.dim;
    const int k = form.rank;
    JetConfig cfg = jconfig(form);
    Jet dg = det(g);
    if (std::abs(dg.value()) < 1e-10) throw FieldError("hodge_star: degenerate metric");
    Jet vol = abs_sqrt(dg) * static_cast<double>(orientation);
    JTensor ginv = inverse(g);
    // Raise all indices of the form.
    JTensor up = form;
    for (int s = 0; s < k; ++s) {
        JTensor tmp = contract(tensor_product(ginv, up), 1, 2 + s);
        // contraction left the new index in slot 0; rotate it into slot s
        // tensor_product(ginv, up): slots (a, b, i1..ik); contract b with i_{s+1}
        // result slots: (a, i1..is, i_{s+2}..): need new 'a' moved to position s.
        JTensor rot(up.dim, k, jconfig(tmp));
        std::vector<int> idx, src(k);
        for (int f = 0; f < rot.size(); ++f) {
            rot.unflatten(f, idx);
            // src for tmp: (idx[s], idx[0..s-1], idx[s+1..])
            src[0] = idx[s];
            int w = 1;
            for (int i = 0; i < k; ++i)
                if (i != s) src[w++] = idx[i];
            rot.c[f] = tmp.at(src);
        }
        up = rot;
    }
    JTensor r(n, n - k, cfg);
    std::vector<int> aidx(k), bidx(n - k);
    for_permutations(n, [&](const std::vector<int>& p, int sign) {
        for (int i = 0; i < k; ++i) aidx[i] = p[i];
        for (int i = 0; i < n - k; ++i) bidx[i] = p[k + i];
        Jet term = up.at(aidx) * vol * (sign / factorial(k));
        r.at(bidx) += term;
    });
    return r;
}

JTensor pullback_at(const std::vector<ScalarField>& map, const TensorField& t,
                    const Point& u, int order) {
    auto us = seed_point(u, order);
    std::vector<Jet> xs;
    xs.reserve(map.size());
    for (const auto& m : map) xs.push_back(m(us));
    JTensor tv = t.eval(xs);  // components as jets in u already
    const int r = t.rank();
    const int n = static_cast<int>(map.size());
    const int m = static_cast<int>(u.size());
    JetConfig lo{m, order - 1};
    // Jacobian d x^a / d u^i
    std::vector<std::vector<Jet>> J(n, std::vector<Jet>(m, constant(0.0, lo)));
    for (int a = 0; a < n; ++a)
        for (int i = 0; i < m; ++i) J[a][i] = derivative(xs[a], i);
    JTensor tvl = truncate(tv, order - 1);

    JTensor out(m, r, lo);
    std::vector<int> oidx, sidx(r);
    for (int f = 0; f < out.size(); ++f) {
        out.unflatten(f, oidx);
        Jet acc = constant(0.0, lo);
        // sum over all source indices
        int total = 1;
        for (int i = 0; i < r; ++i) total *= n;
        for (int s = 0; s < total; ++s) {
            int g = s;
            for (int i = r - 1; i >= 0; --i) {
                sidx[i] = g % n;
                g /= n;
            }
            Jet term = tvl.at(sidx);
            for (int i = 0; i < r; ++i) term = term * J[sidx[i]][oidx[i]];
            acc += term;
        }
        out.c[f] = acc;
    }
    return out;
}

TensorField pullback_field(const Chart& source, const std::vector<ScalarField>& map,
                           const TensorField& t) {
    const int r = t.rank();
    std::string var(r, 'l');
    auto mapc = map;
    auto tc = t;
    return make_tensor(source, var,
                       [mapc, tc](const std::vector<Jet>& us, const std::vector<int>& idx) {
                           // The chain rule costs one order, so re-seed the
                           // map arguments one order higher than requested.
                           JetConfig cfg = us[0].config();
                           Point u(cfg.dim);
                           for (int i = 0; i < cfg.dim; ++i) u[i] = us[i].value();
                           auto hi = seed_point(u, cfg.order + 1);
                           std::vector<Jet> xs;
                           xs.reserve(mapc.size());
                           for (const auto& m : mapc) xs.push_back(m(hi));
                           JTensor tv = tc.eval(xs);
                           const int rr = tc.rank();
                           const int n = static_cast<int>(mapc.size());
                           JetConfig lo = cfg;
                           JTensor tvl = truncate(tv, lo.order);
                           std::vector<Jet> dphi(n * cfg.dim, constant(0.0, lo));
                           for (int a = 0; a < n; ++a)
                               for (int i = 0; i < cfg.dim; ++i)
                                   dphi[a * cfg.dim + i] = derivative(xs[a], i);
                           Jet acc = constant(0.0, lo);
                           int total = 1;
                           for (int i = 0; i < rr; ++i) total *= n;
                           std::vector<int> sidx(rr);
                           for (int s = 0; s < total; ++s) {
                               int g = s;
                               for (int i = rr - 1; i >= 0; --i) {
                                   sidx[i] = g % n;
                                   g /= n;
                               }
                               Jet term = tvl.at(sidx);
                               for (int i = 0; i < rr; ++i)
                                   term = term * dphi[sidx[i] * cfg.dim + idx[i]];
                               acc += term;
                           }
                           return acc;
                       });
}

ScalarField field_from_evaluator(int dim, std::function<Jet(const Point&, int)> ev) {
    return {dim, [ev](const std::vector<Jet>& xs) {
                JetConfig cfg = xs[0].config();
                Point x0(xs.size());
                for (size_t i = 0; i < xs.size(); ++i) x0[i] = xs[i].value();
                Jet f = ev(x0, cfg.order);
                std::vector<Jet> delta;
                delta.reserve(xs.size());
                for (size_t i = 0; i < xs.size(); ++i) {
                    Jet d = xs[i];
                    d -= x0[i];
                    delta.push_back(d);
                }
                return compose(f, delta);
            }};
}

TensorField tensorfield_from_evaluator(const Chart& chart, std::string variance,
                                       std::function<JTensor(const Point&, int)> ev) {
    int rank = static_cast<int>(variance.size());
    int n = 1;
    for (int i = 0; i < rank; ++i) n *= chart.dim;
    // One shared per-point cache so all components evaluate the pipeline once.
    struct Cache {
        Point p;
        int order = -1;
        JTensor t;
    };
    auto cache = std::make_shared<Cache>();
    std::vector<ScalarField> comps;
    comps.reserve(n);
    for (int f = 0; f < n; ++f) {
        comps.push_back({chart.dim, [ev, cache, f](const std::vector<Jet>& xs) {
                             JetConfig cfg = xs[0].config();
                             Point x0(xs.size());
                             for (size_t i = 0; i < xs.size(); ++i) x0[i] = xs[i].value();
                             if (cache->order != cfg.order || cache->p != x0) {
                                 cache->t = ev(x0, cfg.order);
                                 cache->p = x0;
                                 cache->order = cfg.order;
                             }
                             std::vector<Jet> delta;
                             delta.reserve(xs.size());
                             for (size_t i = 0; i < xs.size(); ++i) {
                                 Jet d = xs[i];
                                 d -= x0[i];
                                 delta.push_back(d);
                             }
                             return compose(cache->t.c[f], delta);
                         }});
    }
    return make_tensor(chart, std::move(variance), std::move(comps));
}

}  // namespace tg
