#include "tg/jet.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace tg {

namespace {

std::uint64_t pack(const MultiIndex& a, int dim) {
    std::uint64_t p = 0;
    for (int i = 0; i < dim; ++i) p |= std::uint64_t(a[i]) << (4 * i);
    return p;
}

void enumerate_grade(int dim, int grade, MultiIndex& cur, int var, int left,
                     std::vector<MultiIndex>& out) {
    if (var == dim - 1) {
        cur[var] = static_cast<std::uint8_t>(left);
        out.push_back(cur);
        cur[var] = 0;
        return;
    }
    for (int k = left; k >= 0; --k) {
        cur[var] = static_cast<std::uint8_t>(k);
        enumerate_grade(dim, grade, cur, var + 1, left - k, out);
    }
    cur[var] = 0;
}

}  // namespace

void JetTables::build() {
    const int dim = cfg.dim;
    const int order = cfg.order;
    MultiIndex cur{};
    for (int d = 0; d <= order; ++d) enumerate_grade(dim, d, cur, 0, d, idx);
    degree.resize(idx.size());
    for (size_t i = 0; i < idx.size(); ++i) {
        int d = 0;
        for (int v = 0; v < dim; ++v) d += idx[i][v];
        degree[i] = d;
    }
    // Position lookup: packed nibbles, order <= 6 fits in 4 bits per var.
    std::uint64_t maxp = 0;
    for (const auto& a : idx) maxp = std::max(maxp, pack(a, dim));
    pos_.assign(maxp + 1, -1);
    for (size_t i = 0; i < idx.size(); ++i) pos_[pack(idx[i], dim)] = static_cast<int>(i);

    for (size_t i = 0; i < idx.size(); ++i) {
        for (size_t j = 0; j < idx.size(); ++j) {
            if (degree[i] + degree[j] > order) continue;
            MultiIndex s{};
            for (int v = 0; v < dim; ++v) s[v] = idx[i][v] + idx[j][v];
            mul_tab.push_back({static_cast<int>(i), static_cast<int>(j), position(s)});
        }
    }
    for (int v = 0; v < dim; ++v) {
        for (size_t i = 0; i < idx.size(); ++i) {
            if (idx[i][v] == 0) continue;
            MultiIndex s = idx[i];
            s[v] -= 1;
            deriv[v].push_back({static_cast<int>(i), position(s), idx[i][v]});
        }
    }
}

int JetTables::position(const MultiIndex& a) const {
    std::uint64_t p = pack(a, cfg.dim);
    if (p >= pos_.size()) return -1;
    return pos_[p];
}

const JetTables& tables(JetConfig cfg) {
    if (cfg.dim < 1 || cfg.dim > kMaxDim) throw JetError("jet dim out of range");
    if (cfg.order < 0 || cfg.order > kMaxOrder) throw JetError("jet order out of range");
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::unique_ptr<JetTables>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(cfg.dim, cfg.order);
    auto it = cache.find(key);
    if (it == cache.end()) {
        auto t = std::make_unique<JetTables>();
        t->cfg = cfg;
        t->build();
        it = cache.emplace(key, std::move(t)).first;
    }
    return *it->second;
}

Jet::Jet(const JetTables* tab, double value) : tab_(tab), c_(tab->size(), 0.0) {
    c_[0] = value;
}

double Jet::coeff(const MultiIndex& alpha) const {
    int p = tab_->position(alpha);
    if (p < 0) throw JetError("multi-index degree exceeds jet order");
    return c_[p];
}

namespace {
void check_same(const Jet& a, const Jet& b) {
    if (&a.tab() != &b.tab()) throw JetError("jet config mismatch");
}
}  // namespace

Jet& Jet::operator+=(const Jet& o) {
    check_same(*this, o);
    for (size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

Jet& Jet::operator-=(const Jet& o) {
    check_same(*this, o);
    for (size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
}

Jet& Jet::operator*=(double s) {
    for (double& x : c_) x *= s;
    return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
    check_same(a, b);
    Jet r(a.tab_, 0.0);
    for (const auto& [i, j, k] : a.tab_->mul_tab) r.c_[k] += a.c_[i] * b.c_[j];
    return r;
}

Jet operator-(Jet a) {
    for (double& x : a.c_) x = -x;
    return a;
}

Jet operator-(double s, const Jet& a) {
    Jet r = -a;
    r += s;
    return r;
}

Jet compose_univariate(const std::vector<double>& t, const Jet& x) {
    // Horner in the nilpotent part n = x - x.value().
    Jet n = x;
    n[0] = 0.0;
    Jet r = constant(t.empty() ? 0.0 : t.back(), x.config());
    for (int k = static_cast<int>(t.size()) - 2; k >= 0; --k) {
        r = r * n;
        r += t[k];
    }
    return r;
}

namespace {
std::vector<double> recip_coeffs(double c, int order) {
    // 1/(c+u) = sum (-1)^k u^k / c^(k+1)
    std::vector<double> t(order + 1);
    double p = 1.0 / c;
    for (int k = 0; k <= order; ++k) {
        t[k] = p;
        p *= -1.0 / c;
    }
    return t;
}
}  // namespace

Jet operator/(const Jet& a, const Jet& b) {
    check_same(a, b);
    if (b.value() == 0.0) throw JetError("division by jet with zero constant term");
    return a * compose_univariate(recip_coeffs(b.value(), b.order()), b);
}

Jet operator/(double s, const Jet& a) {
    if (a.value() == 0.0) throw JetError("division by jet with zero constant term");
    Jet r = compose_univariate(recip_coeffs(a.value(), a.order()), a);
    r *= s;
    return r;
}

Jet constant(double value, JetConfig cfg) { return Jet(&tables(cfg), value); }

Jet seed(int i, double value, JetConfig cfg) {
    if (i < 0 || i >= cfg.dim) throw JetError("seed: variable index out of range");
    Jet j = constant(value, cfg);
    if (cfg.order >= 1) {
        MultiIndex a{};
        a[i] = 1;
        j[j.tab().position(a)] = 1.0;
    }
    return j;
}

std::vector<Jet> seed_point(const std::vector<double>& x, int order) {
    JetConfig cfg{static_cast<int>(x.size()), order};
    std::vector<Jet> r;
    r.reserve(x.size());
    for (size_t i = 0; i < x.size(); ++i) r.push_back(seed(static_cast<int>(i), x[i], cfg));
    return r;
}

double partial(const Jet& f, const MultiIndex& alpha) {
    double fact = 1.0;
    for (int v = 0; v < f.dim(); ++v)
        for (int k = 2; k <= alpha[v]; ++k) fact *= k;
    // factorial of each entry; coeff() validates the degree
    double extra = 1.0;
    (void)extra;
    return fact * f.coeff(alpha);
}

double partial(const Jet& f, std::initializer_list<int> alpha) {
    MultiIndex a{};
    int i = 0;
    for (int v : alpha) a[i++] = static_cast<std::uint8_t>(v);
    return partial(f, a);
}

Jet derivative(const Jet& f, int i) {
    if (f.order() < 1) throw JetError("derivative: insufficient jet order");
    JetConfig cfg{f.dim(), f.order() - 1};
    Jet r = constant(0.0, cfg);
    const JetTables& lo = r.tab();
    const JetTables& hi = f.tab();
    for (const auto& [src, dst, fac] : hi.deriv[i]) {
        // dst indexes the high table; remap by multi-index into the low table.
        int p = lo.position(hi.idx[dst]);
        if (p >= 0) r[p] += fac * f[src];
    }
    return r;
}

Jet truncate(const Jet& f, int order) {
    if (order > f.order()) throw JetError("truncate: order exceeds source order");
    if (order == f.order()) return f;
    JetConfig cfg{f.dim(), order};
    Jet r = constant(0.0, cfg);
    const JetTables& lo = r.tab();
    for (int i = 0; i < lo.size(); ++i) r[i] = f[f.tab().position(lo.idx[i])];
    return r;
}

Jet compose(const Jet& f, const std::vector<Jet>& delta) {
    if (static_cast<size_t>(f.dim()) != delta.size())
        throw JetError("compose: wrong number of substitution jets");
    for (const auto& d : delta)
        if (std::abs(d.value()) > 1e-12)
            throw JetError("compose: substitution jets must have zero constant term");
    const JetTables& out = delta[0].tab();
    // Memoized powers delta[v]^k.
    std::vector<std::vector<Jet>> pw(f.dim());
    for (int v = 0; v < f.dim(); ++v) {
        pw[v].push_back(constant(1.0, out.cfg));
        for (int k = 1; k <= out.cfg.order; ++k) pw[v].push_back(pw[v].back() * delta[v]);
    }
    Jet r = constant(0.0, out.cfg);
    const JetTables& tf = f.tab();
    for (int i = 0; i < tf.size(); ++i) {
        if (f[i] == 0.0) continue;
        if (tf.degree[i] > out.cfg.order) continue;  // nilpotent beyond output order
        Jet term = constant(f[i], out.cfg);
        for (int v = 0; v < f.dim(); ++v)
            if (tf.idx[i][v] > 0) term = term * pw[v][tf.idx[i][v]];
        r += term;
    }
    return r;
}

Jet exp(const Jet& x) {
    std::vector<double> t(x.order() + 1);
    double e = std::exp(x.value());
    double f = 1.0;
    for (int k = 0; k <= x.order(); ++k) {
        t[k] = e / f;
        f *= (k + 1);
    }
    return compose_univariate(t, x);
}

Jet log(const Jet& x) {
    if (x.value() <= 0.0) throw JetError("log: non-positive constant term");
    std::vector<double> t(x.order() + 1);
    t[0] = std::log(x.value());
    double p = 1.0 / x.value();
    for (int k = 1; k <= x.order(); ++k) {
        t[k] = ((k % 2) ? 1.0 : -1.0) * p / k;
        p /= x.value();
    }
    return compose_univariate(t, x);
}

Jet sqrt(const Jet& x) {
    if (x.value() <= 0.0) throw JetError("sqrt: non-positive constant term");
    return pow(x, 0.5);
}

Jet abs_sqrt(const Jet& x) {
    if (x.value() == 0.0) throw JetError("abs_sqrt: zero constant term");
    return x.value() > 0.0 ? pow(x, 0.5) : pow(-x, 0.5);
}

Jet pow(const Jet& x, double a) {
    if (x.value() <= 0.0) throw JetError("pow: non-positive constant term");
    std::vector<double> t(x.order() + 1);
    double c = std::pow(x.value(), a);
    double fact = 1.0;
    double coef = 1.0;  // falling factorial a(a-1)...(a-k+1)
    for (int k = 0; k <= x.order(); ++k) {
        t[k] = coef * c * std::pow(x.value(), -k) / fact;
        coef *= (a - k);
        fact *= (k + 1);
    }
    return compose_univariate(t, x);
}

Jet ipow(Jet x, int n) {
    if (n < 0) return 1.0 / ipow(std::move(x), -n);
    Jet r = constant(1.0, x.config());
    while (n > 0) {
        if (n & 1) r = r * x;
        x = x * x;
        n >>= 1;
    }
    return r;
}

Jet sin(const Jet& x) {
    std::vector<double> t(x.order() + 1);
    double s = std::sin(x.value()), c = std::cos(x.value());
    double f = 1.0;
    for (int k = 0; k <= x.order(); ++k) {
        double d;
        switch (k % 4) {
            case 0: d = s; break;
            case 1: d = c; break;
            case 2: d = -s; break;
            default: d = -c; break;
        }
        t[k] = d / f;
        f *= (k + 1);
    }
    return compose_univariate(t, x);
}

Jet cos(const Jet& x) {
    std::vector<double> t(x.order() + 1);
    double s = std::sin(x.value()), c = std::cos(x.value());
    double f = 1.0;
    for (int k = 0; k <= x.order(); ++k) {
        double d;
        switch (k % 4) {
            case 0: d = c; break;
            case 1: d = -s; break;
            case 2: d = -c; break;
            default: d = s; break;
        }
        t[k] = d / f;
        f *= (k + 1);
    }
    return compose_univariate(t, x);
}

}  // namespace tg
