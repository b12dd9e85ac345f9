// Truncated multivariate Taylor arithmetic ("jets").
//
// A Jet stores the coefficients of a Taylor expansion of a scalar function
// about a point, truncated at a fixed total degree, in graded-lex layout.
// All arithmetic is exact through the truncation order, so extracted
// partial derivatives carry no finite-difference error.

#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace tg {

constexpr int kMaxDim = 8;
constexpr int kMaxOrder = 6;

using MultiIndex = std::array<std::uint8_t, kMaxDim>;

struct JetConfig {
    int dim = 1;
    int order = 4;
    bool operator==(const JetConfig&) const = default;
};

// Precomputed index tables for one (dim, order) pair. Cached forever.
struct JetTables {
    JetConfig cfg;
    std::vector<MultiIndex> idx;              // graded-lex list of multi-indices
    std::vector<int> degree;                  // |idx[i]|
    std::vector<std::array<int, 3>> mul_tab;  // (i, j, k): idx[i]+idx[j] == idx[k]
    // Per-variable derivative maps: (src, dst, factor).
    std::array<std::vector<std::array<int, 3>>, kMaxDim> deriv;
    int size() const { return static_cast<int>(idx.size()); }
    int position(const MultiIndex& a) const;  // -1 if degree exceeds order

private:
    std::vector<int> pos_;  // packed multi-index -> position
    friend const JetTables& tables(JetConfig);
    void build();
};

const JetTables& tables(JetConfig cfg);

class Jet {
public:
    Jet() = default;
    Jet(const JetTables* tab, double value);
    const JetTables& tab() const { return *tab_; }
    JetConfig config() const { return tab_->cfg; }
    int dim() const { return tab_->cfg.dim; }
    int order() const { return tab_->cfg.order; }
    bool empty() const { return tab_ == nullptr; }

    double value() const { return c_.empty() ? 0.0 : c_[0]; }
    double& operator[](int i) { return c_[i]; }
    double operator[](int i) const { return c_[i]; }
    const std::vector<double>& coeffs() const { return c_; }

    double coeff(const MultiIndex& alpha) const;

    Jet& operator+=(const Jet& o);
    Jet& operator-=(const Jet& o);
    Jet& operator*=(const Jet& o) { *this = *this * o; return *this; }
    Jet& operator+=(double s) { c_[0] += s; return *this; }
    Jet& operator-=(double s) { c_[0] -= s; return *this; }
    Jet& operator*=(double s);

    friend Jet operator+(Jet a, const Jet& b) { a += b; return a; }
    friend Jet operator-(Jet a, const Jet& b) { a -= b; return a; }
    friend Jet operator*(const Jet& a, const Jet& b);
    friend Jet operator/(const Jet& a, const Jet& b);
    friend Jet operator+(Jet a, double s) { a += s; return a; }
    friend Jet operator+(double s, Jet a) { a += s; return a; }
    friend Jet operator-(Jet a, double s) { a -= s; return a; }
    friend Jet operator-(double s, const Jet& a);
    friend Jet operator*(Jet a, double s) { a *= s; return a; }
    friend Jet operator*(double s, Jet a) { a *= s; return a; }
    friend Jet operator/(Jet a, double s) { a *= 1.0 / s; return a; }
    friend Jet operator/(double s, const Jet& a);
    friend Jet operator-(Jet a);

private:
    const JetTables* tab_ = nullptr;
    std::vector<double> c_;
};

// Constant jet.
Jet constant(double value, JetConfig cfg);
// Jet of the coordinate function x_i at the point x_i = value.
Jet seed(int i, double value, JetConfig cfg);
// Seed a whole point at once.
std::vector<Jet> seed_point(const std::vector<double>& x, int order);

// partial derivative d^alpha f at the point: alpha! * coeff(alpha).
double partial(const Jet& f, const MultiIndex& alpha);
double partial(const Jet& f, std::initializer_list<int> alpha);

// d/dx_i as a jet of one order lower.
Jet derivative(const Jet& f, int i);
// Copy truncated to a lower order (same dim).
Jet truncate(const Jet& f, int order);

// Substitute x = x0 + delta into f, where x0 is f's expansion point and
// delta are jets (in any other variable set) with vanishing constant term.
// Result order is the delta order; f must carry at least that order.
Jet compose(const Jet& f, const std::vector<Jet>& delta);

// Composition with a univariate function given by its Taylor coefficients
// t[k] = f^(k)(c)/k! about c = x.value().
Jet compose_univariate(const std::vector<double>& t, const Jet& x);

Jet exp(const Jet& x);
Jet log(const Jet& x);
Jet sqrt(const Jet& x);
Jet sin(const Jet& x);
Jet cos(const Jet& x);
Jet pow(const Jet& x, double a);
Jet ipow(Jet x, int n);  // integer power, no domain restriction
Jet abs_sqrt(const Jet& x);  // sqrt(|x|), for norms of indefinite sign

struct JetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace tg
