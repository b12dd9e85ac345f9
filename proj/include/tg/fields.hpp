// Charts, scalar/tensor fields as jet-evaluatable component functions, and
// pointwise exterior calculus (d, wedge, interior product, Lie derivative,
// Hodge star, pullback).
//
// A field is a closure from coordinate jets to a jet, so composition of
// fields is ordinary function composition and the chain rule is automatic.
// Pointwise pipelines that need coordinate derivatives internally (curvature,
// Hodge duals of derived forms, ...) are lifted back into fields through
// `field_from_evaluator`, which re-expands the pipeline's output jet around
// the evaluation point.

#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "tg/jet.hpp"

namespace tg {

using Point = std::vector<double>;

struct ScalarField {
    int dim = 0;
    std::function<Jet(const std::vector<Jet>&)> fn;
    Jet operator()(const std::vector<Jet>& xs) const { return fn(xs); }
    Jet at(const Point& p, int order) const { return fn(seed_point(p, order)); }
    double value(const Point& p) const { return at(p, 0).value(); }
};

ScalarField sf_constant(int dim, double v);
ScalarField sf_coord(int dim, int i);

struct Guard {
    ScalarField f;
    double floor = 1e-3;  // sample is valid when |f| > floor
};

struct Chart {
    int dim = 0;
    std::vector<std::string> names;
    std::vector<std::pair<double, double>> box;  // per-coordinate open intervals
    std::vector<Guard> guards;

    bool admits(const Point& p) const;
    // Rejection sampling against guards; throws after 100x oversampling.
    Point sample(std::mt19937_64& rng, long* resamples = nullptr) const;
};

Chart make_chart(std::vector<std::string> names,
                 std::vector<std::pair<double, double>> box,
                 std::vector<Guard> guards = {});

// Dense jet-valued tensor of shape [dim]^rank.
struct JTensor {
    int dim = 0;
    int rank = 0;
    std::vector<Jet> c;

    JTensor() = default;
    JTensor(int dim_, int rank_, JetConfig cfg);

    int size() const { return static_cast<int>(c.size()); }
    int flat(const std::vector<int>& idx) const;
    Jet& at(const std::vector<int>& idx) { return c[flat(idx)]; }
    const Jet& at(const std::vector<int>& idx) const { return c[flat(idx)]; }
    void unflatten(int f, std::vector<int>& idx) const;

    JTensor& operator+=(const JTensor& o);
    JTensor& operator-=(const JTensor& o);
    friend JTensor operator+(JTensor a, const JTensor& b) { a += b; return a; }
    friend JTensor operator-(JTensor a, const JTensor& b) { a -= b; return a; }
    friend JTensor operator*(const JTensor& a, double s);
    friend JTensor operator*(const JTensor& a, const Jet& s);
};

JetConfig jconfig(const JTensor& t);

JTensor tensor_product(const JTensor& a, const JTensor& b);
JTensor contract(const JTensor& t, int s1, int s2);
// Prepend a derivative slot: (dT)_{a i...} = d_a T_{i...}; order drops by one.
JTensor tensor_derivative(const JTensor& t);
JTensor truncate(const JTensor& t, int order);
JTensor antisymmetrize(const JTensor& t);  // all slots, weight 1/rank!
JTensor symmetrize(const JTensor& t);      // all slots, weight 1/rank!
JTensor transpose(const JTensor& t, int s1, int s2);

Jet det(const JTensor& g);       // rank 2
JTensor inverse(const JTensor& g);  // rank 2, Gauss-Jordan on jets

// Norms of the value (constant) part.
double fro_norm(const JTensor& t);
double max_abs(const JTensor& t);
std::vector<double> values(const JTensor& t);

struct TensorField {
    Chart chart;
    std::string variance;  // 'u' or 'l' per slot; empty for a scalar
    std::vector<ScalarField> comps;  // dim^rank, row-major

    int rank() const { return static_cast<int>(variance.size()); }
    JTensor eval(const std::vector<Jet>& xs) const;
    JTensor at(const Point& p, int order) const { return eval(seed_point(p, order)); }
};

TensorField make_tensor(const Chart& chart, std::string variance,
                        std::vector<ScalarField> comps);
// Build from a per-index generator.
TensorField make_tensor(const Chart& chart, std::string variance,
                        std::function<Jet(const std::vector<Jet>&, const std::vector<int>&)> gen);

struct MetricField {
    TensorField base;      // variance "ll", symmetric
    int orientation = +1;  // sign of the volume form w.r.t. coordinate order
    const Chart& chart() const { return base.chart; }
};

// ---- exterior calculus on antisymmetric JTensors (k-form components) ----
//
// Classical convention: dx^a wedge dx^b has components {(a,b): +1, (b,a): -1}.
// Raw convention (plain antisymmetrization):
// components are 1/k! of the classical ones; d and wedge below are
// normalized accordingly.

enum class FormConv { Classical, Raw };

JTensor to_classical(const JTensor& form, FormConv from);
JTensor to_raw(const JTensor& form, FormConv from);

JTensor ext_d(const JTensor& form, FormConv cv = FormConv::Classical);
JTensor wedge(const JTensor& a, const JTensor& b, FormConv cv = FormConv::Classical);
// Contraction of v (rank 1, upper) into the first slot.
JTensor interior(const JTensor& v, const JTensor& form);
// Variant normalized so that K . (a ^ b) = a(K) b - b(K) a in either convention.
JTensor interior_normalized(const JTensor& v, const JTensor& form, FormConv cv);

// Lie derivative of a tensor with the given variance along v (v rank 1 upper).
// Output order is one lower than the inputs'.
JTensor lie_derivative(const JTensor& v, const JTensor& t, const std::string& variance);

// Hodge star with the metric volume form (orientation * sqrt|det g|).
JTensor hodge_star(const JTensor& g, int orientation, const JTensor& form);

// Pullback of a fully covariant tensor along a chart map (one scalar field
// per target coordinate).
JTensor pullback_at(const std::vector<ScalarField>& map, const TensorField& t,
                    const Point& u, int order);
TensorField pullback_field(const Chart& source, const std::vector<ScalarField>& map,
                           const TensorField& t);

// Lift a pointwise evaluator into a field by re-expanding its jet output.
ScalarField field_from_evaluator(int dim, std::function<Jet(const Point&, int)> ev);
TensorField tensorfield_from_evaluator(const Chart& chart, std::string variance,
                                       std::function<JTensor(const Point&, int)> ev);

struct FieldError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace tg
