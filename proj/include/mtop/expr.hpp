#pragma once

// Expression trees for multiplicatively topical maps built from weighted
// power averages, positive linear combinations, diagonal scalings, and
// compositions, together with evaluation over the extended nonnegative
// cone [0,inf]^n and an overflow-safe log-coordinate evaluator.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "mtop/bitvec.hpp"
#include "mtop/errors.hpp"

namespace mtop {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Exponent of a power average: any finite real, +inf (max) or -inf (min).
using AvgExponent = double;

// ---------------------------------------------------------------------------
// Weights
// ---------------------------------------------------------------------------

/// Nonnegative weight vector with nonempty support, normalized to sum 1.
class Weights {
public:
    /// Accepts raw weights whose sum lies within 1e-6 of 1 and divides by the
    /// sum so the stored entries sum to 1 exactly up to rounding.
    static Weights normalized(std::vector<double> w) {
        double sum = 0.0;
        bool any_pos = false;
        for (double x : w) {
            if (!(x >= 0.0) || !std::isfinite(x))
                throw Error("weight entries must be finite and nonnegative");
            sum += x;
            if (x > 0.0) any_pos = true;
        }
        if (!any_pos) throw Error("weights have empty support");
        if (std::abs(sum - 1.0) > 1e-6) throw Error("weights not normalizable: sum is " + std::to_string(sum));
        for (double& x : w) x /= sum;
        Weights out;
        out.w_ = std::move(w);
        return out;
    }

    const std::vector<double>& entries() const { return w_; }
    int size() const { return static_cast<int>(w_.size()); }

    /// 0-based indices carrying positive weight.
    std::vector<int> support() const {
        std::vector<int> s;
        for (int i = 0; i < size(); ++i)
            if (w_[static_cast<size_t>(i)] > 0.0) s.push_back(i);
        return s;
    }

    BitVec support_bits() const {
        BitVec b(size());
        for (int i = 0; i < size(); ++i)
            if (w_[static_cast<size_t>(i)] > 0.0) b.set(i, true);
        return b;
    }

private:
    Weights() = default;
    std::vector<double> w_;
};

// ---------------------------------------------------------------------------
// Scalar and map expressions
// ---------------------------------------------------------------------------

class ScalarExpr {
public:
    struct Var {
        int index; // 1-based coordinate
    };
    struct Avg {
        AvgExponent r;
        Weights weights;
    };
    struct Term; // coefficient * subexpression
    struct LinComb {
        std::vector<Term> terms;
    };
    using Node = std::variant<Var, Avg, LinComb>;

    explicit ScalarExpr(Node n);

    static ScalarExpr var(int index) { return ScalarExpr(Var{index}); }
    static ScalarExpr avg(AvgExponent r, Weights w) { return ScalarExpr(Avg{r, std::move(w)}); }
    static ScalarExpr lin_comb(std::vector<Term> terms);

    const Node& node() const { return *node_; }

private:
    std::shared_ptr<const Node> node_;
};

struct ScalarExpr::Term {
    double coeff;
    ScalarExpr expr;
};

inline ScalarExpr::ScalarExpr(Node n) : node_(std::make_shared<Node>(std::move(n))) {}

inline ScalarExpr ScalarExpr::lin_comb(std::vector<Term> terms) {
    return ScalarExpr(LinComb{std::move(terms)});
}

class MapExpr {
public:
    struct Entries;
    struct Compose;
    struct Sum;
    struct DiagScale;
    using Node = std::variant<Entries, Compose, Sum, DiagScale>;

    explicit MapExpr(Node&& n);

    static MapExpr entries(std::vector<ScalarExpr> es);
    static MapExpr compose(MapExpr outer, MapExpr inner);
    static MapExpr sum(double a, MapExpr f, double b, MapExpr g);
    static MapExpr diag_scale(std::vector<double> d, MapExpr f);
    static MapExpr identity(int n);

    const Node& node() const;

    /// Structural dimension (number of coordinates). Consistency across
    /// subtrees is checked by validate(), not here.
    int dimension() const;

private:
    std::shared_ptr<const Node> node_;
};

struct MapExpr::Entries {
    std::vector<ScalarExpr> entries;
};
struct MapExpr::Compose {
    MapExpr outer;
    MapExpr inner;
};
struct MapExpr::Sum {
    double a;
    MapExpr f;
    double b;
    MapExpr g;
};
struct MapExpr::DiagScale {
    std::vector<double> d;
    MapExpr f;
};

inline MapExpr::MapExpr(Node&& n) : node_(std::make_shared<Node>(std::move(n))) {}

inline const MapExpr::Node& MapExpr::node() const { return *node_; }

inline MapExpr MapExpr::entries(std::vector<ScalarExpr> es) { return MapExpr(Entries{std::move(es)}); }
inline MapExpr MapExpr::compose(MapExpr outer, MapExpr inner) {
    return MapExpr(Compose{std::move(outer), std::move(inner)});
}
inline MapExpr MapExpr::sum(double a, MapExpr f, double b, MapExpr g) {
    return MapExpr(Sum{a, std::move(f), b, std::move(g)});
}
inline MapExpr MapExpr::diag_scale(std::vector<double> d, MapExpr f) {
    return MapExpr(DiagScale{std::move(d), std::move(f)});
}

inline MapExpr MapExpr::identity(int n) {
    std::vector<ScalarExpr> es;
    es.reserve(static_cast<size_t>(n));
    for (int i = 1; i <= n; ++i) es.push_back(ScalarExpr::var(i));
    return entries(std::move(es));
}

inline int MapExpr::dimension() const {
    if (auto* e = std::get_if<Entries>(node_.get())) return static_cast<int>(e->entries.size());
    if (auto* c = std::get_if<Compose>(node_.get())) return c->outer.dimension();
    if (auto* s = std::get_if<Sum>(node_.get())) return s->f.dimension();
    return static_cast<int>(std::get<DiagScale>(*node_).d.size());
}

// ---------------------------------------------------------------------------
// Extended nonnegative values and points
// ---------------------------------------------------------------------------

/// A value in [0, +inf]. Infinity is an explicit tag, never the product of
/// floating-point overflow.
class XVal {
public:
    XVal() : v_(0.0), inf_(false) {}

    static XVal finite(double v) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw Error("XVal::finite requires a finite nonnegative value");
        XVal x;
        x.v_ = v;
        return x;
    }

    static XVal infinity() {
        XVal x;
        x.inf_ = true;
        return x;
    }

    bool is_inf() const { return inf_; }
    bool is_zero() const { return !inf_ && v_ == 0.0; }

    /// Finite payload; calling on an infinite value is a logic error.
    double value() const {
        if (inf_) throw Error("XVal::value on infinity");
        return v_;
    }

    bool operator==(const XVal& o) const { return inf_ == o.inf_ && (inf_ || v_ == o.v_); }

private:
    double v_;
    bool inf_;
};

inline XVal operator+(XVal a, XVal b) {
    if (a.is_inf() || b.is_inf()) return XVal::infinity();
    return XVal::finite(a.value() + b.value());
}

/// Scale by a strictly positive finite constant.
inline XVal scale(double c, XVal a) {
    if (a.is_inf()) return XVal::infinity();
    return XVal::finite(c * a.value());
}

class ExtPoint {
public:
    ExtPoint() = default;
    explicit ExtPoint(std::vector<XVal> v) : v_(std::move(v)) {}

    static ExtPoint from_doubles(const std::vector<double>& v) {
        std::vector<XVal> xs;
        xs.reserve(v.size());
        for (double x : v) xs.push_back(XVal::finite(x));
        return ExtPoint(std::move(xs));
    }

    /// Lattice point e_J: 1 on J, 0 elsewhere.
    static ExtPoint lattice_e(const BitVec& J) {
        std::vector<XVal> xs(static_cast<size_t>(J.size()));
        for (int i = 0; i < J.size(); ++i) xs[static_cast<size_t>(i)] = XVal::finite(J.get(i) ? 1.0 : 0.0);
        return ExtPoint(std::move(xs));
    }

    /// Lattice point omega_J = lim_{t->inf} 1 + t e_J: +inf on J, 1 elsewhere.
    static ExtPoint lattice_omega(const BitVec& J) {
        std::vector<XVal> xs(static_cast<size_t>(J.size()));
        for (int i = 0; i < J.size(); ++i)
            xs[static_cast<size_t>(i)] = J.get(i) ? XVal::infinity() : XVal::finite(1.0);
        return ExtPoint(std::move(xs));
    }

    static ExtPoint all_ones(int n) { return lattice_e(BitVec::ones(n)); }

    int size() const { return static_cast<int>(v_.size()); }
    const XVal& operator[](int i) const { return v_[static_cast<size_t>(i)]; }
    XVal& operator[](int i) { return v_[static_cast<size_t>(i)]; }
    const std::vector<XVal>& values() const { return v_; }

    /// All entries finite (point of the standard cone [0,inf)^n).
    bool in_standard_cone() const {
        return std::none_of(v_.begin(), v_.end(), [](const XVal& x) { return x.is_inf(); });
    }

    /// All entries positive (point of the inverted cone (0,inf]^n).
    bool in_inverted_cone() const {
        return std::none_of(v_.begin(), v_.end(), [](const XVal& x) { return x.is_zero(); });
    }

    bool is_interior() const { return in_standard_cone() && in_inverted_cone(); }

    std::vector<double> to_doubles() const {
        std::vector<double> out;
        out.reserve(v_.size());
        for (const auto& x : v_) out.push_back(x.is_inf() ? kInf : x.value());
        return out;
    }

private:
    std::vector<XVal> v_;
};

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace detail {

inline void validate_scalar(const ScalarExpr& s, int n, const std::string& path) {
    const auto& node = s.node();
    if (auto* v = std::get_if<ScalarExpr::Var>(&node)) {
        if (v->index < 1 || v->index > n)
            throw ValidateError("variable index " + std::to_string(v->index) + " out of range for dimension " +
                                    std::to_string(n),
                                path);
        return;
    }
    if (auto* a = std::get_if<ScalarExpr::Avg>(&node)) {
        if (a->weights.size() != n)
            throw ValidateError("weight vector has " + std::to_string(a->weights.size()) +
                                    " entries; dimension is " + std::to_string(n),
                                path);
        if (std::isnan(a->r)) throw ValidateError("exponent is NaN", path);
        double sum = 0.0;
        for (double w : a->weights.entries()) sum += w;
        if (std::abs(sum - 1.0) > 1e-12) throw ValidateError("weights do not sum to 1", path);
        if (a->weights.support().empty()) throw ValidateError("weights have empty support", path);
        return;
    }
    const auto& lc = std::get<ScalarExpr::LinComb>(node);
    if (lc.terms.empty()) throw ValidateError("linear combination has no terms", path);
    for (size_t k = 0; k < lc.terms.size(); ++k) {
        if (!(lc.terms[k].coeff > 0.0) || !std::isfinite(lc.terms[k].coeff))
            throw ValidateError("coefficient must be strictly positive and finite",
                                path + "/term[" + std::to_string(k) + "]");
        validate_scalar(lc.terms[k].expr, n, path + "/term[" + std::to_string(k) + "]");
    }
}

inline int validate_map(const MapExpr& f, const std::string& path) {
    const auto& node = f.node();
    if (auto* e = std::get_if<MapExpr::Entries>(&node)) {
        int n = static_cast<int>(e->entries.size());
        if (n < 1) throw ValidateError("map must have dimension >= 1", path);
        for (size_t i = 0; i < e->entries.size(); ++i)
            validate_scalar(e->entries[i], n, path + "/entries[" + std::to_string(i + 1) + "]");
        return n;
    }
    if (auto* c = std::get_if<MapExpr::Compose>(&node)) {
        int no = validate_map(c->outer, path + "/compose.outer");
        int ni = validate_map(c->inner, path + "/compose.inner");
        if (no != ni)
            throw ValidateError("composed maps have dimensions " + std::to_string(no) + " and " + std::to_string(ni),
                                path);
        return no;
    }
    if (auto* s = std::get_if<MapExpr::Sum>(&node)) {
        if (!(s->a > 0.0) || !std::isfinite(s->a) || !(s->b > 0.0) || !std::isfinite(s->b))
            throw ValidateError("sum coefficients must be strictly positive and finite", path);
        int nf = validate_map(s->f, path + "/sum.left");
        int ng = validate_map(s->g, path + "/sum.right");
        if (nf != ng)
            throw ValidateError("summed maps have dimensions " + std::to_string(nf) + " and " + std::to_string(ng),
                                path);
        return nf;
    }
    const auto& d = std::get<MapExpr::DiagScale>(node);
    for (double di : d.d)
        if (!(di > 0.0) || !std::isfinite(di))
            throw ValidateError("diagonal entries must be strictly positive and finite", path);
    int nf = validate_map(d.f, path + "/diag.inner");
    if (static_cast<int>(d.d.size()) != nf)
        throw ValidateError("diagonal has " + std::to_string(d.d.size()) + " entries; map dimension is " +
                                std::to_string(nf),
                            path);
    return nf;
}

} // namespace detail

/// Checks every structural invariant and returns the dimension n.
inline int validate(const MapExpr& f) { return detail::validate_map(f, ""); }

// ---------------------------------------------------------------------------
// Evaluation over the extended cone
// ---------------------------------------------------------------------------

namespace detail {

/// (r,sigma)-average at an extended point, per the extended arithmetic table:
/// for r<0, 0^r = +inf and inf^(1/r) = 0; for r>0, inf^r = +inf; the
/// geometric mean errors out when its support mixes 0 and +inf.
inline XVal eval_avg(AvgExponent r, const Weights& w, const ExtPoint& x) {
    const auto supp = w.support();
    if (r == kInf) {
        XVal best = x[supp[0]];
        for (size_t k = 1; k < supp.size(); ++k) {
            const XVal& c = x[supp[k]];
            if (c.is_inf() || (!best.is_inf() && c.value() > best.value())) best = c;
        }
        return best;
    }
    if (r == -kInf) {
        XVal best = x[supp[0]];
        for (size_t k = 1; k < supp.size(); ++k) {
            const XVal& c = x[supp[k]];
            if (best.is_inf() || (!c.is_inf() && c.value() < best.value())) best = c;
        }
        return best;
    }
    if (r == 0.0) {
        bool has_zero = false, has_inf = false;
        double log_sum = 0.0;
        for (int i : supp) {
            if (x[i].is_inf()) has_inf = true;
            else if (x[i].is_zero()) has_zero = true;
            else log_sum += w.entries()[static_cast<size_t>(i)] * std::log(x[i].value());
        }
        if (has_zero && has_inf)
            throw IndeterminateError("geometric mean over support mixing 0 and +inf is indeterminate");
        if (has_zero) return XVal::finite(0.0);
        if (has_inf) return XVal::infinity();
        return XVal::finite(std::exp(log_sum));
    }
    if (r > 0.0) {
        // sum sigma_i x_i^r, where inf^r = inf
        double acc = 0.0;
        for (int i : supp) {
            if (x[i].is_inf()) return XVal::infinity();
            acc += w.entries()[static_cast<size_t>(i)] * std::pow(x[i].value(), r);
        }
        return XVal::finite(std::pow(acc, 1.0 / r));
    }
    // r < 0: 0^r = +inf dominates the sum, and inf^(1/r) = 0.
    bool sum_inf = false;
    double acc = 0.0;
    for (int i : supp) {
        if (x[i].is_zero()) sum_inf = true;
        else if (!x[i].is_inf()) acc += w.entries()[static_cast<size_t>(i)] * std::pow(x[i].value(), r);
        // inf^r contributes 0 for r < 0
    }
    if (sum_inf) return XVal::finite(0.0);
    if (acc == 0.0) return XVal::infinity(); // every support coordinate was +inf
    return XVal::finite(std::pow(acc, 1.0 / r));
}

inline XVal eval_scalar(const ScalarExpr& s, const ExtPoint& x) {
    const auto& node = s.node();
    if (auto* v = std::get_if<ScalarExpr::Var>(&node)) return x[v->index - 1];
    if (auto* a = std::get_if<ScalarExpr::Avg>(&node)) return eval_avg(a->r, a->weights, x);
    const auto& lc = std::get<ScalarExpr::LinComb>(node);
    XVal acc = XVal::finite(0.0);
    for (const auto& t : lc.terms) acc = acc + scale(t.coeff, eval_scalar(t.expr, x));
    return acc;
}

} // namespace detail

/// Entrywise value of f at x under extended arithmetic. Agrees with the real
/// formulas on interior points; throws IndeterminateError on undefined
/// extended products.
inline ExtPoint evaluate(const MapExpr& f, const ExtPoint& x) {
    if (x.size() != f.dimension()) throw DimensionError("point dimension does not match map dimension");
    const auto& node = f.node();
    if (auto* e = std::get_if<MapExpr::Entries>(&node)) {
        std::vector<XVal> out;
        out.reserve(e->entries.size());
        for (const auto& s : e->entries) out.push_back(detail::eval_scalar(s, x));
        return ExtPoint(std::move(out));
    }
    if (auto* c = std::get_if<MapExpr::Compose>(&node)) return evaluate(c->outer, evaluate(c->inner, x));
    if (auto* s = std::get_if<MapExpr::Sum>(&node)) {
        ExtPoint fx = evaluate(s->f, x), gx = evaluate(s->g, x);
        std::vector<XVal> out(static_cast<size_t>(fx.size()));
        for (int i = 0; i < fx.size(); ++i) out[static_cast<size_t>(i)] = scale(s->a, fx[i]) + scale(s->b, gx[i]);
        return ExtPoint(std::move(out));
    }
    const auto& d = std::get<MapExpr::DiagScale>(node);
    ExtPoint fx = evaluate(d.f, x);
    std::vector<XVal> out(static_cast<size_t>(fx.size()));
    for (int i = 0; i < fx.size(); ++i) out[static_cast<size_t>(i)] = scale(d.d[static_cast<size_t>(i)], fx[i]);
    return ExtPoint(std::move(out));
}

// ---------------------------------------------------------------------------
// Log-coordinate evaluation
// ---------------------------------------------------------------------------

namespace detail {

/// log sum exp with max shift; terms given as exponents.
inline double log_sum_exp(const std::vector<double>& t) {
    double m = *std::max_element(t.begin(), t.end());
    if (!std::isfinite(m)) return m;
    double acc = 0.0;
    for (double v : t) acc += std::exp(v - m);
    return m + std::log(acc);
}

inline double log_add(double a, double b) {
    double m = std::max(a, b);
    if (!std::isfinite(m)) return m;
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

inline double eval_scalar_log(const ScalarExpr& s, const std::vector<double>& u) {
    const auto& node = s.node();
    if (auto* v = std::get_if<ScalarExpr::Var>(&node)) return u[static_cast<size_t>(v->index - 1)];
    if (auto* a = std::get_if<ScalarExpr::Avg>(&node)) {
        const auto supp = a->weights.support();
        const auto& w = a->weights.entries();
        if (a->r == kInf) {
            double m = -kInf;
            for (int i : supp) m = std::max(m, u[static_cast<size_t>(i)]);
            return m;
        }
        if (a->r == -kInf) {
            double m = kInf;
            for (int i : supp) m = std::min(m, u[static_cast<size_t>(i)]);
            return m;
        }
        if (a->r == 0.0) {
            double acc = 0.0;
            for (int i : supp) acc += w[static_cast<size_t>(i)] * u[static_cast<size_t>(i)];
            return acc;
        }
        std::vector<double> terms;
        terms.reserve(supp.size());
        for (int i : supp) terms.push_back(std::log(w[static_cast<size_t>(i)]) + a->r * u[static_cast<size_t>(i)]);
        return log_sum_exp(terms) / a->r;
    }
    const auto& lc = std::get<ScalarExpr::LinComb>(node);
    std::vector<double> terms;
    terms.reserve(lc.terms.size());
    for (const auto& t : lc.terms) terms.push_back(std::log(t.coeff) + eval_scalar_log(t.expr, u));
    return log_sum_exp(terms);
}

} // namespace detail

/// log(f(exp(u))), computed without overflow for |u_i| up to 500.
inline std::vector<double> evaluate_log(const MapExpr& f, const std::vector<double>& u) {
    if (static_cast<int>(u.size()) != f.dimension())
        throw DimensionError("point dimension does not match map dimension");
    const auto& node = f.node();
    if (auto* e = std::get_if<MapExpr::Entries>(&node)) {
        std::vector<double> out;
        out.reserve(e->entries.size());
        for (const auto& s : e->entries) out.push_back(detail::eval_scalar_log(s, u));
        return out;
    }
    if (auto* c = std::get_if<MapExpr::Compose>(&node)) return evaluate_log(c->outer, evaluate_log(c->inner, u));
    if (auto* s = std::get_if<MapExpr::Sum>(&node)) {
        auto fu = evaluate_log(s->f, u);
        auto gu = evaluate_log(s->g, u);
        std::vector<double> out(fu.size());
        for (size_t i = 0; i < fu.size(); ++i)
            out[i] = detail::log_add(std::log(s->a) + fu[i], std::log(s->b) + gu[i]);
        return out;
    }
    const auto& d = std::get<MapExpr::DiagScale>(node);
    auto fu = evaluate_log(d.f, u);
    for (size_t i = 0; i < fu.size(); ++i) fu[i] += std::log(d.d[i]);
    return fu;
}

} // namespace mtop
