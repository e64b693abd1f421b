#pragma once

// Upper/lower global signatures and upper/lower local signatures of class-M
// map expressions, plus numeric oracles that probe the same limits directly.
//
// The global upper signature records which outputs blow up along 1 + t e_J;
// the lower records which outputs of f(e_J) stay positive. Local signatures
// at an interior point u record strict increase under u + t e_J and strict
// decrease under u - t e_J.

#include <cmath>
#include <string>
#include <vector>

#include "mtop/boolfn.hpp"
#include "mtop/expr.hpp"

namespace mtop {

/// Argmax/argmin supports of every r = +-inf average, recorded for audit.
/// `point` is the evaluated input reaching that node.
struct TieEntry {
    std::string path;
    BitVec argmax;
    BitVec argmin;
    std::vector<double> point;
};

struct TiePattern {
    std::vector<TieEntry> entries;
    double tol = 0.0;
};

namespace detail {

enum class SigKind { Upper, Lower };

inline BoolCircuit or_over_support(const Weights& w) {
    std::vector<BoolCircuit> kids;
    for (int i : w.support()) kids.push_back(BoolCircuit::input(i + 1));
    return BoolCircuit::any_of(std::move(kids));
}

inline BoolCircuit and_over_support(const Weights& w) {
    std::vector<BoolCircuit> kids;
    for (int i : w.support()) kids.push_back(BoolCircuit::input(i + 1));
    return BoolCircuit::all_of(std::move(kids));
}

inline BoolCircuit global_sig_scalar(const ScalarExpr& s, SigKind kind) {
    const auto& node = s.node();
    if (auto* v = std::get_if<ScalarExpr::Var>(&node)) return BoolCircuit::input(v->index);
    if (auto* a = std::get_if<ScalarExpr::Avg>(&node)) {
        // upper: M_{r sigma} -> max over supp(sigma) for r >= 0, min for r < 0;
        // lower: the same except the geometric mean joins the min side
        bool use_or = kind == SigKind::Upper ? (a->r >= 0.0) : (a->r > 0.0);
        return use_or ? or_over_support(a->weights) : and_over_support(a->weights);
    }
    const auto& lc = std::get<ScalarExpr::LinComb>(node);
    std::vector<BoolCircuit> kids;
    kids.reserve(lc.terms.size());
    for (const auto& t : lc.terms) kids.push_back(global_sig_scalar(t.expr, kind));
    return BoolCircuit::any_of(std::move(kids));
}

inline BoolMap global_signature(const MapExpr& f, SigKind kind) {
    const auto& node = f.node();
    if (auto* e = std::get_if<MapExpr::Entries>(&node)) {
        std::vector<BoolCircuit> outs;
        outs.reserve(e->entries.size());
        for (const auto& s : e->entries) outs.push_back(global_sig_scalar(s, kind));
        return BoolMap(static_cast<int>(e->entries.size()), std::move(outs));
    }
    if (auto* c = std::get_if<MapExpr::Compose>(&node))
        return compose(global_signature(c->outer, kind), global_signature(c->inner, kind));
    if (auto* s = std::get_if<MapExpr::Sum>(&node))
        return join_or(global_signature(s->f, kind), global_signature(s->g, kind));
    // positive diagonal scaling changes neither finiteness nor positivity
    return global_signature(std::get<MapExpr::DiagScale>(node).f, kind);
}

struct LocalCtx {
    double tol;
    std::vector<TieEntry>* ties;
};

/// Coordinates of supp(sigma) within relative tol of the extremum of u there.
inline void tie_supports(const Weights& w, const std::vector<double>& u, double tol, BitVec& argmax, BitVec& argmin) {
    const auto supp = w.support();
    double mx = -kInf, mn = kInf;
    for (int i : supp) {
        mx = std::max(mx, u[static_cast<size_t>(i)]);
        mn = std::min(mn, u[static_cast<size_t>(i)]);
    }
    argmax = BitVec(static_cast<int>(u.size()));
    argmin = BitVec(static_cast<int>(u.size()));
    for (int i : supp) {
        if (u[static_cast<size_t>(i)] >= (1.0 - tol) * mx) argmax.set(i, true);
        if (u[static_cast<size_t>(i)] <= (1.0 + tol) * mn) argmin.set(i, true);
    }
}

inline BoolCircuit over_bits(const BitVec& b, bool use_or) {
    std::vector<BoolCircuit> kids;
    for (int i = 0; i < b.size(); ++i)
        if (b.get(i)) kids.push_back(BoolCircuit::input(i + 1));
    return use_or ? BoolCircuit::any_of(std::move(kids)) : BoolCircuit::all_of(std::move(kids));
}

inline BoolCircuit local_sig_scalar(const ScalarExpr& s, SigKind kind, const std::vector<double>& u,
                                    const LocalCtx& ctx, const std::string& path) {
    const auto& node = s.node();
    if (auto* v = std::get_if<ScalarExpr::Var>(&node)) return BoolCircuit::input(v->index);
    if (auto* a = std::get_if<ScalarExpr::Avg>(&node)) {
        if (std::isfinite(a->r)) {
            // every finite-exponent average is strictly monotone in each
            // support coordinate at interior points
            return or_over_support(a->weights);
        }
        BitVec argmax, argmin;
        tie_supports(a->weights, u, ctx.tol, argmax, argmin);
        if (ctx.ties) ctx.ties->push_back(TieEntry{path, argmax, argmin, u});
        if (a->r == kInf) {
            // max moves up iff some argmax coordinate moves; moves down iff all do
            return kind == SigKind::Upper ? over_bits(argmax, true) : over_bits(argmax, false);
        }
        // min moves up iff all argmin coordinates move; moves down iff some does
        return kind == SigKind::Upper ? over_bits(argmin, false) : over_bits(argmin, true);
    }
    const auto& lc = std::get<ScalarExpr::LinComb>(node);
    std::vector<BoolCircuit> kids;
    kids.reserve(lc.terms.size());
    for (size_t k = 0; k < lc.terms.size(); ++k)
        kids.push_back(local_sig_scalar(lc.terms[k].expr, kind, u, ctx, path + "/term[" + std::to_string(k) + "]"));
    return BoolCircuit::any_of(std::move(kids));
}

/// u is the log-coordinate input reaching this node; intermediate points of
/// Compose nodes are evaluated on the way down.
inline BoolMap local_signature_rec(const MapExpr& f, SigKind kind, const std::vector<double>& u, const LocalCtx& ctx,
                                   const std::string& path) {
    const auto& node = f.node();
    if (auto* e = std::get_if<MapExpr::Entries>(&node)) {
        std::vector<double> ulin(u.size());
        for (size_t i = 0; i < u.size(); ++i) ulin[i] = std::exp(u[i]);
        std::vector<BoolCircuit> outs;
        outs.reserve(e->entries.size());
        for (size_t i = 0; i < e->entries.size(); ++i)
            outs.push_back(local_sig_scalar(e->entries[i], kind, ulin, ctx,
                                            path + "/entries[" + std::to_string(i + 1) + "]"));
        return BoolMap(static_cast<int>(e->entries.size()), std::move(outs));
    }
    if (auto* c = std::get_if<MapExpr::Compose>(&node)) {
        std::vector<double> v = evaluate_log(c->inner, u);
        BoolMap inner = local_signature_rec(c->inner, kind, u, ctx, path + "/compose.inner");
        BoolMap outer = local_signature_rec(c->outer, kind, v, ctx, path + "/compose.outer");
        return compose(outer, inner);
    }
    if (auto* s = std::get_if<MapExpr::Sum>(&node))
        return join_or(local_signature_rec(s->f, kind, u, ctx, path + "/sum.left"),
                       local_signature_rec(s->g, kind, u, ctx, path + "/sum.right"));
    return local_signature_rec(std::get<MapExpr::DiagScale>(node).f, kind, u, ctx, path + "/diag.inner");
}

} // namespace detail

/// Upper signature: g(e_J)_i = 1 iff lim_{t->inf} f(1 + t e_J)_i = inf.
inline BoolMap upper_signature(const MapExpr& f) {
    return detail::global_signature(f, detail::SigKind::Upper).simplified();
}

/// Lower signature: g(e_J)_i = 1 iff f(e_J)_i > 0.
inline BoolMap lower_signature(const MapExpr& f) {
    return detail::global_signature(f, detail::SigKind::Lower).simplified();
}

struct LocalSignatures {
    BoolMap upper;
    BoolMap lower;
    TiePattern ties;
};

/// Local signatures at an interior point u. Coordinates within relative
/// `tie_tol` of an extremum join the tie set, which errs toward weaker
/// (refutable) certificates.
inline LocalSignatures local_signatures(const MapExpr& f, const ExtPoint& u, double tie_tol = 1e-9) {
    if (u.size() != f.dimension()) throw DimensionError("point dimension does not match map dimension");
    if (!u.is_interior()) throw Error("local signatures require a strictly positive finite point");
    std::vector<double> ulog(static_cast<size_t>(u.size()));
    for (int i = 0; i < u.size(); ++i) ulog[static_cast<size_t>(i)] = std::log(u[i].value());
    TiePattern ties;
    ties.tol = tie_tol;
    detail::LocalCtx up_ctx{tie_tol, &ties.entries};
    BoolMap upper = detail::local_signature_rec(f, detail::SigKind::Upper, ulog, up_ctx, "");
    detail::LocalCtx lo_ctx{tie_tol, nullptr}; // same tie sets; record once
    BoolMap lower = detail::local_signature_rec(f, detail::SigKind::Lower, ulog, lo_ctx, "");
    return LocalSignatures{upper.simplified(), lower.simplified(), std::move(ties)};
}

/// Finite-t surrogate for the upper signature: bit i is set iff
/// log f(exp(T e_J))_i exceeds theta.
inline BitVec numeric_upper_oracle(const MapExpr& f, const BitVec& J, double T = 40.0, double theta = 20.0) {
    const int n = f.dimension();
    if (J.size() != n) throw DimensionError("subset dimension mismatch");
    std::vector<double> u(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < n; ++i)
        if (J.get(i)) u[static_cast<size_t>(i)] = T;
    auto v = evaluate_log(f, u);
    BitVec out(n);
    for (int i = 0; i < n; ++i) out.set(i, v[static_cast<size_t>(i)] > theta);
    return out;
}

/// Boundary probe for the lower signature: bit i is set iff f(e_J)_i > 0
/// under extended arithmetic.
inline BitVec numeric_lower_oracle(const MapExpr& f, const BitVec& J) {
    const int n = f.dimension();
    if (J.size() != n) throw DimensionError("subset dimension mismatch");
    ExtPoint v = evaluate(f, ExtPoint::lattice_e(J));
    BitVec out(n);
    for (int i = 0; i < n; ++i) out.set(i, !v[i].is_zero());
    return out;
}

} // namespace mtop
