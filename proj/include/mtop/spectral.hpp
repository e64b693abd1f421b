#pragma once

// Positive eigenpairs by normalized fixed-point iteration in log
// coordinates, Hilbert-metric utilities, Collatz-Wielandt brackets, and the
// pointwise uniqueness conditions (M) and (N).

#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mtop/checks.hpp"
#include "mtop/expr.hpp"
#include "mtop/signature.hpp"

namespace mtop {

/// d_H(x, y) = log(max_i y_i/x_i) - log(min_i y_i/x_i); scale-invariant,
/// zero iff x and y are proportional.
inline double hilbert_distance(const ExtPoint& x, const ExtPoint& y) {
    if (x.size() != y.size()) throw DimensionError("hilbert_distance dimension mismatch");
    if (!x.is_interior() || !y.is_interior()) throw Error("Hilbert metric requires interior points");
    double mx = -kInf, mn = kInf;
    for (int i = 0; i < x.size(); ++i) {
        double r = std::log(y[i].value()) - std::log(x[i].value());
        mx = std::max(mx, r);
        mn = std::min(mn, r);
    }
    return mx - mn;
}

/// Tightest sandwich constants alpha x <= f(x) <= beta x at an interior x,
/// so x lies in the slice space S_alpha^beta(f).
inline std::pair<double, double> collatz_wielandt(const MapExpr& f, const ExtPoint& x) {
    if (!x.is_interior()) throw Error("Collatz-Wielandt bounds require an interior point");
    ExtPoint fx = evaluate(f, x);
    double alpha = kInf, beta = -kInf;
    for (int i = 0; i < x.size(); ++i) {
        double r = fx[i].value() / x[i].value();
        alpha = std::min(alpha, r);
        beta = std::max(beta, r);
    }
    return {alpha, beta};
}

struct EigenResult {
    ExtPoint vector;      // sup-norm normalized, interior
    double eigenvalue = 0.0; // geometric mean of the final bracket
    double alpha = 0.0;
    double beta = 0.0;
    bool converged = false;
    int iterations = 0;
    double final_step = kInf; // Hilbert distance between the last two iterates
};

/// Normalized iteration x_{k+1} = f(x_k)/max_i f(x_k)_i, run in log
/// coordinates so nothing overflows. Stops when the Hilbert step and the
/// Collatz-Wielandt ratio both fall within tol; m-topical maps are only
/// nonexpansive, so non-convergence is a reportable outcome, not an error.
inline EigenResult power_iteration(const MapExpr& f, const ExtPoint& x0, double tol = 1e-10, int max_iter = 100000) {
    const int n = validate(f);
    if (x0.size() != n) throw DimensionError("start point dimension mismatch");
    if (!x0.is_interior()) throw Error("power iteration requires an interior start point");
    if (!(tol > 0.0)) throw Error("tolerance must be positive");

    std::vector<double> u(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) u[static_cast<size_t>(i)] = std::log(x0[i].value());

    EigenResult res;
    const double log_tol = std::log1p(tol);
    for (int k = 0; k < max_iter; ++k) {
        std::vector<double> w = evaluate_log(f, u);
        double dmax = -kInf, dmin = kInf, wmax = -kInf;
        for (int i = 0; i < n; ++i) {
            double d = w[static_cast<size_t>(i)] - u[static_cast<size_t>(i)];
            dmax = std::max(dmax, d);
            dmin = std::min(dmin, d);
            wmax = std::max(wmax, w[static_cast<size_t>(i)]);
        }
        // sup-normalization subtracts a constant, so the Hilbert step equals
        // the bracket width at the pre-step point
        res.final_step = dmax - dmin;
        res.iterations = k + 1;
        for (int i = 0; i < n; ++i) u[static_cast<size_t>(i)] = w[static_cast<size_t>(i)] - wmax;
        if (res.final_step <= log_tol) {
            res.converged = true;
            break;
        }
    }
    // report the bracket at the returned point; the bracket only tightens
    // along the orbit, so convergence is preserved
    std::vector<double> w = evaluate_log(f, u);
    double dmax = -kInf, dmin = kInf;
    for (int i = 0; i < n; ++i) {
        double d = w[static_cast<size_t>(i)] - u[static_cast<size_t>(i)];
        dmax = std::max(dmax, d);
        dmin = std::min(dmin, d);
    }
    std::vector<XVal> v(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<size_t>(i)] = XVal::finite(std::exp(u[static_cast<size_t>(i)]));
    res.vector = ExtPoint(std::move(v));
    res.alpha = std::exp(dmin);
    res.beta = std::exp(dmax);
    res.eigenvalue = std::exp(0.5 * (dmin + dmax));
    return res;
}

// ---------------------------------------------------------------------------
// Uniqueness conditions
// ---------------------------------------------------------------------------

enum class UniquenessCondition { M, N };

enum class UniquenessVerdict { Certified, Refuted, Unknown };

inline const char* to_string(UniquenessCondition c) { return c == UniquenessCondition::M ? "M" : "N"; }

inline const char* to_string(UniquenessVerdict v) {
    switch (v) {
    case UniquenessVerdict::Certified: return "certified";
    case UniquenessVerdict::Refuted: return "refuted";
    case UniquenessVerdict::Unknown: return "unknown";
    }
    return "?";
}

struct UniquenessReport {
    UniquenessCondition condition = UniquenessCondition::M;
    UniquenessVerdict verdict = UniquenessVerdict::Unknown;
    std::optional<BitVec> witness_I; // condition (N) only
    std::optional<BitVec> witness_J;
    std::vector<double> point;
    double tie_tol = 0.0;
    /// Whether the supplied point is an eigenvector within the bracket
    /// tolerance; the uniqueness reading of a certificate needs this.
    bool at_eigenvector = false;
    std::string note;
    double wall_seconds = 0.0;
};

namespace detail {

inline bool bracket_says_eigenvector(const MapExpr& f, const ExtPoint& u, double rel = 1e-8) {
    auto [alpha, beta] = collatz_wielandt(f, u);
    return beta <= alpha * (1.0 + rel);
}

/// Witness replay for condition (M): J is nontrivial and the upper local
/// signature maps e_J inside e_J.
inline bool condM_witness_valid(const BoolMap& upper_local, const BitVec& J) {
    return !J.none() && J.count() < upper_local.dim() && upper_local.eval(J).subset_of(J);
}

/// Witness replay for condition (N): I, J nonempty disjoint, no j in J with
/// upper(e_{J^c})_j = 1 and no i in I with lower(e_{I^c})_i = 1.
inline bool condN_witness_valid(const BoolMap& upper_local, const BoolMap& lower_local, const BitVec& I,
                                const BitVec& J) {
    if (I.none() || J.none() || !((I & J).none())) return false;
    BitVec up_at = upper_local.eval(J.complement());
    BitVec lo_at = lower_local.eval(I.complement());
    for (int j = 0; j < J.size(); ++j)
        if (J.get(j) && up_at.get(j)) return false;
    for (int i = 0; i < I.size(); ++i)
        if (I.get(i) && lo_at.get(i)) return false;
    return true;
}

} // namespace detail

/// The four clause families for condition (N) at a point: choose x, y with
/// proper supports covering [n] (so I = supp(x)^c and J = supp(y)^c are
/// nonempty and disjoint), no i in I with lower(x)_i = 1, and no j in J with
/// upper(y)_j = 1. SAT means some pair (I, J) defeats the condition.
inline CnfFormula encode_condition_N(const BoolMap& lower_local, const BoolMap& upper_local) {
    if (lower_local.dim() != upper_local.dim()) throw DimensionError("signature dimension mismatch");
    const int n = lower_local.dim();
    CnfFormula f = detail::fresh_vars(n, true);
    f.add_clause(detail::all_neg(1, n));     // supp(x) proper
    f.add_clause(detail::all_neg(n + 1, n)); // supp(y) proper
    for (int i = 1; i <= n; ++i) f.add_clause({Lit::pos(i), Lit::pos(n + i)}); // supports cover [n]
    std::vector<Lit> lo = circuit_to_cnf(lower_local.outputs(), 1, f);
    for (int i = 0; i < n; ++i) f.add_clause({Lit::pos(i + 1), lo[static_cast<size_t>(i)].negated()});
    std::vector<Lit> up = circuit_to_cnf(upper_local.outputs(), n + 1, f);
    for (int i = 0; i < n; ++i) f.add_clause({Lit::pos(n + i + 1), up[static_cast<size_t>(i)].negated()});
    return f;
}

/// Condition (M) at u: certified iff no nontrivial x with f_u(x) <= x for
/// the upper local signature. Sufficient for uniqueness of an eigenvector u.
inline UniquenessReport condition_M(const MapExpr& f, const ExtPoint& u, Engine engine = Engine::Auto,
                                    double tie_tol = 1e-9) {
    const int n = validate(f);
    if (n < 2) throw Error("uniqueness conditions need dimension >= 2");
    auto t0 = std::chrono::steady_clock::now();
    UniquenessReport rep;
    rep.condition = UniquenessCondition::M;
    rep.point = u.to_doubles();
    rep.tie_tol = tie_tol;
    rep.at_eigenvector = detail::bracket_says_eigenvector(f, u);
    LocalSignatures sig = local_signatures(f, u, tie_tol);

    if (engine == Engine::Auto) engine = n <= 16 ? Engine::Brute : Engine::Sat;
    if (engine == Engine::Brute) {
        rep.verdict = UniquenessVerdict::Certified;
        const std::uint64_t full = (std::uint64_t{1} << n) - 1;
        for (std::uint64_t m = 1; m < full; ++m) {
            if ((sig.upper.eval_mask(m) & ~m) == 0) {
                rep.verdict = UniquenessVerdict::Refuted;
                rep.witness_J = BitVec::from_mask(n, m);
                break;
            }
        }
    } else if (engine == Engine::Sat) {
        SolveResult res = solve(encode_closed_set(sig.upper));
        if (res.status == SolveStatus::Unknown) {
            rep.verdict = UniquenessVerdict::Unknown;
            rep.note = "solver decision cap exceeded";
        } else if (res.status == SolveStatus::Unsat) {
            rep.verdict = UniquenessVerdict::Certified;
        } else {
            rep.verdict = UniquenessVerdict::Refuted;
            BitVec J(n);
            for (int i = 0; i < n; ++i) J.set(i, res.model.get(i + 1));
            rep.witness_J = J;
        }
    } else {
        throw Error("condition (M) engines are 'sat' and 'brute'");
    }
    if (rep.verdict == UniquenessVerdict::Refuted && !detail::condM_witness_valid(sig.upper, *rep.witness_J))
        throw Error("internal error: condition (M) witness failed re-verification");
    if (!rep.at_eigenvector && rep.verdict == UniquenessVerdict::Certified)
        rep.note = "point is not an eigenvector; certificate does not imply uniqueness";
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

/// Condition (N) at u: by the local-signature characterization this is
/// necessary and sufficient for u to be the unique interior eigenvector (up
/// to scaling) when u is an eigenvector. Refutations carry the defeating
/// pair (I, J).
inline UniquenessReport condition_N(const MapExpr& f, const ExtPoint& u, Engine engine = Engine::Auto,
                                    double tie_tol = 1e-9) {
    const int n = validate(f);
    if (n < 2) throw Error("uniqueness conditions need dimension >= 2");
    auto t0 = std::chrono::steady_clock::now();
    UniquenessReport rep;
    rep.condition = UniquenessCondition::N;
    rep.point = u.to_doubles();
    rep.tie_tol = tie_tol;
    rep.at_eigenvector = detail::bracket_says_eigenvector(f, u);
    LocalSignatures sig = local_signatures(f, u, tie_tol);

    if (engine == Engine::Auto) engine = n <= 10 ? Engine::Brute : Engine::Sat;
    if (engine == Engine::Brute) {
        rep.verdict = UniquenessVerdict::Certified;
        const std::uint64_t full = (std::uint64_t{1} << n) - 1;
        // pairs of nonempty disjoint I, J in ascending (I, J) mask order
        for (std::uint64_t I = 1; I < full && rep.verdict == UniquenessVerdict::Certified; ++I) {
            std::uint64_t rest = full & ~I;
            if ((sig.lower.eval_mask(full & ~I) & I) != 0) continue; // some i in I already moves down
            for (std::uint64_t J = rest; J != 0; J = (J - 1) & rest) {
                if ((sig.upper.eval_mask(full & ~J) & J) == 0) {
                    rep.verdict = UniquenessVerdict::Refuted;
                    rep.witness_I = BitVec::from_mask(n, I);
                    rep.witness_J = BitVec::from_mask(n, J);
                    break;
                }
            }
        }
    } else if (engine == Engine::Sat) {
        SolveResult res = solve(encode_condition_N(sig.lower, sig.upper));
        if (res.status == SolveStatus::Unknown) {
            rep.verdict = UniquenessVerdict::Unknown;
            rep.note = "solver decision cap exceeded";
        } else if (res.status == SolveStatus::Unsat) {
            rep.verdict = UniquenessVerdict::Certified;
        } else {
            rep.verdict = UniquenessVerdict::Refuted;
            BitVec I(n), J(n);
            for (int i = 0; i < n; ++i) {
                I.set(i, !res.model.get(i + 1));        // I = supp(x)^c
                J.set(i, !res.model.get(n + i + 1));    // J = supp(y)^c
            }
            rep.witness_I = I;
            rep.witness_J = J;
        }
    } else {
        throw Error("condition (N) engines are 'sat' and 'brute'");
    }
    if (rep.verdict == UniquenessVerdict::Refuted &&
        !detail::condN_witness_valid(sig.upper, sig.lower, *rep.witness_I, *rep.witness_J))
        throw Error("internal error: condition (N) witness failed re-verification");
    if (!rep.at_eigenvector)
        rep.note = "point is not an eigenvector; the uniqueness reading does not apply here";
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

// ---------------------------------------------------------------------------
// Multiplicative convexity spot check
// ---------------------------------------------------------------------------

struct MConvexityWitness {
    std::vector<double> x;
    std::vector<double> y;
    double lambda = 0.0;
    int entry = 0; // 1-based
};

/// Samples interior pairs and checks f(x^l y^(1-l)) <= f(x)^l f(y)^(1-l)
/// entrywise within relative tol; returns the first violation if any.
inline std::optional<MConvexityWitness> mconvexity_spot_check(const MapExpr& f, int samples = 100,
                                                              double tol = 1e-10, std::uint64_t seed = 0x5eed) {
    const int n = validate(f);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> logval(-1.5, 1.5);
    std::uniform_real_distribution<double> lam(0.05, 0.95);
    const double log_tol = std::log1p(tol);
    for (int s = 0; s < samples; ++s) {
        std::vector<double> lx(static_cast<size_t>(n)), ly(static_cast<size_t>(n)), lz(static_cast<size_t>(n));
        double l = lam(rng);
        for (int i = 0; i < n; ++i) {
            lx[static_cast<size_t>(i)] = logval(rng);
            ly[static_cast<size_t>(i)] = logval(rng);
            lz[static_cast<size_t>(i)] = l * lx[static_cast<size_t>(i)] + (1.0 - l) * ly[static_cast<size_t>(i)];
        }
        auto fx = evaluate_log(f, lx);
        auto fy = evaluate_log(f, ly);
        auto fz = evaluate_log(f, lz);
        for (int i = 0; i < n; ++i) {
            double rhs = l * fx[static_cast<size_t>(i)] + (1.0 - l) * fy[static_cast<size_t>(i)];
            if (fz[static_cast<size_t>(i)] > rhs + log_tol) {
                MConvexityWitness w;
                for (int k = 0; k < n; ++k) {
                    w.x.push_back(std::exp(lx[static_cast<size_t>(k)]));
                    w.y.push_back(std::exp(ly[static_cast<size_t>(k)]));
                }
                w.lambda = l;
                w.entry = i + 1;
                return w;
            }
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Report rendering
// ---------------------------------------------------------------------------

namespace detail {

inline std::string join_doubles(const std::vector<double>& v) {
    std::ostringstream os;
    os.precision(12);
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) os << ",";
        os << v[i];
    }
    return os.str();
}

} // namespace detail

inline std::string to_text(const EigenResult& r) {
    std::ostringstream os;
    os.precision(12);
    os << "eigenvalue " << r.eigenvalue << " bracket [" << r.alpha << ", " << r.beta << "] "
       << (r.converged ? "converged" : "did not converge") << " after " << r.iterations
       << " iterations (hilbert step " << r.final_step << ")\nvector " << detail::join_doubles(r.vector.to_doubles());
    return os.str();
}

inline std::string to_structured(const EigenResult& r) {
    std::ostringstream os;
    os.precision(16);
    os << "record: eigen\n";
    os << "converged: " << (r.converged ? "true" : "false") << "\n";
    os << "eigenvalue: " << r.eigenvalue << "\n";
    os << "alpha: " << r.alpha << "\n";
    os << "beta: " << r.beta << "\n";
    os << "iterations: " << r.iterations << "\n";
    os << "hilbert_step: " << r.final_step << "\n";
    os << "vector: " << detail::join_doubles(r.vector.to_doubles()) << "\n";
    os << "end: record\n";
    return os.str();
}

inline std::string to_text(const UniquenessReport& r) {
    std::ostringstream os;
    os << "condition (" << to_string(r.condition) << ") at (" << detail::join_doubles(r.point)
       << "): " << to_string(r.verdict);
    if (r.witness_I) os << ", I=" << r.witness_I->to_set_string();
    if (r.witness_J) os << ", J=" << r.witness_J->to_set_string();
    if (!r.note.empty()) os << " [" << r.note << "]";
    return os.str();
}

inline std::string to_structured(const UniquenessReport& r) {
    std::ostringstream os;
    os << "record: unique\n";
    os << "condition: " << to_string(r.condition) << "\n";
    os << "verdict: " << to_string(r.verdict) << "\n";
    os << "point: " << detail::join_doubles(r.point) << "\n";
    os << "tie_tol: " << r.tie_tol << "\n";
    os << "at_eigenvector: " << (r.at_eigenvector ? "true" : "false") << "\n";
    os << "witness_I: " << (r.witness_I ? r.witness_I->to_set_string() : "-") << "\n";
    os << "witness_J: " << (r.witness_J ? r.witness_J->to_set_string() : "-") << "\n";
    if (!r.note.empty()) os << "note: " << r.note << "\n";
    os << "time_ms: " << r.wall_seconds * 1e3 << "\n";
    os << "end: record\n";
    return os.str();
}

} // namespace mtop
