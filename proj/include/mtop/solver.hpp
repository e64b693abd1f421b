#pragma once

// Complete DPLL satisfiability solver with two-literal watching and
// chronological backtracking. Branching picks the lowest-index unassigned
// variable and tries value 1 first, so witnesses are deterministic.

#include <cstdint>
#include <vector>

#include "mtop/cnf.hpp"

namespace mtop {

enum class SolveStatus { Sat, Unsat, Unknown };

struct SolveResult {
    SolveStatus status = SolveStatus::Unknown;
    Assignment model;        // total iff status == Sat
    std::uint64_t decisions = 0;
};

struct SolveLimits {
    std::uint64_t max_decisions = 10'000'000;
};

namespace detail {

class DpllSolver {
public:
    DpllSolver(const CnfFormula& f, SolveLimits limits) : nvars_(f.nvars), limits_(limits) {
        // normalized private copies: duplicate literals dropped, tautologies skipped
        for (const Clause& c : f.clauses) {
            std::vector<int> lits;
            bool taut = false;
            for (const Lit& l : c) {
                bool dup = false;
                for (int x : lits) {
                    if (x == l.code) dup = true;
                    if (x == -l.code) taut = true;
                }
                if (!dup) lits.push_back(l.code);
            }
            if (taut) continue;
            clauses_.push_back(std::move(lits));
        }
        val_.assign(static_cast<size_t>(nvars_) + 1, -1);
        watches_.assign(2 * static_cast<size_t>(nvars_) + 2, {});
        for (size_t ci = 0; ci < clauses_.size(); ++ci) {
            auto& c = clauses_[ci];
            if (c.size() == 1) {
                units_.push_back(c[0]);
            } else {
                watch(c[0], ci);
                watch(c[1], ci);
            }
        }
    }

    SolveResult run() {
        SolveResult res;
        for (int u : units_) {
            if (value(u) == 0) return finish(res, SolveStatus::Unsat);
            if (value(u) < 0) enqueue(u);
        }
        if (!propagate()) return finish(res, SolveStatus::Unsat);

        while (true) {
            int var = next_unassigned();
            if (var == 0) {
                res.model = Assignment(nvars_);
                for (int v = 1; v <= nvars_; ++v) res.model.set(v, val_[static_cast<size_t>(v)] == 1);
                return finish(res, SolveStatus::Sat);
            }
            if (res.decisions >= limits_.max_decisions) return finish(res, SolveStatus::Unknown);
            ++res.decisions;
            decide(var, true);
            while (!propagate()) {
                // backtrack to the most recent decision still having an untried phase
                int lit = 0;
                while (!decisions_.empty()) {
                    DecisionMark d = decisions_.back();
                    decisions_.pop_back();
                    unwind(d.trail_size);
                    if (!d.flipped) {
                        lit = -d.lit;
                        break;
                    }
                }
                if (lit == 0) return finish(res, SolveStatus::Unsat);
                decisions_.push_back(DecisionMark{lit, trail_.size(), true});
                enqueue(lit);
            }
        }
    }

private:
    struct DecisionMark {
        int lit;
        size_t trail_size;
        bool flipped;
    };

    size_t widx(int lit) const {
        int v = lit > 0 ? lit : -lit;
        return 2 * static_cast<size_t>(v) + (lit > 0 ? 0 : 1);
    }

    void watch(int lit, size_t clause_idx) { watches_[widx(lit)].push_back(clause_idx); }

    /// -1 unassigned, else 0/1 truth value of the literal.
    int value(int lit) const {
        int v = val_[static_cast<size_t>(lit > 0 ? lit : -lit)];
        if (v < 0) return -1;
        return (lit > 0) == (v == 1) ? 1 : 0;
    }

    void enqueue(int lit) {
        val_[static_cast<size_t>(lit > 0 ? lit : -lit)] = lit > 0 ? 1 : 0;
        trail_.push_back(lit);
    }

    void unwind(size_t to_size) {
        while (trail_.size() > to_size) {
            int lit = trail_.back();
            trail_.pop_back();
            val_[static_cast<size_t>(lit > 0 ? lit : -lit)] = -1;
        }
        qhead_ = to_size;
    }

    void decide(int var, bool phase) {
        int lit = phase ? var : -var;
        decisions_.push_back(DecisionMark{lit, trail_.size(), false});
        enqueue(lit);
    }

    int next_unassigned() const {
        for (int v = 1; v <= nvars_; ++v)
            if (val_[static_cast<size_t>(v)] < 0) return v;
        return 0;
    }

    /// Propagates to fixpoint; false on conflict.
    bool propagate() {
        while (qhead_ < trail_.size()) {
            int lit = trail_[qhead_++];
            int falsified = -lit;
            auto& wl = watches_[widx(falsified)];
            size_t keep = 0;
            for (size_t i = 0; i < wl.size(); ++i) {
                size_t ci = wl[i];
                auto& c = clauses_[ci];
                // ensure the falsified watch sits at c[1]
                if (c[0] == falsified) std::swap(c[0], c[1]);
                if (value(c[0]) == 1) {
                    wl[keep++] = ci;
                    continue;
                }
                bool moved = false;
                for (size_t k = 2; k < c.size(); ++k) {
                    if (value(c[k]) != 0) {
                        std::swap(c[1], c[k]);
                        watch(c[1], ci);
                        moved = true;
                        break;
                    }
                }
                if (moved) continue;
                wl[keep++] = ci;
                if (value(c[0]) == 0) {
                    // conflict: keep remaining watches intact
                    for (size_t j = i + 1; j < wl.size(); ++j) wl[keep++] = wl[j];
                    wl.resize(keep);
                    return false;
                }
                enqueue(c[0]);
            }
            wl.resize(keep);
        }
        return true;
    }

    SolveResult finish(SolveResult& res, SolveStatus st) {
        res.status = st;
        return res;
    }

    int nvars_;
    SolveLimits limits_;
    std::vector<std::vector<int>> clauses_;
    std::vector<std::vector<size_t>> watches_;
    std::vector<int> units_;
    std::vector<std::int8_t> val_;
    std::vector<int> trail_;
    size_t qhead_ = 0;
    std::vector<DecisionMark> decisions_;
};

} // namespace detail

/// Complete and deterministic: Sat models satisfy every clause, Unsat means
/// no model exists, Unknown is returned only when the decision cap trips.
inline SolveResult solve(const CnfFormula& f, SolveLimits limits = {}) {
    if (f.nvars == 0) {
        SolveResult r;
        r.status = f.clauses.empty() ? SolveStatus::Sat : SolveStatus::Unsat;
        r.model = Assignment(0);
        return r;
    }
    detail::DpllSolver s(f, limits);
    return s.run();
}

} // namespace mtop
