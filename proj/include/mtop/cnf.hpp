#pragma once

// CNF formulas over integer variables, the Tseitin transformation for
// monotone circuits, and DIMACS text interchange.

#include <cstdint>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mtop/boolfn.hpp"
#include "mtop/errors.hpp"

namespace mtop {

/// DIMACS-style literal: +v or -v for variable v >= 1.
struct Lit {
    int code = 0;

    Lit() = default;
    explicit Lit(int c) : code(c) {
        if (c == 0) throw Error("literal code must be nonzero");
    }
    static Lit pos(int var) { return Lit(var); }
    static Lit neg(int var) { return Lit(-var); }

    int var() const { return code > 0 ? code : -code; }
    bool positive() const { return code > 0; }
    Lit negated() const { return Lit(-code); }

    bool operator==(const Lit& o) const { return code == o.code; }
};

using Clause = std::vector<Lit>;

/// Total assignment candidate; entries may be unset (-1) until filled.
class Assignment {
public:
    Assignment() = default;
    explicit Assignment(int nvars) : val_(static_cast<size_t>(nvars) + 1, -1) {}

    int nvars() const { return static_cast<int>(val_.size()) - 1; }
    bool is_set(int var) const { return val_[static_cast<size_t>(var)] >= 0; }
    bool get(int var) const {
        if (!is_set(var)) throw Error("assignment is partial: variable " + std::to_string(var) + " unset");
        return val_[static_cast<size_t>(var)] == 1;
    }
    void set(int var, bool v) { val_[static_cast<size_t>(var)] = v ? 1 : 0; }

    bool total() const {
        for (size_t i = 1; i < val_.size(); ++i)
            if (val_[i] < 0) return false;
        return true;
    }

private:
    std::vector<std::int8_t> val_;
};

struct CnfFormula {
    int nvars = 0;
    std::vector<Clause> clauses;
    /// Named problem variables (e.g. "x1" -> 1), emitted as DIMACS comments.
    std::vector<std::pair<std::string, int>> symbols;

    void add_clause(Clause c) {
        if (c.empty()) throw Error("clauses must be nonempty");
        for (const Lit& l : c)
            if (l.var() > nvars) throw Error("literal variable exceeds declared variable count");
        clauses.push_back(std::move(c));
    }

    int new_var(const std::string& name = "") {
        ++nvars;
        if (!name.empty()) symbols.emplace_back(name, nvars);
        return nvars;
    }
};

/// 1 iff every clause has a satisfied literal. Requires a total with respect
/// to the formula's variables.
inline bool model_check(const CnfFormula& f, const Assignment& a) {
    if (a.nvars() < f.nvars) throw Error("assignment does not cover all variables");
    for (int v = 1; v <= f.nvars; ++v)
        if (!a.is_set(v)) throw Error("assignment is partial: variable " + std::to_string(v) + " unset");
    for (const Clause& c : f.clauses) {
        bool sat = false;
        for (const Lit& l : c) {
            if (a.get(l.var()) == l.positive()) {
                sat = true;
                break;
            }
        }
        if (!sat) return false;
    }
    return true;
}

/// Tseitin transformation of monotone circuits: one auxiliary variable per
/// internal gate, clause count linear in gate count. Inputs i map to variable
/// input_var_base + i - 1; shared gates get one variable. Returns the output
/// literal of each circuit, aligned with the input list.
inline std::vector<Lit> circuit_to_cnf(const std::vector<BoolCircuit>& circuits, int input_var_base, CnfFormula& f) {
    std::unordered_map<const void*, Lit> memo;
    auto walk = [&](const BoolCircuit& c, auto&& self) -> Lit {
        if (auto it = memo.find(c.id()); it != memo.end()) return it->second;
        Lit out;
        switch (c.kind()) {
        case BoolCircuit::Kind::Input:
            out = Lit::pos(input_var_base + c.input_index() - 1);
            break;
        case BoolCircuit::Kind::Const: {
            int g = f.new_var();
            f.add_clause({c.const_value() ? Lit::pos(g) : Lit::neg(g)});
            out = Lit::pos(g);
            break;
        }
        case BoolCircuit::Kind::And: {
            std::vector<Lit> kids;
            kids.reserve(c.children().size());
            for (const auto& k : c.children()) kids.push_back(self(k, self));
            int g = f.new_var();
            Clause longc{Lit::pos(g)};
            for (Lit k : kids) {
                f.add_clause({Lit::neg(g), k});
                longc.push_back(k.negated());
            }
            f.add_clause(std::move(longc));
            out = Lit::pos(g);
            break;
        }
        case BoolCircuit::Kind::Or: {
            std::vector<Lit> kids;
            kids.reserve(c.children().size());
            for (const auto& k : c.children()) kids.push_back(self(k, self));
            int g = f.new_var();
            Clause longc{Lit::neg(g)};
            for (Lit k : kids) {
                f.add_clause({Lit::pos(g), k.negated()});
                longc.push_back(k);
            }
            f.add_clause(std::move(longc));
            out = Lit::pos(g);
            break;
        }
        }
        memo.emplace(c.id(), out);
        return out;
    };
    std::vector<Lit> outs;
    outs.reserve(circuits.size());
    for (const auto& c : circuits) outs.push_back(walk(c, walk));
    return outs;
}

// ---------------------------------------------------------------------------
// DIMACS
// ---------------------------------------------------------------------------

/// Exact emission: symbol-table comments, "p cnf <vars> <clauses>", then one
/// line per clause of space-separated signed integers ending in " 0".
inline std::string to_dimacs(const CnfFormula& f) {
    std::ostringstream os;
    for (const auto& [name, idx] : f.symbols) os << "c " << name << " = " << idx << "\n";
    os << "p cnf " << f.nvars << " " << f.clauses.size() << "\n";
    for (const Clause& c : f.clauses) {
        for (const Lit& l : c) os << l.code << " ";
        os << "0\n";
    }
    return os.str();
}

inline CnfFormula parse_dimacs(const std::string& text) {
    CnfFormula f;
    std::istringstream is(text);
    std::string line;
    bool header_seen = false;
    size_t declared_clauses = 0;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == 'c') {
            // retain symbol comments of the form "c NAME = INDEX"
            std::istringstream ls(line.substr(1));
            std::string name, eq;
            int idx = 0;
            if (ls >> name >> eq >> idx && eq == "=") f.symbols.emplace_back(name, idx);
            continue;
        }
        if (line[0] == 'p') {
            std::istringstream ls(line);
            std::string p, cnf;
            std::size_t nv = 0;
            if (!(ls >> p >> cnf >> nv >> declared_clauses) || cnf != "cnf")
                throw Error("malformed DIMACS header: " + line);
            f.nvars = static_cast<int>(nv);
            header_seen = true;
            continue;
        }
        if (!header_seen) throw Error("DIMACS clause before header");
        std::istringstream ls(line);
        Clause c;
        int x;
        while (ls >> x) {
            if (x == 0) break;
            c.push_back(Lit(x));
        }
        f.add_clause(std::move(c));
    }
    if (!header_seen) throw Error("DIMACS header missing");
    if (f.clauses.size() != declared_clauses)
        throw Error("DIMACS clause count mismatch: header says " + std::to_string(declared_clauses) + ", found " +
                    std::to_string(f.clauses.size()));
    return f;
}

/// Reads solver model lines of the form "v -1 2 -3 ... 0". The result may be
/// partial; model_check rejects partial assignments.
inline Assignment parse_dimacs_model(const std::string& text, int nvars) {
    Assignment a(nvars);
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] != 'v') continue;
        std::istringstream ls(line.substr(1));
        int x;
        while (ls >> x) {
            if (x == 0) continue;
            int var = x > 0 ? x : -x;
            if (var <= nvars) a.set(var, x > 0);
        }
    }
    return a;
}

} // namespace mtop
