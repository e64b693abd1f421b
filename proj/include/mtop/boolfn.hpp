#pragma once

// Monotone Boolean functions {0,1}^n -> {0,1}^n as shared-structure circuit
// DAGs over AND/OR gates. Constants are allowed internally; derived
// signatures are checked to need none.

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "mtop/bitvec.hpp"
#include "mtop/errors.hpp"

namespace mtop {

class BoolCircuit {
public:
    enum class Kind : std::uint8_t { Input, And, Or, Const };

    static BoolCircuit input(int index) {
        if (index < 1) throw Error("input index must be >= 1");
        return BoolCircuit(std::make_shared<Node>(Node{Kind::Input, index, false, {}}));
    }

    static BoolCircuit constant(bool v) {
        return BoolCircuit(std::make_shared<Node>(Node{Kind::Const, 0, v, {}}));
    }

    static BoolCircuit all_of(std::vector<BoolCircuit> kids) {
        if (kids.empty()) throw Error("And gate needs at least one child");
        if (kids.size() == 1) return kids[0];
        return BoolCircuit(std::make_shared<Node>(Node{Kind::And, 0, false, std::move(kids)}));
    }

    static BoolCircuit any_of(std::vector<BoolCircuit> kids) {
        if (kids.empty()) throw Error("Or gate needs at least one child");
        if (kids.size() == 1) return kids[0];
        return BoolCircuit(std::make_shared<Node>(Node{Kind::Or, 0, false, std::move(kids)}));
    }

    Kind kind() const { return n_->kind; }
    int input_index() const { return n_->input; }
    bool const_value() const { return n_->value; }
    const std::vector<BoolCircuit>& children() const { return n_->kids; }

    /// Node identity; stable for the lifetime of the shared structure.
    const void* id() const { return n_.get(); }

    bool eval(const BitVec& x) const {
        std::unordered_map<const void*, bool> memo;
        return eval_rec(x, memo);
    }

    int max_input() const {
        int m = 0;
        std::unordered_map<const void*, bool> seen;
        max_input_rec(m, seen);
        return m;
    }

    std::string to_text() const {
        switch (kind()) {
        case Kind::Input: return "(x " + std::to_string(input_index()) + ")";
        case Kind::Const: return const_value() ? "(const 1)" : "(const 0)";
        case Kind::And:
        case Kind::Or: {
            std::string s = kind() == Kind::And ? "(and" : "(or";
            for (const auto& k : children()) s += " " + k.to_text();
            return s + ")";
        }
        }
        return "";
    }

private:
    struct Node {
        Kind kind;
        int input;
        bool value;
        std::vector<BoolCircuit> kids;
    };

    explicit BoolCircuit(std::shared_ptr<const Node> n) : n_(std::move(n)) {}

    bool eval_rec(const BitVec& x, std::unordered_map<const void*, bool>& memo) const {
        auto it = memo.find(id());
        if (it != memo.end()) return it->second;
        bool v = false;
        switch (kind()) {
        case Kind::Input:
            if (input_index() > x.size()) throw DimensionError("circuit reads input beyond vector size");
            v = x.get(input_index() - 1);
            break;
        case Kind::Const: v = const_value(); break;
        case Kind::And:
            v = true;
            for (const auto& k : children()) v = v && k.eval_rec(x, memo);
            break;
        case Kind::Or:
            v = false;
            for (const auto& k : children()) v = v || k.eval_rec(x, memo);
            break;
        }
        memo.emplace(id(), v);
        return v;
    }

    void max_input_rec(int& m, std::unordered_map<const void*, bool>& seen) const {
        if (seen.count(id())) return;
        seen.emplace(id(), true);
        if (kind() == Kind::Input) m = std::max(m, input_index());
        for (const auto& k : children()) k.max_input_rec(m, seen);
    }

    std::shared_ptr<const Node> n_;
};

namespace detail {

/// Canonicalizing rebuilder shared by simplify calls: structurally equal
/// subcircuits collapse to one node, so pointer equality below doubles as
/// structural equality.
class CircuitInterner {
public:
    BoolCircuit input(int i) { return memo(Key{0, i, {}}, [&] { return BoolCircuit::input(i); }); }
    BoolCircuit constant(bool v) { return memo(Key{1, v ? 1 : 0, {}}, [&] { return BoolCircuit::constant(v); }); }

    BoolCircuit gate(BoolCircuit::Kind kind, std::vector<BoolCircuit> kids) {
        std::vector<const void*> ids;
        ids.reserve(kids.size());
        for (const auto& k : kids) ids.push_back(k.id());
        int tag = kind == BoolCircuit::Kind::And ? 2 : 3;
        return memo(Key{tag, 0, std::move(ids)}, [&] {
            return kind == BoolCircuit::Kind::And ? BoolCircuit::all_of(std::move(kids))
                                                  : BoolCircuit::any_of(std::move(kids));
        });
    }

private:
    using Key = std::tuple<int, int, std::vector<const void*>>;

    template <typename F>
    BoolCircuit memo(Key key, F make) {
        auto it = table_.find(key);
        if (it != table_.end()) return it->second;
        BoolCircuit c = make();
        table_.emplace(std::move(key), c);
        return c;
    }

    std::map<Key, BoolCircuit> table_;
};

/// Stable ordering of canonicalized nodes: inputs by index, then constants,
/// then gates compared recursively. Used to sort gate children so rendered
/// text is deterministic.
inline int circuit_order(const BoolCircuit& a, const BoolCircuit& b) {
    if (a.id() == b.id()) return 0;
    auto rank = [](BoolCircuit::Kind k) {
        switch (k) {
        case BoolCircuit::Kind::Input: return 0;
        case BoolCircuit::Kind::Const: return 1;
        case BoolCircuit::Kind::And: return 2;
        case BoolCircuit::Kind::Or: return 3;
        }
        return 4;
    };
    if (rank(a.kind()) != rank(b.kind())) return rank(a.kind()) < rank(b.kind()) ? -1 : 1;
    switch (a.kind()) {
    case BoolCircuit::Kind::Input:
        return a.input_index() < b.input_index() ? -1 : (a.input_index() > b.input_index() ? 1 : 0);
    case BoolCircuit::Kind::Const:
        return a.const_value() == b.const_value() ? 0 : (a.const_value() ? 1 : -1);
    default: {
        const auto& ka = a.children();
        const auto& kb = b.children();
        for (size_t i = 0; i < ka.size() && i < kb.size(); ++i)
            if (int c = circuit_order(ka[i], kb[i]); c != 0) return c;
        return ka.size() < kb.size() ? -1 : (ka.size() > kb.size() ? 1 : 0);
    }
    }
}

inline BoolCircuit simplify_rec(const BoolCircuit& c, CircuitInterner& intern,
                                std::unordered_map<const void*, BoolCircuit>& memo) {
    if (auto it = memo.find(c.id()); it != memo.end()) return it->second;
    BoolCircuit out = [&] {
        switch (c.kind()) {
        case BoolCircuit::Kind::Input: return intern.input(c.input_index());
        case BoolCircuit::Kind::Const: return intern.constant(c.const_value());
        default: break;
        }
        const bool is_and = c.kind() == BoolCircuit::Kind::And;
        const bool absorbing = !is_and;  // Or is killed by 1, And by 0
        std::vector<BoolCircuit> kids;
        for (const auto& raw : c.children()) {
            BoolCircuit k = simplify_rec(raw, intern, memo);
            if (k.kind() == BoolCircuit::Kind::Const) {
                if (k.const_value() == absorbing) return intern.constant(absorbing);
                continue; // neutral constant
            }
            if (k.kind() == c.kind()) {
                for (const auto& g : k.children()) kids.push_back(g);
            } else {
                kids.push_back(k);
            }
        }
        if (kids.empty()) return intern.constant(!absorbing);
        std::sort(kids.begin(), kids.end(), [](const BoolCircuit& a, const BoolCircuit& b) {
            return circuit_order(a, b) < 0;
        });
        kids.erase(std::unique(kids.begin(), kids.end(),
                               [](const BoolCircuit& a, const BoolCircuit& b) { return a.id() == b.id(); }),
                   kids.end());
        // absorption: within And, drop any Or child containing another kid;
        // within Or, drop any And child containing another kid
        const auto victim_kind = is_and ? BoolCircuit::Kind::Or : BoolCircuit::Kind::And;
        std::vector<BoolCircuit> kept;
        for (const auto& k : kids) {
            bool absorbed = false;
            if (k.kind() == victim_kind) {
                for (const auto& g : k.children()) {
                    for (const auto& other : kids) {
                        if (other.id() != k.id() && other.id() == g.id()) {
                            absorbed = true;
                            break;
                        }
                    }
                    if (absorbed) break;
                }
            }
            if (!absorbed) kept.push_back(k);
        }
        if (kept.size() == 1) return kept[0];
        return intern.gate(c.kind(), std::move(kept));
    }();
    memo.emplace(c.id(), out);
    return out;
}

} // namespace detail

/// Extensionally equal circuit after constant folding, flattening,
/// duplicate-child removal and absorption, with children in canonical order.
inline BoolCircuit simplify(const BoolCircuit& c) {
    detail::CircuitInterner intern;
    std::unordered_map<const void*, BoolCircuit> memo;
    return detail::simplify_rec(c, intern, memo);
}

// ---------------------------------------------------------------------------
// BoolMap
// ---------------------------------------------------------------------------

/// A vector of n output circuits over inputs x_1..x_n. Compiled to a flat
/// topologically ordered gate program at construction; evaluation is a single
/// array pass over a thread-local scratch buffer.
class BoolMap {
public:
    BoolMap(int n, std::vector<BoolCircuit> outs) : n_(n), outs_(std::move(outs)) {
        if (static_cast<int>(outs_.size()) != n_) throw DimensionError("BoolMap needs one circuit per coordinate");
        for (const auto& c : outs_)
            if (c.max_input() > n_) throw DimensionError("circuit reads an input beyond dimension n");
        compile();
    }

    static BoolMap identity(int n) {
        std::vector<BoolCircuit> outs;
        outs.reserve(static_cast<size_t>(n));
        for (int i = 1; i <= n; ++i) outs.push_back(BoolCircuit::input(i));
        return BoolMap(n, std::move(outs));
    }

    int dim() const { return n_; }
    const std::vector<BoolCircuit>& outputs() const { return outs_; }

    BitVec eval(const BitVec& x) const {
        if (x.size() != n_) throw DimensionError("BoolMap::eval dimension mismatch");
        auto& scratch = scratch_buffer();
        run(x, scratch);
        BitVec out(n_);
        for (int i = 0; i < n_; ++i) out.set(i, scratch[static_cast<size_t>(out_slot_[static_cast<size_t>(i)])] != 0);
        return out;
    }

    /// Mask-based evaluation for n <= 64; bit i of the mask is coordinate i+1.
    std::uint64_t eval_mask(std::uint64_t x) const {
        auto& scratch = scratch_buffer();
        run_mask(x, scratch);
        std::uint64_t out = 0;
        for (int i = 0; i < n_; ++i)
            if (scratch[static_cast<size_t>(out_slot_[static_cast<size_t>(i)])]) out |= std::uint64_t{1} << i;
        return out;
    }

    BoolMap simplified() const {
        detail::CircuitInterner intern;
        std::unordered_map<const void*, BoolCircuit> memo;
        std::vector<BoolCircuit> outs;
        outs.reserve(outs_.size());
        for (const auto& c : outs_) outs.push_back(detail::simplify_rec(c, intern, memo));
        return BoolMap(n_, std::move(outs));
    }

private:
    struct Op {
        BoolCircuit::Kind kind;
        std::int32_t a; // Input: 0-based input index; Const: value; gates: child range begin
        std::int32_t b; // gates: child range end
    };

    void compile() {
        std::unordered_map<const void*, std::int32_t> slot;
        for (const auto& c : outs_) out_slot_.push_back(compile_rec(c, slot));
    }

    std::int32_t compile_rec(const BoolCircuit& c, std::unordered_map<const void*, std::int32_t>& slot) {
        if (auto it = slot.find(c.id()); it != slot.end()) return it->second;
        std::int32_t s;
        switch (c.kind()) {
        case BoolCircuit::Kind::Input:
            s = push(Op{c.kind(), c.input_index() - 1, 0});
            break;
        case BoolCircuit::Kind::Const:
            s = push(Op{c.kind(), c.const_value() ? 1 : 0, 0});
            break;
        default: {
            std::vector<std::int32_t> kid_slots;
            kid_slots.reserve(c.children().size());
            for (const auto& k : c.children()) kid_slots.push_back(compile_rec(k, slot));
            std::int32_t begin = static_cast<std::int32_t>(kids_.size());
            kids_.insert(kids_.end(), kid_slots.begin(), kid_slots.end());
            s = push(Op{c.kind(), begin, static_cast<std::int32_t>(kids_.size())});
            break;
        }
        }
        slot.emplace(c.id(), s);
        return s;
    }

    std::int32_t push(Op op) {
        ops_.push_back(op);
        return static_cast<std::int32_t>(ops_.size() - 1);
    }

    static std::vector<std::uint8_t>& scratch_buffer() {
        thread_local std::vector<std::uint8_t> buf;
        return buf;
    }

    template <typename GetBit>
    void run_impl(GetBit get, std::vector<std::uint8_t>& scratch) const {
        scratch.resize(ops_.size());
        for (size_t i = 0; i < ops_.size(); ++i) {
            const Op& op = ops_[i];
            switch (op.kind) {
            case BoolCircuit::Kind::Input: scratch[i] = get(op.a); break;
            case BoolCircuit::Kind::Const: scratch[i] = static_cast<std::uint8_t>(op.a); break;
            case BoolCircuit::Kind::And: {
                std::uint8_t v = 1;
                for (std::int32_t k = op.a; k < op.b && v; ++k)
                    v = scratch[static_cast<size_t>(kids_[static_cast<size_t>(k)])];
                scratch[i] = v;
                break;
            }
            case BoolCircuit::Kind::Or: {
                std::uint8_t v = 0;
                for (std::int32_t k = op.a; k < op.b && !v; ++k)
                    v = scratch[static_cast<size_t>(kids_[static_cast<size_t>(k)])];
                scratch[i] = v;
                break;
            }
            }
        }
    }

    void run(const BitVec& x, std::vector<std::uint8_t>& scratch) const {
        run_impl([&](std::int32_t i) -> std::uint8_t { return x.get(i) ? 1 : 0; }, scratch);
    }

    void run_mask(std::uint64_t x, std::vector<std::uint8_t>& scratch) const {
        run_impl([&](std::int32_t i) -> std::uint8_t { return (x >> i) & 1u; }, scratch);
    }

    int n_;
    std::vector<BoolCircuit> outs_;
    std::vector<Op> ops_;
    std::vector<std::int32_t> kids_;
    std::vector<std::int32_t> out_slot_;
};

/// Substitutes g's output circuits for f's inputs: eval(compose(f,g), x) ==
/// eval(f, eval(g, x)). Shared nodes of f are substituted once.
inline BoolMap compose(const BoolMap& f, const BoolMap& g) {
    if (f.dim() != g.dim()) throw DimensionError("compose dimension mismatch");
    std::unordered_map<const void*, BoolCircuit> memo;
    auto subst = [&](const BoolCircuit& c, auto&& self) -> BoolCircuit {
        if (auto it = memo.find(c.id()); it != memo.end()) return it->second;
        BoolCircuit out = [&] {
            switch (c.kind()) {
            case BoolCircuit::Kind::Input: return g.outputs()[static_cast<size_t>(c.input_index() - 1)];
            case BoolCircuit::Kind::Const: return c;
            default: {
                std::vector<BoolCircuit> kids;
                kids.reserve(c.children().size());
                for (const auto& k : c.children()) kids.push_back(self(k, self));
                return c.kind() == BoolCircuit::Kind::And ? BoolCircuit::all_of(std::move(kids))
                                                          : BoolCircuit::any_of(std::move(kids));
            }
            }
        }();
        memo.emplace(c.id(), out);
        return out;
    };
    std::vector<BoolCircuit> outs;
    outs.reserve(static_cast<size_t>(f.dim()));
    for (const auto& c : f.outputs()) outs.push_back(subst(c, subst));
    return BoolMap(f.dim(), std::move(outs));
}

/// Entrywise Or of output circuits.
inline BoolMap join_or(const BoolMap& f, const BoolMap& g) {
    if (f.dim() != g.dim()) throw DimensionError("join_or dimension mismatch");
    std::vector<BoolCircuit> outs;
    outs.reserve(static_cast<size_t>(f.dim()));
    for (int i = 0; i < f.dim(); ++i)
        outs.push_back(BoolCircuit::any_of({f.outputs()[static_cast<size_t>(i)], g.outputs()[static_cast<size_t>(i)]}));
    return BoolMap(f.dim(), std::move(outs));
}

} // namespace mtop
