#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mtop/errors.hpp"

namespace mtop {

/// Indicator vector of a subset J of [n]. Bit i (0-based) marks membership of
/// coordinate i+1, matching the 1-based coordinates of the map DSL.
class BitVec {
public:
    BitVec() = default;
    explicit BitVec(int n) : bits_(static_cast<size_t>(n), 0) {}

    static BitVec from_mask(int n, std::uint64_t mask) {
        BitVec v(n);
        for (int i = 0; i < n && i < 64; ++i)
            v.bits_[static_cast<size_t>(i)] = (mask >> i) & 1u;
        return v;
    }

    static BitVec ones(int n) {
        BitVec v(n);
        for (auto& b : v.bits_) b = 1;
        return v;
    }

    int size() const { return static_cast<int>(bits_.size()); }

    bool get(int i) const { return bits_[static_cast<size_t>(i)] != 0; }
    void set(int i, bool v) { bits_[static_cast<size_t>(i)] = v ? 1 : 0; }

    int count() const {
        int c = 0;
        for (auto b : bits_) c += b;
        return c;
    }

    bool none() const { return count() == 0; }
    bool all() const { return count() == size(); }

    std::uint64_t to_mask() const {
        std::uint64_t m = 0;
        for (int i = 0; i < size() && i < 64; ++i)
            if (bits_[static_cast<size_t>(i)]) m |= (std::uint64_t{1} << i);
        return m;
    }

    bool operator==(const BitVec& o) const { return bits_ == o.bits_; }
    bool operator!=(const BitVec& o) const { return bits_ != o.bits_; }

    /// Entrywise <=, i.e. subset containment.
    bool subset_of(const BitVec& o) const {
        if (size() != o.size()) throw DimensionError("BitVec size mismatch");
        for (size_t i = 0; i < bits_.size(); ++i)
            if (bits_[i] && !o.bits_[i]) return false;
        return true;
    }

    BitVec complement() const {
        BitVec v(size());
        for (size_t i = 0; i < bits_.size(); ++i) v.bits_[i] = bits_[i] ? 0 : 1;
        return v;
    }

    BitVec operator|(const BitVec& o) const {
        if (size() != o.size()) throw DimensionError("BitVec size mismatch");
        BitVec v(size());
        for (size_t i = 0; i < bits_.size(); ++i) v.bits_[i] = (bits_[i] | o.bits_[i]);
        return v;
    }

    BitVec operator&(const BitVec& o) const {
        if (size() != o.size()) throw DimensionError("BitVec size mismatch");
        BitVec v(size());
        for (size_t i = 0; i < bits_.size(); ++i) v.bits_[i] = (bits_[i] & o.bits_[i]);
        return v;
    }

    /// Renders as a set of 1-based coordinates: "{}", "{1}", "{1,3}".
    std::string to_set_string() const {
        std::string s = "{";
        bool first = true;
        for (int i = 0; i < size(); ++i) {
            if (!get(i)) continue;
            if (!first) s += ",";
            s += std::to_string(i + 1);
            first = false;
        }
        s += "}";
        return s;
    }

private:
    std::vector<std::uint8_t> bits_;
};

} // namespace mtop
