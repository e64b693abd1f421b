#pragma once

// Directed graph over nodes 1..n with strongly connected components,
// condensation, final classes, and DOT export.

#include <algorithm>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mtop/bitvec.hpp"
#include "mtop/errors.hpp"

namespace mtop {

class Digraph {
public:
    /// adj[i] lists the 0-based successors of node i.
    Digraph(int n, std::vector<std::vector<int>> adj) : n_(n), adj_(std::move(adj)) {
        if (static_cast<int>(adj_.size()) != n_) throw DimensionError("adjacency list size mismatch");
        tarjan();
        build_condensation();
    }

    int size() const { return n_; }
    const std::vector<std::vector<int>>& adj() const { return adj_; }
    bool has_arc(int from, int to) const {
        const auto& row = adj_[static_cast<size_t>(from)];
        return std::find(row.begin(), row.end(), to) != row.end();
    }

    int scc_count() const { return scc_count_; }
    int scc_of(int node) const { return scc_id_[static_cast<size_t>(node)]; }
    /// Members of one class, ascending node order.
    const std::vector<int>& scc_members(int scc) const { return members_[static_cast<size_t>(scc)]; }
    /// Class ids in a topological order of the condensation (sources first).
    const std::vector<int>& condensation_order() const { return topo_order_; }
    const std::vector<std::vector<int>>& condensation_adj() const { return cond_adj_; }

    /// Classes with no outgoing condensation arcs.
    const std::vector<int>& final_classes() const { return final_classes_; }

    bool strongly_connected() const { return scc_count_ == 1; }

    BitVec scc_bits(int scc) const {
        BitVec b(n_);
        for (int v : members_[static_cast<size_t>(scc)]) b.set(v, true);
        return b;
    }

    /// DOT rendering with one cluster per class; final classes are flagged.
    std::string to_dot() const {
        std::ostringstream os;
        os << "digraph G {\n";
        for (int s = 0; s < scc_count_; ++s) {
            bool fin = std::find(final_classes_.begin(), final_classes_.end(), s) != final_classes_.end();
            os << "  subgraph cluster_" << s << " {\n";
            os << "    label=\"class " << s << (fin ? " (final)" : "") << "\";\n";
            if (fin) os << "    style=bold;\n";
            for (int v : members_[static_cast<size_t>(s)]) os << "    " << (v + 1) << ";\n";
            os << "  }\n";
        }
        for (int i = 0; i < n_; ++i)
            for (int j : adj_[static_cast<size_t>(i)]) os << "  " << (i + 1) << " -> " << (j + 1) << ";\n";
        os << "}\n";
        return os.str();
    }

private:
    // Iterative Tarjan; components are produced in reverse topological order
    // of the condensation.
    void tarjan() {
        scc_id_.assign(static_cast<size_t>(n_), -1);
        std::vector<int> index(static_cast<size_t>(n_), -1), low(static_cast<size_t>(n_), 0);
        std::vector<bool> on_stack(static_cast<size_t>(n_), false);
        std::vector<int> stack;
        int next_index = 0;

        struct Frame {
            int node;
            size_t child;
        };
        for (int root = 0; root < n_; ++root) {
            if (index[static_cast<size_t>(root)] != -1) continue;
            std::vector<Frame> frames{{root, 0}};
            index[static_cast<size_t>(root)] = low[static_cast<size_t>(root)] = next_index++;
            stack.push_back(root);
            on_stack[static_cast<size_t>(root)] = true;
            while (!frames.empty()) {
                Frame& fr = frames.back();
                const auto& succ = adj_[static_cast<size_t>(fr.node)];
                if (fr.child < succ.size()) {
                    int w = succ[fr.child++];
                    if (index[static_cast<size_t>(w)] == -1) {
                        index[static_cast<size_t>(w)] = low[static_cast<size_t>(w)] = next_index++;
                        stack.push_back(w);
                        on_stack[static_cast<size_t>(w)] = true;
                        frames.push_back(Frame{w, 0});
                    } else if (on_stack[static_cast<size_t>(w)]) {
                        low[static_cast<size_t>(fr.node)] =
                            std::min(low[static_cast<size_t>(fr.node)], index[static_cast<size_t>(w)]);
                    }
                } else {
                    int v = fr.node;
                    frames.pop_back();
                    if (!frames.empty())
                        low[static_cast<size_t>(frames.back().node)] =
                            std::min(low[static_cast<size_t>(frames.back().node)], low[static_cast<size_t>(v)]);
                    if (low[static_cast<size_t>(v)] == index[static_cast<size_t>(v)]) {
                        std::vector<int> comp;
                        while (true) {
                            int w = stack.back();
                            stack.pop_back();
                            on_stack[static_cast<size_t>(w)] = false;
                            scc_id_[static_cast<size_t>(w)] = static_cast<int>(members_.size());
                            comp.push_back(w);
                            if (w == v) break;
                        }
                        std::sort(comp.begin(), comp.end());
                        members_.push_back(std::move(comp));
                    }
                }
            }
        }
        scc_count_ = static_cast<int>(members_.size());
    }

    void build_condensation() {
        cond_adj_.assign(static_cast<size_t>(scc_count_), {});
        std::set<std::pair<int, int>> seen;
        for (int i = 0; i < n_; ++i) {
            for (int j : adj_[static_cast<size_t>(i)]) {
                int a = scc_of(i), b = scc_of(j);
                if (a != b && seen.insert({a, b}).second) cond_adj_[static_cast<size_t>(a)].push_back(b);
            }
        }
        // Tarjan emits components in reverse topological order
        topo_order_.resize(static_cast<size_t>(scc_count_));
        for (int s = 0; s < scc_count_; ++s) topo_order_[static_cast<size_t>(scc_count_ - 1 - s)] = s;
        for (int s = 0; s < scc_count_; ++s)
            if (cond_adj_[static_cast<size_t>(s)].empty()) final_classes_.push_back(s);
    }

    int n_;
    std::vector<std::vector<int>> adj_;
    std::vector<int> scc_id_;
    int scc_count_ = 0;
    std::vector<std::vector<int>> members_;
    std::vector<std::vector<int>> cond_adj_;
    std::vector<int> topo_order_;
    std::vector<int> final_classes_;
};

} // namespace mtop
