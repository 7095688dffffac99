#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace causalkit {

// Directed acyclic graph over named nodes.  Canonical node order is
// declaration order; all set-valued outputs are sorted by it.  Immutable
// after construction.
class Dag {
public:
    Dag(std::vector<std::string> nodes,
        const std::vector<std::pair<std::string, std::string>>& edges);

    const std::vector<std::string>& nodes() const { return nodes_; }
    std::size_t size() const { return nodes_.size(); }

    // Edges as (from, to) index pairs, sorted.
    const std::vector<std::pair<int, int>>& edges() const { return edges_; }

    int index_of(const std::string& name) const;  // UnknownNodeError
    const std::string& name_of(int idx) const { return nodes_[static_cast<std::size_t>(idx)]; }

    bool has_edge(int from, int to) const;
    const std::vector<int>& parents(int node) const { return parents_[static_cast<std::size_t>(node)]; }
    const std::vector<int>& children(int node) const { return children_[static_cast<std::size_t>(node)]; }

    // Indices in a topological order (parents before children), ties broken
    // by canonical order.
    const std::vector<int>& topological_order() const { return topo_; }

private:
    std::vector<std::string> nodes_;
    std::vector<std::pair<int, int>> edges_;
    std::vector<std::vector<int>> parents_;
    std::vector<std::vector<int>> children_;
    std::vector<int> topo_;
};

Dag build_dag(const std::vector<std::string>& nodes,
              const std::vector<std::pair<std::string, std::string>>& edges);

enum class Relation { Parents, Children, Ancestors, Descendants };

// Parents/children or their transitive closures; the node itself is never
// included.  Results sorted by canonical order.
std::vector<std::string> relatives(const Dag& dag, const std::string& node, Relation kind);

// True iff every path between a and b is blocked given s (reachability
// formulation).  The three sets must be pairwise disjoint.
bool d_separated(const Dag& dag, const std::set<std::string>& a,
                 const std::set<std::string>& b, const std::set<std::string>& s);

// Index-based variant used by hot loops; same semantics, singleton a/b.
bool d_separated_idx(const Dag& dag, int a, int b, const std::vector<bool>& in_s);

struct Independence {
    std::string a;
    std::string b;
    std::vector<std::string> cond;  // sorted by canonical order
};

// Every canonical-ordered pair (a, b) together with every conditioning
// subset of the remaining nodes, sizes 0..max_cond, for which d-separation
// holds.  Deterministic order: pairs by canonical order, subsets by size
// then lexicographically.
std::vector<Independence> implied_independencies(const Dag& dag, int max_cond);

// Partially directed graph: directed edges as ordered pairs, undirected as
// unordered pairs.  Used for PC output and Meek propagation.
class Cpdag {
public:
    Cpdag(std::vector<std::string> nodes,
          const std::vector<std::pair<std::string, std::string>>& directed,
          const std::vector<std::pair<std::string, std::string>>& undirected);

    const std::vector<std::string>& nodes() const { return nodes_; }
    int index_of(const std::string& name) const;
    const std::string& name_of(int idx) const { return nodes_[static_cast<std::size_t>(idx)]; }

    // Directed (from, to) pairs, sorted by index.
    const std::vector<std::pair<int, int>>& directed() const { return directed_; }
    // Undirected pairs with first < second, sorted.
    const std::vector<std::pair<int, int>>& undirected() const { return undirected_; }

    bool has_directed(int from, int to) const;
    bool has_undirected(int a, int b) const;
    bool adjacent(int a, int b) const;

private:
    std::vector<std::string> nodes_;
    std::vector<std::pair<int, int>> directed_;
    std::vector<std::pair<int, int>> undirected_;
};

// Structural Hamming distance between two CPDAGs over the same node set:
// one count per unordered pair whose edge state (absent / undirected /
// either direction) differs.  Nodes are matched by name.
int shd(const Cpdag& g1, const Cpdag& g2);

}  // namespace causalkit
